#ifndef WLAP_WEIGHT_HPP
#define WLAP_WEIGHT_HPP

#include "wlap/field.hpp"
#include "wlap/grid_domain.hpp"

#include <Eigen/Sparse>

#include <utility>
#include <vector>

namespace wlap {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class GradientSource { analytic_supplied, central_difference };

/// The inpainting weight c together with its gradient.
struct WeightField {
  ScalarField c;
  ScalarField grad_x;
  ScalarField grad_y;
  GradientSource gradient_source = GradientSource::central_difference;
};

/// Second-order central differences in the interior, second-order one-sided
/// differences on the frame.
std::pair<ScalarField, ScalarField> compute_gradient(const ScalarField& c);

/// Gradient of c on the open set of unknown pixels: known pixels are never
/// used as stencil points. Central where both axis neighbours are unknown,
/// one-sided (second order when two unknown pixels are available, else first
/// order) next to known pixels, zero when no unknown neighbour exists along an
/// axis. Known pixels get a zero gradient.
std::pair<ScalarField, ScalarField> compute_gradient(const ScalarField& c,
                                                     const DomainSpec& domain);

/// Throws std::invalid_argument when c leaves [0, 1] or is not finite.
void validate_weight_range(const ScalarField& c);

WeightField make_weight(ScalarField c);
WeightField make_weight(ScalarField c, const DomainSpec& domain);
WeightField make_weight(ScalarField c, ScalarField grad_x, ScalarField grad_y);

/// Unknown pixels where c == 1, i.e. where the weight degenerates inside the
/// inpainting region.
std::vector<Eigen::Index> unit_weight_pixels(const WeightField& weight, const DomainSpec& domain);

/// Sign of the y cross coefficient a_{(0,0),(0,1)}. The x coefficient is
/// always -d_x c; the y one is -d_y c in the divergence form of the bilinear
/// form and +d_y c in the ternary-form table.
enum class CrossSign { divergence_form, ternary_table };

/// Per-pixel coefficients of the ternary quadratic form.
struct CoefficientField {
  ScalarField diag_val;   // c
  ScalarField diag_grad;  // 1 - c, shared by both first derivatives
  ScalarField cross_x;    // a_{(0,0),(1,0)} = -d_x c
  ScalarField cross_y;    // a_{(0,0),(0,1)} = -d_y c or +d_y c
  CrossSign sign = CrossSign::divergence_form;
};

CoefficientField build_coefficients(const WeightField& weight,
                                    CrossSign sign = CrossSign::divergence_form);

/// Diffusion coefficient on the face between 4-neighbours p and q: harmonic
/// mean of 1 - c when both are unknown, 1 - c of the unknown endpoint when
/// the other one is known.
double face_coefficient(const DomainSpec& domain, const ScalarField& c, Eigen::Index p,
                        Eigen::Index q);

/// Calls fn(p, q, length_ratio) for each face with at least one unknown
/// endpoint. length_ratio is the face length over the spacing (1, or 1/2 for
/// faces lying along the frame).
template <typename Fn>
void for_each_face(const DomainSpec& d, Fn&& fn) {
  for (Eigen::Index i = 0; i < d.height; ++i) {
    for (Eigen::Index j = 0; j < d.width; ++j) {
      const Eigen::Index p = i * d.width + j;
      if (j + 1 < d.width) {
        const Eigen::Index q = p + 1;
        if (!d.is_known(p) || !d.is_known(q))
          fn(p, q, (i == 0 || i == d.height - 1) ? 0.5 : 1.0);
      }
      if (i + 1 < d.height) {
        const Eigen::Index q = p + d.width;
        if (!d.is_known(p) || !d.is_known(q))
          fn(p, q, (j == 0 || j == d.width - 1) ? 0.5 : 1.0);
      }
    }
  }
}

/// Stiffness matrix of the seminorm on the unknowns:
/// u^T K u = sum over faces of (1 - c)_face * |face| * |face-normal difference quotient|^2 * h.
SparseMatrix weighted_stiffness(const DomainSpec& domain, const ScalarField& c);

/// Lumped mass matrix on the unknowns (control-volume areas).
SparseMatrix lumped_mass(const DomainSpec& domain);

/// Gram matrix of the weighted inner product on the unknowns: K + M.
SparseMatrix v_gram(const DomainSpec& domain, const ScalarField& c);

}  // namespace wlap

#endif  // WLAP_WEIGHT_HPP
