#ifndef WLAP_DISCRETIZATION_HPP
#define WLAP_DISCRETIZATION_HPP

#include "wlap/grid_domain.hpp"
#include "wlap/weight.hpp"

#include <stdexcept>

namespace wlap {

enum class SystemOrigin { dirichlet, collocation, weak };

const char* to_string(SystemOrigin o);

/// Assembled linear system. The matrix is stored row-compressed.
struct SparseSystem {
  SparseMatrix matrix;
  Vector rhs;
  bool symmetric_hint = false;
  SystemOrigin origin = SystemOrigin::dirichlet;

  Eigen::Index n() const { return rhs.size(); }
};

/// Raised when the model has no data to pin the solution (no Dirichlet
/// pixels, or c identically zero).
class NoDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AssemblyOptions {
  /// Return singular systems (no data to pin the solution) instead of
  /// throwing NoDataError, e.g. to hand them to detect_singularity.
  bool allow_singular = false;
};

/// Checks the structural invariants of a system: offsets, column bounds,
/// duplicate columns, and symmetry to 1e-12 when the hint is set. Throws
/// std::logic_error.
void verify_system(const SparseSystem& system);

/// Harmonic inpainting with Dirichlet data f on the known boundary and
/// homogeneous Neumann conditions on the frame. Unknowns are the unknown
/// pixels of `domain`. Rows are scaled by control-volume area over h^2, which
/// makes the reflected-ghost stencil symmetric.
SparseSystem assemble_dirichlet(const DomainSpec& domain, const ScalarField& f,
                                AssemblyOptions options = {});

/// c (u - f) - (1 - c) Lap u = 0 at every pixel, with reflected ghosts on the
/// frame. Unknowns are all pixels (row-major); `domain` only supplies the
/// grid. Rows are scaled by the control-volume area, so constant c gives a
/// symmetric matrix.
SparseSystem assemble_collocation(const DomainSpec& domain, const WeightField& weight,
                                  const ScalarField& f, AssemblyOptions options = {});

/// Finite-volume discretization of the weak form in v = u - f on the unknown
/// pixels: harmonic face averages of 1 - c for the flux, central differences
/// for -(grad c . grad v) v, lumped c v, right-hand side from
/// g = (1 - c) Lap f on cells and h = -d_n f on frame faces.
SparseSystem assemble_weak(const DomainSpec& domain, const WeightField& weight,
                           const ScalarField& f, AssemblyOptions options = {});

/// Right-hand-side data of the homogenised problem.
struct WeakData {
  ScalarField laplacian_f;  // 5-point, ghosts from the one-sided normal derivative on the frame
  ScalarField g;            // (1 - c) Lap f
  ScalarField normal_x;     // -d_n f on the left/right frame columns, 0 elsewhere
  ScalarField normal_y;     // -d_n f on the top/bottom frame rows, 0 elsewhere
};

WeakData weak_data(const WeightField& weight, const ScalarField& f);

/// u = v + f on unknowns, u = f on known pixels.
ScalarField recover_from_weak(const DomainSpec& domain, const Vector& v, const ScalarField& f);

/// Full image from a Dirichlet solve: solution on unknowns, f on known pixels.
ScalarField recover_from_dirichlet(const DomainSpec& domain, const Vector& u,
                                   const ScalarField& f);

/// Full image from a collocation solve.
ScalarField recover_from_collocation(const DomainSpec& domain, const Vector& u);

/// Matrix of the bilinear form B^c on the unknowns, without the right-hand
/// side: weak-form stiffness + convection + lumped c mass.
SparseMatrix weak_form_matrix(const DomainSpec& domain, const WeightField& weight);

/// (A + A^T) / 2.
SparseMatrix symmetric_part(const SparseMatrix& a);

}  // namespace wlap

#endif  // WLAP_DISCRETIZATION_HPP
