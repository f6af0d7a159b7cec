#include "wlap/weight.hpp"

#include <cmath>
#include <string>

namespace wlap {
namespace {

// Derivative along one axis at index k of a line of n samples. `usable(m)`
// tells whether sample m may be used as a stencil point.
template <typename Value, typename Usable>
double axis_derivative(Eigen::Index k, Eigen::Index n, double h, Value&& value, Usable&& usable) {
  const bool lo = k > 0 && usable(k - 1);
  const bool hi = k + 1 < n && usable(k + 1);
  if (lo && hi) return (value(k + 1) - value(k - 1)) / (2.0 * h);
  if (hi) {
    if (k + 2 < n && usable(k + 2))
      return (3.0 * (value(k + 1) - value(k)) - (value(k + 2) - value(k + 1))) / (2.0 * h);
    return (value(k + 1) - value(k)) / h;
  }
  if (lo) {
    if (k >= 2 && usable(k - 2))
      return (3.0 * (value(k) - value(k - 1)) - (value(k - 1) - value(k - 2))) / (2.0 * h);
    return (value(k) - value(k - 1)) / h;
  }
  return 0.0;
}

template <typename Usable>
std::pair<ScalarField, ScalarField> gradient_impl(const ScalarField& c, Usable&& usable_pixel) {
  const auto w = c.width(), hgt = c.height();
  const double h = c.spacing;
  ScalarField gx(w, hgt, h), gy(w, hgt, h);
  for (Eigen::Index i = 0; i < hgt; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) {
      if (!usable_pixel(i, j)) continue;
      gx(i, j) = axis_derivative(
          j, w, h, [&](Eigen::Index m) { return c(i, m); },
          [&](Eigen::Index m) { return usable_pixel(i, m); });
      gy(i, j) = axis_derivative(
          i, hgt, h, [&](Eigen::Index m) { return c(m, j); },
          [&](Eigen::Index m) { return usable_pixel(m, j); });
    }
  }
  return {std::move(gx), std::move(gy)};
}

}  // namespace

std::pair<ScalarField, ScalarField> compute_gradient(const ScalarField& c) {
  return gradient_impl(c, [](Eigen::Index, Eigen::Index) { return true; });
}

std::pair<ScalarField, ScalarField> compute_gradient(const ScalarField& c,
                                                     const DomainSpec& domain) {
  if (c.width() != domain.width || c.height() != domain.height)
    throw std::invalid_argument("compute_gradient: weight does not match domain grid");
  return gradient_impl(c, [&](Eigen::Index i, Eigen::Index j) {
    return !domain.known(i, j);
  });
}

void validate_weight_range(const ScalarField& c) {
  for (Eigen::Index i = 0; i < c.height(); ++i)
    for (Eigen::Index j = 0; j < c.width(); ++j) {
      const double v = c(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("weight outside [0,1] at (row " + std::to_string(i) +
                                    ", col " + std::to_string(j) + "): " + std::to_string(v));
    }
}

WeightField make_weight(ScalarField c) {
  validate_weight_range(c);
  auto [gx, gy] = compute_gradient(c);
  return {std::move(c), std::move(gx), std::move(gy), GradientSource::central_difference};
}

WeightField make_weight(ScalarField c, const DomainSpec& domain) {
  validate_weight_range(c);
  auto [gx, gy] = compute_gradient(c, domain);
  return {std::move(c), std::move(gx), std::move(gy), GradientSource::central_difference};
}

WeightField make_weight(ScalarField c, ScalarField grad_x, ScalarField grad_y) {
  validate_weight_range(c);
  require_same_shape(c, grad_x, "make_weight");
  require_same_shape(c, grad_y, "make_weight");
  return {std::move(c), std::move(grad_x), std::move(grad_y), GradientSource::analytic_supplied};
}

std::vector<Eigen::Index> unit_weight_pixels(const WeightField& weight, const DomainSpec& domain) {
  std::vector<Eigen::Index> out;
  for (const auto p : domain.unknown_pixels)
    if (weight.c[p] >= 1.0) out.push_back(p);
  return out;
}

CoefficientField build_coefficients(const WeightField& weight, CrossSign sign) {
  CoefficientField a;
  a.diag_val = weight.c;
  a.diag_grad = weight.c;
  a.diag_grad.values = 1.0 - weight.c.values;
  a.cross_x = weight.grad_x;
  a.cross_x.values = -weight.grad_x.values;
  a.cross_y = weight.grad_y;
  if (sign == CrossSign::divergence_form) a.cross_y.values = -weight.grad_y.values;
  a.sign = sign;
  return a;
}

double face_coefficient(const DomainSpec& domain, const ScalarField& c, Eigen::Index p,
                        Eigen::Index q) {
  const bool kp = domain.is_known(p), kq = domain.is_known(q);
  if (kp && kq) return 0.0;
  if (kp) return 1.0 - c[q];
  if (kq) return 1.0 - c[p];
  const double a = 1.0 - c[p], b = 1.0 - c[q];
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

SparseMatrix weighted_stiffness(const DomainSpec& domain, const ScalarField& c) {
  const auto n = domain.unknown_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(5 * n));
  const auto& idx = domain.unknown_index;
  for_each_face(domain, [&](Eigen::Index p, Eigen::Index q, double length_ratio) {
    const double k = face_coefficient(domain, c, p, q) * length_ratio;
    const auto ip = idx[static_cast<std::size_t>(p)], iq = idx[static_cast<std::size_t>(q)];
    if (ip >= 0) t.emplace_back(ip, ip, k);
    if (iq >= 0) t.emplace_back(iq, iq, k);
    if (ip >= 0 && iq >= 0) {
      t.emplace_back(ip, iq, -k);
      t.emplace_back(iq, ip, -k);
    }
  });
  SparseMatrix K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  return K;
}

SparseMatrix lumped_mass(const DomainSpec& domain) {
  const auto n = domain.unknown_count();
  SparseMatrix M(n, n);
  M.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index k = 0; k < n; ++k)
    M.insert(k, k) = domain.cell_area(domain.unknown_pixels[static_cast<std::size_t>(k)]);
  M.makeCompressed();
  return M;
}

SparseMatrix v_gram(const DomainSpec& domain, const ScalarField& c) {
  SparseMatrix G = weighted_stiffness(domain, c) + lumped_mass(domain);
  G.makeCompressed();
  return G;
}

}  // namespace wlap
