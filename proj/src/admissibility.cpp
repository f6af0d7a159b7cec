#include "wlap/admissibility.hpp"

#include "wlap/linear_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>

namespace wlap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_grid(const DomainSpec& d, const ScalarField& f, const char* what) {
  if (f.width() != d.width || f.height() != d.height)
    throw std::invalid_argument(std::string(what) + ": field does not match domain grid");
}

}  // namespace

GrowthResult growth_kappa(const WeightField& weight, const DomainSpec& domain) {
  require_grid(domain, weight.c, "growth_kappa");
  const double grad_tol = kGradientTolerance / domain.spacing;
  GrowthResult out;
  for (const auto p : domain.unknown_pixels) {
    const double c = weight.c[p];
    const double gx = std::abs(weight.grad_x[p]), gy = std::abs(weight.grad_y[p]);
    const double deg = c * (1.0 - c);
    double ratio;
    if (deg <= kDegenerateTolerance) {
      ratio = (gx <= grad_tol && gy <= grad_tol) ? 0.0 : kInf;
    } else {
      ratio = std::max(gx, gy) / std::sqrt(deg);
    }
    if (ratio == kInf) out.violations.push_back({p, ratio});
    out.kappa_min = std::max(out.kappa_min, ratio);
  }
  return out;
}

double pixel_kappa_prime(double c, double grad_x, double grad_y, CrossSign sign, double spacing) {
  const double cross_x = -grad_x;
  const double cross_y = sign == CrossSign::divergence_form ? -grad_y : grad_y;
  const double deg = c * (1.0 - c);
  if (deg <= kDegenerateTolerance) {
    // M - t D restricted to ker D is the zero block; semidefiniteness forces
    // the cross terms to vanish, after which M - t D = (1 - t) D.
    const double tol = kGradientTolerance / spacing;
    return (std::abs(grad_x) <= tol && std::abs(grad_y) <= tol) ? 1.0 : 0.0;
  }
  // Order (u, d_y u, d_x u). Each cross coefficient appears once in the
  // quadratic form, so the symmetric matrix holds half of it.
  Eigen::Matrix3d m;
  m << c, 0.5 * cross_y, 0.5 * cross_x,
       0.5 * cross_y, 1.0 - c, 0.0,
       0.5 * cross_x, 0.0, 1.0 - c;
  const Eigen::Vector3d d_inv_sqrt(1.0 / std::sqrt(c), 1.0 / std::sqrt(1.0 - c),
                                   1.0 / std::sqrt(1.0 - c));
  const Eigen::Matrix3d scaled = d_inv_sqrt.asDiagonal() * m * d_inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scaled, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

double quadratic_kappa_prime(const CoefficientField& a, const DomainSpec& domain) {
  require_grid(domain, a.diag_val, "quadratic_kappa_prime");
  double kp = 1.0;
  bool any = false;
  for (const auto p : domain.unknown_pixels) {
    // Recover the gradient from the stored cross coefficients.
    const double gx = -a.cross_x[p];
    const double gy = a.sign == CrossSign::divergence_form ? -a.cross_y[p] : a.cross_y[p];
    const double t = pixel_kappa_prime(a.diag_val[p], gx, gy, a.sign, domain.spacing);
    kp = any ? std::min(kp, t) : t;
    any = true;
  }
  return kp;
}

double quadratic_kappa_prime(const WeightField& weight, const DomainSpec& domain) {
  return std::min(quadratic_kappa_prime(build_coefficients(weight, CrossSign::divergence_form),
                                        domain),
                  quadratic_kappa_prime(build_coefficients(weight, CrossSign::ternary_table),
                                        domain));
}

double v_inner(const ScalarField& u, const ScalarField& v, const WeightField& weight,
               const DomainSpec& domain) {
  require_grid(domain, u, "v_inner");
  require_grid(domain, v, "v_inner");
  require_grid(domain, weight.c, "v_inner");
  double sum = 0.0;
  for_each_face(domain, [&](Eigen::Index p, Eigen::Index q, double length_ratio) {
    sum += face_coefficient(domain, weight.c, p, q) * length_ratio * (u[p] - u[q]) * (v[p] - v[q]);
  });
  for (const auto p : domain.unknown_pixels) sum += domain.cell_area(p) * u[p] * v[p];
  return sum;
}

double v_norm(const ScalarField& u, const WeightField& weight, const DomainSpec& domain) {
  return std::sqrt(std::max(0.0, v_inner(u, u, weight, domain)));
}

double v_seminorm(const ScalarField& u, const WeightField& weight, const DomainSpec& domain) {
  require_grid(domain, u, "v_seminorm");
  require_grid(domain, weight.c, "v_seminorm");
  double sum = 0.0;
  for_each_face(domain, [&](Eigen::Index p, Eigen::Index q, double length_ratio) {
    const double d = u[p] - u[q];
    sum += face_coefficient(domain, weight.c, p, q) * length_ratio * d * d;
  });
  return std::sqrt(sum);
}

double l2_norm_unknown(const ScalarField& u, const DomainSpec& domain) {
  require_grid(domain, u, "l2_norm_unknown");
  double sum = 0.0;
  for (const auto p : domain.unknown_pixels) sum += domain.cell_area(p) * u[p] * u[p];
  return std::sqrt(sum);
}

std::vector<Eigen::Index> boundary_distance(const DomainSpec& domain) {
  std::vector<Eigen::Index> dist(static_cast<std::size_t>(domain.pixel_count()), 0);
  std::deque<Eigen::Index> queue;
  for (const auto p : domain.unknown_pixels) {
    bool seed = domain.on_frame(p);
    domain.for_each_neighbor(p, [&](Eigen::Index q) { seed |= domain.is_known(q); });
    dist[static_cast<std::size_t>(p)] = seed ? 1 : -1;
    if (seed) queue.push_back(p);
  }
  while (!queue.empty()) {
    const auto p = queue.front();
    queue.pop_front();
    domain.for_each_neighbor(p, [&](Eigen::Index q) {
      auto& dq = dist[static_cast<std::size_t>(q)];
      if (!domain.is_known(q) && dq < 0) {
        dq = dist[static_cast<std::size_t>(p)] + 1;
        queue.push_back(q);
      }
    });
  }
  return dist;
}

NonCompactnessEstimate estimate_A(const DomainSpec& domain, const WeightField& weight,
                                  int levels) {
  require_grid(domain, weight.c, "estimate_A");
  if (levels < 1) throw std::invalid_argument("estimate_A: levels must be positive");
  if (domain.unknown_count() == 0) throw ExhaustionError("estimate_A: no unknown pixels");

  const auto dist = boundary_distance(domain);
  Eigen::Index d_max = 0;
  for (const auto p : domain.unknown_pixels) d_max = std::max(d_max, dist[static_cast<std::size_t>(p)]);

  const SparseMatrix gram = v_gram(domain, weight.c);
  NonCompactnessEstimate est;
  Vector start;
  for (int k = 0; k < levels; ++k) {
    const Eigen::Index d_k = d_max >> k;
    if (d_k < 1)
      throw ExhaustionError("estimate_A: boundary shell vanishes at level " + std::to_string(k + 1) +
                            " (largest boundary distance " + std::to_string(d_max) +
                            "); grid too coarse for " + std::to_string(levels) + " levels");
    const auto n = domain.unknown_count();
    SparseMatrix shell_mass(n, n);
    shell_mass.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto p = domain.unknown_pixels[static_cast<std::size_t>(r)];
      if (dist[static_cast<std::size_t>(p)] <= d_k) shell_mass.insert(r, r) = domain.cell_area(p);
    }
    shell_mass.makeCompressed();
    const auto eig = largest_generalized_eigenvalue(shell_mass, gram, 1e-13, 20000,
                                                    start.size() ? &start : nullptr);
    start = eig.vector;
    const double a_k = std::clamp(std::sqrt(std::max(0.0, eig.value)), 0.0, 1.0);
    if (!est.a_sequence.empty() && a_k > est.a_sequence.back() + 1e-9) est.monotone = false;
    est.a_sequence.push_back(a_k);
    est.shell_width.push_back(d_k);
  }
  est.a_limit_estimate = est.a_sequence.back();
  return est;
}

AdmissibilityReport check_admissibility(const WeightField& weight, const DomainSpec& domain,
                                        int levels) {
  AdmissibilityReport r;
  auto growth = growth_kappa(weight, domain);
  r.kappa_min = growth.kappa_min;
  r.growth_violations = std::move(growth.violations);
  r.kappa_prime_max = quadratic_kappa_prime(weight, domain);
  const auto a = estimate_A(domain, weight, levels);
  r.a_sequence = a.a_sequence;
  r.a_limit_estimate = a.a_limit_estimate;
  r.a_monotone = a.monotone;
  r.unit_weight_pixels = unit_weight_pixels(weight, domain);
  r.passed = std::isfinite(r.kappa_min) && r.kappa_prime_max > 0.0 && r.a_limit_estimate < 1.0;
  return r;
}

}  // namespace wlap
