#include "wlap/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wlap {

double annulus_exact(double epsilon, double x, double y) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("annulus_exact: epsilon must lie in (0, 1)");
  const double r2 = x * x + y * y;
  const double r = std::sqrt(r2);
  constexpr double slack = 1e-12;
  if (r < epsilon * (1.0 - slack) || r > 1.0 + slack)
    throw std::invalid_argument("annulus_exact: point at radius " + std::to_string(r) +
                                " lies outside the annulus");
  return std::log(r2) / (2.0 * std::log(epsilon));
}

AnnulusProblem build_annulus(double epsilon, Eigen::Index resolution) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("build_annulus: epsilon must lie in (0, 1)");
  if (resolution < 33) throw std::invalid_argument("build_annulus: resolution must be >= 33");

  AnnulusProblem a;
  a.epsilon = epsilon;
  a.resolution = resolution;
  const double h = 2.0 / double(resolution - 5);
  a.center = 0.5 * double(resolution - 1);

  const auto n = resolution;
  Mask known = Mask::Constant(n, n, false);
  a.data = ScalarField(n, n, h);
  double nearest = std::numeric_limits<double>::infinity();
  Eigen::Index ni = 0, nj = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = h * std::hypot(double(j) - a.center, double(i) - a.center);
      const bool frame = i == 0 || j == 0 || i == n - 1 || j == n - 1;
      if (r <= epsilon) {
        known(i, j) = true;
        a.data(i, j) = 1.0;
      } else if (r >= 1.0 && !frame) {
        known(i, j) = true;
      }
      if (r < nearest) {
        nearest = r;
        ni = i;
        nj = j;
      }
    }
  }
  known(ni, nj) = true;
  a.data(ni, nj) = 1.0;
  a.domain = build_domain(known, h);
  return a;
}

AnnulusRow annulus_solve(double epsilon, Eigen::Index resolution, double tolerance) {
  const auto a = build_annulus(epsilon, resolution);
  const auto& d = a.domain;
  const auto system = assemble_dirichlet(d, a.data);
  SolveOptions opt;
  opt.method = SolveMethod::cg;
  opt.tolerance = tolerance;
  const auto rep = solve(system, opt);
  const auto u = recover_from_dirichlet(d, rep.solution, a.data);

  AnnulusRow row;
  row.resolution = resolution;
  row.spacing = d.spacing;
  row.iterations = rep.iterations;
  row.residual = rep.final_residual;
  row.converged = rep.converged;
  const double h = d.spacing;
  for (const auto p : d.unknown_pixels) {
    const double x = a.x(d.col(p)), y = a.y(d.row(p));
    const double r = std::hypot(x, y);
    if (r <= epsilon + 2.0 * h || r >= 1.0 - 2.0 * h) continue;
    row.max_error = std::max(row.max_error, std::abs(u[p] - annulus_exact(epsilon, x, y)));
    ++row.samples;
  }

  row.exact_at_half = annulus_exact(epsilon, 0.5, 0.0);
  const double gx = a.center + 0.5 / h;
  const auto j0 = static_cast<Eigen::Index>(std::floor(gx));
  const double t = gx - double(j0);
  const auto ic = static_cast<Eigen::Index>(std::llround(a.center));
  row.discrete_at_half = (1.0 - t) * u(ic, j0) + t * u(ic, std::min(j0 + 1, resolution - 1));
  return row;
}

std::vector<AnnulusRow> annulus_convergence(double epsilon,
                                            const std::vector<Eigen::Index>& resolutions,
                                            double tolerance) {
  if (resolutions.empty()) throw std::invalid_argument("annulus_convergence: no resolutions");
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    if (resolutions[k] < 33)
      throw std::invalid_argument("annulus_convergence: resolutions must be >= 33");
    if (k > 0 && resolutions[k] <= resolutions[k - 1])
      throw std::invalid_argument("annulus_convergence: resolutions must increase");
  }
  std::vector<AnnulusRow> rows;
  rows.reserve(resolutions.size());
  for (const auto n : resolutions) rows.push_back(annulus_solve(epsilon, n, tolerance));
  return rows;
}

}  // namespace wlap
