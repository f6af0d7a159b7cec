#include "wlap/analysis.hpp"

#include <cmath>

namespace wlap {
namespace {

double grid_coord(Eigen::Index k, Eigen::Index n) { return -1.0 + 2.0 * double(k) / double(n - 1); }

}  // namespace

Mask disk_region(Eigen::Index resolution, double rho) {
  Mask m = Mask::Constant(resolution, resolution, false);
  for (Eigen::Index i = 0; i < resolution; ++i)
    for (Eigen::Index j = 0; j < resolution; ++j)
      m(i, j) = std::hypot(grid_coord(j, resolution), grid_coord(i, resolution)) <= rho;
  return m;
}

Mask center_pixel_region(Eigen::Index resolution) {
  Mask m = Mask::Constant(resolution, resolution, false);
  const auto c = (resolution - 1) / 2;
  m(c, c) = true;
  return m;
}

CapacityResult alpha_capacity(const Mask& region, double alpha, CapacityDomain domain,
                              double tolerance) {
  const auto n = region.rows();
  if (region.cols() != n || n < 5) throw std::invalid_argument("alpha_capacity: region must be square, >= 5x5");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha_capacity: alpha must be positive");
  if (!region.any()) throw std::invalid_argument("alpha_capacity: region E is empty");

  const double h = 2.0 / double(n - 1);
  auto inside = [&](Eigen::Index i, Eigen::Index j) {
    if (i == 0 || j == 0 || i == n - 1 || j == n - 1) return false;
    if (domain == CapacityDomain::unit_square) return true;
    return std::hypot(grid_coord(j, n), grid_coord(i, n)) < 1.0;
  };

  // -1: fixed to 0 outside D, -2: fixed to 1 on E.
  std::vector<Eigen::Index> index(static_cast<std::size_t>(n * n), -1);
  Eigen::Index unknowns = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      auto& id = index[static_cast<std::size_t>(i * n + j)];
      if (region(i, j)) {
        if (!inside(i, j))
          throw std::invalid_argument("alpha_capacity: region E must lie strictly inside D");
        id = -2;
      } else if (inside(i, j)) {
        id = unknowns++;
      }
    }

  // Energy sum over faces (u_p - u_q)^2 + alpha h^2 sum u^2: the face term is
  // the midpoint rule for |grad u|^2 over the dual cell of area h^2.
  const double mass = alpha * h * h;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(5 * unknowns));
  Vector rhs = Vector::Zero(unknowns);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto r = index[static_cast<std::size_t>(i * n + j)];
      if (r < 0) continue;
      double diag = mass;
      const Eigen::Index nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        const auto c = index[static_cast<std::size_t>(q[0] * n + q[1])];
        diag += 1.0;
        if (c >= 0)
          t.emplace_back(r, c, -1.0);
        else if (c == -2)
          rhs[r] += 1.0;
      }
      t.emplace_back(r, r, diag);
    }
  SparseMatrix a(unknowns, unknowns);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();

  SolveOptions opt;
  opt.method = SolveMethod::cg;
  opt.tolerance = tolerance;
  const auto rep = solve(a, rhs, true, opt);

  CapacityResult out;
  out.alpha = alpha;
  out.resolution = n;
  out.iterations = rep.iterations;
  out.minimizer = ScalarField(n, n, h);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto r = index[static_cast<std::size_t>(i * n + j)];
      out.minimizer(i, j) = r >= 0 ? rep.solution[r] : (r == -2 ? 1.0 : 0.0);
    }

  const auto& u = out.minimizer;
  double energy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j + 1 < n) energy += (u(i, j + 1) - u(i, j)) * (u(i, j + 1) - u(i, j));
      if (i + 1 < n) energy += (u(i + 1, j) - u(i, j)) * (u(i + 1, j) - u(i, j));
      energy += mass * u(i, j) * u(i, j);
    }
  out.value = energy;
  out.minimizer_min = u.values.minCoeff();
  out.minimizer_max = u.values.maxCoeff();
  return out;
}

}  // namespace wlap
