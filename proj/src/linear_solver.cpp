#include "wlap/linear_solver.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>

namespace wlap {
namespace {

Vector inverse_diagonal(const SparseMatrix& a, bool enabled) {
  Vector d = Vector::Ones(a.rows());
  if (!enabled) return d;
  const Vector diag = a.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (diag[i] != 0.0) d[i] = 1.0 / diag[i];
  return d;
}

Eigen::Index iteration_cap(const SolveOptions& o, Eigen::Index n) {
  return o.max_iterations >= 0 ? o.max_iterations : std::max<Eigen::Index>(10 * n, 10);
}

Vector start_vector(const SolveOptions& o, Eigen::Index n) {
  if (o.initial_guess) {
    if (o.initial_guess->size() != n)
      throw std::invalid_argument("initial guess has wrong length");
    return *o.initial_guess;
  }
  return Vector::Zero(n);
}

SolveReport conjugate_gradient(const SparseMatrix& a, const Vector& b, const SolveOptions& o) {
  const auto n = b.size();
  const Vector inv_diag = inverse_diagonal(a, o.jacobi);
  const double target = o.tolerance * (1.0 + b.norm());
  const auto cap = iteration_cap(o, n);

  SolveReport rep;
  rep.method = SolveMethod::cg;
  Vector x = start_vector(o, n);
  Vector r = b - a * x;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  Vector best = x;
  double best_norm = r.norm();

  auto energy = [&](const Vector& v) { return 0.5 * v.dot(a * v) - b.dot(v); };
  if (o.track_energy) rep.energy_trace.push_back(energy(x));

  Eigen::Index k = 0;
  while (k < cap) {
    const double rn = r.norm();
    if (rn < best_norm) {
      best_norm = rn;
      best = x;
    }
    if (rn <= target) {
      // Guard against drift of the recursive residual.
      Vector true_r = b - a * x;
      if (true_r.norm() <= target) break;
      r = std::move(true_r);
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
    }
    const Vector ap = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // not positive definite along p
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++k;
    if (o.track_energy && k % 10 == 0) rep.energy_trace.push_back(energy(x));
  }

  const double final_norm = (b - a * x).norm();
  if (final_norm <= best_norm || final_norm <= target) {
    rep.solution = std::move(x);
    rep.final_residual = final_norm;
  } else {
    rep.final_residual = (b - a * best).norm();
    rep.solution = std::move(best);
  }
  rep.iterations = k;
  rep.converged = rep.final_residual <= target;
  return rep;
}

SolveReport bicgstab(const SparseMatrix& a, const Vector& b, const SolveOptions& o) {
  const auto n = b.size();
  const Vector inv_diag = inverse_diagonal(a, o.jacobi);
  const double target = o.tolerance * (1.0 + b.norm());
  const auto cap = iteration_cap(o, n);
  constexpr double kTiny = 1e-14;

  SolveReport rep;
  rep.method = SolveMethod::bicgstab;
  Vector x = start_vector(o, n);
  Vector r = b - a * x;
  const Vector r_hat = r;
  const double r_hat_norm = r_hat.norm();
  Vector p = Vector::Zero(n), v = Vector::Zero(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Vector best = x;
  double best_norm = r.norm();

  auto finish = [&](Eigen::Index iters) {
    rep.iterations = iters;
    rep.final_residual = (b - a * best).norm();
    rep.solution = best;
    rep.converged = rep.final_residual <= target;
  };

  Eigen::Index k = 0;
  for (; k < cap; ++k) {
    const double rn = r.norm();
    if (rn < best_norm) {
      best_norm = rn;
      best = x;
    }
    if (rn <= target) {
      Vector true_r = b - a * x;
      if (true_r.norm() <= target) {
        best = x;
        break;
      }
      r = std::move(true_r);
    }
    const double rho_next = r_hat.dot(r);
    if (std::abs(rho_next) <= kTiny * r_hat_norm * rn) {
      finish(k);
      if (rep.converged) return rep;
      throw BreakdownError("bicgstab breakdown: rho vanished at iteration " + std::to_string(k),
                           rep);
    }
    const double beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    p = r + beta * (p - omega * v);
    const Vector y = inv_diag.cwiseProduct(p);
    v = a * y;
    const double rv = r_hat.dot(v);
    if (std::abs(rv) <= kTiny * r_hat_norm * v.norm() || rv == 0.0) {
      finish(k);
      if (rep.converged) return rep;
      throw BreakdownError("bicgstab breakdown: <r_hat, v> vanished at iteration " +
                               std::to_string(k),
                           rep);
    }
    alpha = rho / rv;
    Vector s = r - alpha * v;
    if (s.norm() <= target) {
      x += alpha * y;
      r = std::move(s);
      continue;
    }
    const Vector zs = inv_diag.cwiseProduct(s);
    const Vector t = a * zs;
    const double tt = t.squaredNorm();
    if (tt == 0.0) {
      finish(k);
      if (rep.converged) return rep;
      throw BreakdownError("bicgstab breakdown: omega undefined at iteration " + std::to_string(k),
                           rep);
    }
    omega = t.dot(s) / tt;
    x += alpha * y + omega * zs;
    r = s - omega * t;
    if (omega == 0.0) {
      finish(k + 1);
      if (rep.converged) return rep;
      throw BreakdownError("bicgstab breakdown: omega vanished at iteration " + std::to_string(k),
                           rep);
    }
  }
  if ((b - a * x).norm() <= best_norm) best = x;
  finish(k);
  return rep;
}

SolveReport dense_lu(const SparseMatrix& a, const Vector& b) {
  if (a.rows() > kDirectLimit)
    throw std::invalid_argument("direct solver limited to n <= " + std::to_string(kDirectLimit));
  const Eigen::MatrixXd dense(a);
  SolveReport rep;
  rep.method = SolveMethod::direct;
  rep.solution = dense.partialPivLu().solve(b);
  rep.final_residual = (b - a * rep.solution).norm();
  rep.iterations = 1;
  rep.converged = std::isfinite(rep.final_residual);
  return rep;
}

}  // namespace

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::cg: return "cg";
    case SolveMethod::bicgstab: return "bicgstab";
    case SolveMethod::direct: return "direct";
  }
  return "?";
}

const char* to_string(SingularityKind k) {
  switch (k) {
    case SingularityKind::ok: return "ok";
    case SingularityKind::constant_nullspace: return "constant-nullspace";
    case SingularityKind::ill_conditioned: return "ill-conditioned";
  }
  return "?";
}

SolveReport solve(const SparseMatrix& a, const Vector& b, bool symmetric,
                  const SolveOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (a.rows() != b.size() || a.cols() != b.size())
    throw std::invalid_argument("matrix and right-hand side dimensions differ");
  switch (options.method) {
    case SolveMethod::cg:
      if (!symmetric) throw MethodMismatchError("cg requires a symmetric system");
      return conjugate_gradient(a, b, options);
    case SolveMethod::bicgstab: return bicgstab(a, b, options);
    case SolveMethod::direct: return dense_lu(a, b);
  }
  throw std::invalid_argument("unknown solve method");
}

SolveReport solve(const SparseSystem& system, const SolveOptions& options) {
  return solve(system.matrix, system.rhs, system.symmetric_hint, options);
}

double residual(const SparseSystem& system, const Vector& x) {
  if (x.size() != system.n())
    throw std::invalid_argument("residual: vector length " + std::to_string(x.size()) +
                                " does not match system size " + std::to_string(system.n()));
  return (system.rhs - system.matrix * x).norm();
}

double condition_estimate(const SparseMatrix& a) {
  const auto n = a.rows();
  if (n == 0) return 1.0;

  // sigma_max from power iteration on A^T A (a lower bound).
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * double(i) + 0.3);
  x.normalize();
  double sigma_max = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Vector ax = a * x;
    sigma_max = std::max(sigma_max, ax.norm());
    Vector y = a.transpose() * ax;
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
  }
  if (sigma_max == 0.0) return std::numeric_limits<double>::infinity();

  // sigma_min upper bound: ||A y|| / ||y|| for the constant vector and a few
  // inverse-iteration vectors started from it, with exact sparse LU solves.
  Vector y = Vector::Ones(n) / std::sqrt(double(n));
  double sigma_min = (a * y).norm();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Eigen::SparseMatrix<double>(a));
  if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 6 && sigma_min > 0.0; ++it) {
    const Vector next = lu.solve(y);
    const double nn = next.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) return std::numeric_limits<double>::infinity();
    y = next / nn;
    sigma_min = std::min(sigma_min, (a * y).norm());
  }
  if (sigma_min == 0.0) return std::numeric_limits<double>::infinity();
  return sigma_max / sigma_min;
}

SingularityDiagnosis detect_singularity(const SparseSystem& system) {
  SingularityDiagnosis d;
  const auto n = system.n();
  const double norm_a = system.matrix.norm();
  if (n == 0 || norm_a == 0.0) {
    d.kind = SingularityKind::constant_nullspace;
    d.evidence = "empty or zero matrix";
    return d;
  }
  const Vector ones = Vector::Ones(n);
  d.constant_residual = (system.matrix * ones).norm() / norm_a;
  if (d.constant_residual < 1e-12) {
    d.kind = SingularityKind::constant_nullspace;
    d.condition_estimate = std::numeric_limits<double>::infinity();
    d.evidence = "||A 1|| / ||A|| = " + std::to_string(d.constant_residual);
    return d;
  }
  d.condition_estimate = condition_estimate(system.matrix);
  if (d.condition_estimate > kIllConditioned) {
    d.kind = SingularityKind::ill_conditioned;
    d.evidence = "condition estimate exceeds 1e12";
  }
  return d;
}

}  // namespace wlap

namespace wlap {

SingularityDiagnosis detect_singularity(const SparseSystem& system, const DomainSpec& domain,
                                        const WeightField& weight) {
  auto d = detect_singularity(system);
  Eigen::Index positive = 0;
  for (Eigen::Index p = 0; p < weight.c.size(); ++p) positive += weight.c[p] > 0.0;
  std::string notes = "positive_weight_pixels=" + std::to_string(positive) +
                      " dirichlet_pixels=" + std::to_string(domain.known_boundary.size());
  if (positive == 0 && !domain.has_dirichlet_data())
    notes += " (weight identically zero and no Dirichlet data: pure Neumann problem)";
  d.evidence = d.evidence.empty() ? notes : d.evidence + "; " + notes;
  return d;
}

EigenEstimate largest_generalized_eigenvalue(const SparseMatrix& b, const SparseMatrix& a,
                                             double tolerance, int max_iterations,
                                             const Vector* start) {
  const auto n = a.rows();
  EigenEstimate est;
  if (n == 0) return est;
  Vector x;
  if (start && start->size() == n && start->norm() > 0.0) {
    x = *start;
  } else {
    x.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(1.3 * double(i));
  }
  SolveOptions opt;
  opt.method = SolveMethod::cg;
  opt.tolerance = 1e-13;

  double previous = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector bx = b * x;
    opt.initial_guess = nullptr;
    Vector y = solve(a, bx, true, opt).solution;
    const double ny = std::sqrt(std::max(0.0, y.dot(a * y)));
    if (!(ny > 0.0)) {
      est.value = 0.0;
      est.vector = x;
      est.iterations = it;
      est.converged = true;
      return est;
    }
    x = y / ny;
    est.value = x.dot(b * x);  // x^T A x == 1
    est.iterations = it;
    if (previous >= 0.0 && std::abs(est.value - previous) <= tolerance * std::abs(est.value)) {
      est.converged = true;
      break;
    }
    previous = est.value;
  }
  est.vector = x;
  return est;
}

}  // namespace wlap
