#ifndef WLAP_LINEAR_SOLVER_HPP
#define WLAP_LINEAR_SOLVER_HPP

#include "wlap/discretization.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace wlap {

enum class SolveMethod { cg, bicgstab, direct };

const char* to_string(SolveMethod m);

struct SolveOptions {
  SolveMethod method = SolveMethod::cg;
  double tolerance = 1e-10;       // relative: ||b - Ax|| <= tol * (1 + ||b||)
  Eigen::Index max_iterations = -1;  // -1: 10 n
  bool jacobi = true;
  /// Recompute the A-norm of the error every 10 CG iterations and record it.
  bool track_energy = false;
  const Vector* initial_guess = nullptr;
};

struct SolveReport {
  Vector solution;
  Eigen::Index iterations = 0;
  double final_residual = 0.0;
  SolveMethod method = SolveMethod::cg;
  bool converged = false;
  /// Energy functional 1/2 x^T A x - b^T x sampled every 10 CG iterations
  /// when SolveOptions::track_energy is set; monotone for SPD systems.
  std::vector<double> energy_trace;
};

class MethodMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// BiCGSTAB breakdown (rho or omega vanished). Carries the best iterate so
/// the caller can fall back to the direct solver.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& what, SolveReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SolveReport& partial() const { return partial_; }

 private:
  SolveReport partial_;
};

/// Largest n accepted by the dense LU oracle.
inline constexpr Eigen::Index kDirectLimit = 5000;

SolveReport solve(const SparseSystem& system, const SolveOptions& options = {});

/// Solves A x = b for a bare matrix (used by eigenvalue iterations).
SolveReport solve(const SparseMatrix& a, const Vector& b, bool symmetric,
                  const SolveOptions& options);

/// ||b - A x||_2.
double residual(const SparseSystem& system, const Vector& x);

enum class SingularityKind { ok, constant_nullspace, ill_conditioned };

const char* to_string(SingularityKind k);

struct SingularityDiagnosis {
  SingularityKind kind = SingularityKind::ok;
  /// ||A 1|| / ||A||_F for the constant vector on the unknowns.
  double constant_residual = 0.0;
  /// Lower bound on the 2-norm condition number.
  double condition_estimate = 1.0;
  std::string evidence;
};

inline constexpr double kIllConditioned = 1e12;

/// Classifies the system as regular, singular with a constant nullspace, or
/// numerically ill-conditioned (condition estimate above 1e12).
SingularityDiagnosis detect_singularity(const SparseSystem& system);

/// Same, with notes on the data behind the verdict (weight support,
/// Dirichlet pixels).
SingularityDiagnosis detect_singularity(const SparseSystem& system, const DomainSpec& domain,
                                        const WeightField& weight);

/// Lower bound on cond_2(A): a power-iteration estimate of sigma_max over an
/// upper bound on sigma_min from a few steps of inverse iteration (sparse LU).
double condition_estimate(const SparseMatrix& a);

struct EigenEstimate {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of the symmetric-definite pencil B x = lambda A x
/// (A SPD, B symmetric positive semidefinite) by power iteration on A^-1 B
/// with CG solves. The estimate is the Rayleigh quotient x^T B x / x^T A x.
EigenEstimate largest_generalized_eigenvalue(const SparseMatrix& b, const SparseMatrix& a,
                                             double tolerance = 1e-12, int max_iterations = 5000,
                                             const Vector* start = nullptr);

}  // namespace wlap

#endif  // WLAP_LINEAR_SOLVER_HPP
