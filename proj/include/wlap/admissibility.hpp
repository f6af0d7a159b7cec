#ifndef WLAP_ADMISSIBILITY_HPP
#define WLAP_ADMISSIBILITY_HPP

#include "wlap/grid_domain.hpp"
#include "wlap/weight.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace wlap {

/// c (1 - c) at or below this counts as degenerate.
inline constexpr double kDegenerateTolerance = 1e-12;

/// A gradient counts as vanishing below kGradientTolerance / spacing.
inline constexpr double kGradientTolerance = 1e-8;

struct GrowthViolation {
  Eigen::Index pixel;
  double ratio;  // +infinity for a non-vanishing gradient where c(1 - c) == 0
};

struct GrowthResult {
  double kappa_min = 0.0;  // +infinity when the growth bound fails somewhere
  std::vector<GrowthViolation> violations;
};

/// Smallest kappa with |d_x c|, |d_y c| <= kappa sqrt(c (1 - c)) on the unknown pixels.
GrowthResult growth_kappa(const WeightField& weight, const DomainSpec& domain);

/// Largest t such that M - t D is positive semidefinite at one pixel, where
/// M is the ternary quadratic form in (u, d_y u, d_x u) and D its diagonal.
/// Degenerate pixels (c (1 - c) <= kDegenerateTolerance) give 1 when the
/// gradient vanishes and 0 otherwise.
double pixel_kappa_prime(double c, double grad_x, double grad_y, CrossSign sign, double spacing);

/// min over unknown pixels of pixel_kappa_prime, for the given sign convention.
double quadratic_kappa_prime(const CoefficientField& coeffs, const DomainSpec& domain);

/// Worse (smaller) of the two cross-coefficient sign conventions.
double quadratic_kappa_prime(const WeightField& weight, const DomainSpec& domain);

/// Weighted inner product: integral over the unknown region of
/// (1 - c) grad u . grad v + u v, with face-centred gradients over faces
/// touching an unknown pixel and lumped mass on the unknown pixels.
double v_inner(const ScalarField& u, const ScalarField& v, const WeightField& weight,
               const DomainSpec& domain);
double v_norm(const ScalarField& u, const WeightField& weight, const DomainSpec& domain);
/// Square root of the gradient part of v_inner(u, u).
double v_seminorm(const ScalarField& u, const WeightField& weight, const DomainSpec& domain);
/// Discrete L2 norm over the unknown pixels.
double l2_norm_unknown(const ScalarField& u, const DomainSpec& domain);

class ExhaustionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph distance (4-neighbour steps through unknown pixels) from each
/// unknown pixel to the boundary of the unknown region: pixels next to a
/// known pixel or on the frame are at distance 1. Known pixels get 0.
std::vector<Eigen::Index> boundary_distance(const DomainSpec& domain);

struct NonCompactnessEstimate {
  std::vector<double> a_sequence;
  std::vector<Eigen::Index> shell_width;  // d_k
  double a_limit_estimate = 0.0;
  bool monotone = true;  // non-increasing within 1e-9
};

/// A_k = sup ||u||_{L2(shell_k)} / ||u||_V over the discrete space, where
/// shell_k holds the unknown pixels within distance d_k of the boundary and
/// d_k halves per level starting from the largest distance.
NonCompactnessEstimate estimate_A(const DomainSpec& domain, const WeightField& weight,
                                  int levels);

/// Checklist of the existence conditions for a concrete weight.
struct AdmissibilityReport {
  double kappa_min = 0.0;
  double kappa_prime_max = 0.0;
  std::vector<GrowthViolation> growth_violations;
  std::vector<double> a_sequence;
  double a_limit_estimate = 0.0;
  bool a_monotone = true;
  std::vector<Eigen::Index> unit_weight_pixels;
  bool passed = false;
};

AdmissibilityReport check_admissibility(const WeightField& weight, const DomainSpec& domain,
                                        int levels = 4);

}  // namespace wlap

#endif  // WLAP_ADMISSIBILITY_HPP
