#ifndef WLAP_ANALYSIS_HPP
#define WLAP_ANALYSIS_HPP

#include "wlap/admissibility.hpp"
#include "wlap/discretization.hpp"
#include "wlap/linear_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wlap {

// ---------------------------------------------------------------------------
// Annulus model problem: -Lap u = 0 in B_1 \ B_eps, u = 0 on |x| = 1, u = 1 on
// |x| = eps, with exact solution ln(x^2 + y^2) / (2 ln eps).

/// Throws std::invalid_argument for eps outside (0, 1) or points outside the
/// closed annulus.
double annulus_exact(double epsilon, double x, double y);

/// Pixelated annulus on an n x n grid centred at the origin with spacing
/// 2 / (n - 5), so the unit circle stays two pixels inside the frame.
/// Known pixels: r <= eps plus the pixel nearest the origin (value 1), and
/// r >= 1 off the frame (value 0).
struct AnnulusProblem {
  double epsilon = 0.0;
  Eigen::Index resolution = 0;
  double center = 0.0;  // grid coordinate of the origin
  DomainSpec domain;
  ScalarField data;

  double x(Eigen::Index j) const { return (double(j) - center) * domain.spacing; }
  double y(Eigen::Index i) const { return (double(i) - center) * domain.spacing; }
};

AnnulusProblem build_annulus(double epsilon, Eigen::Index resolution);

struct AnnulusRow {
  Eigen::Index resolution = 0;
  double spacing = 0.0;
  double max_error = 0.0;  // over unknown pixels with eps + 2h < r < 1 - 2h
  Eigen::Index samples = 0;
  double exact_at_half = 0.0;     // exact value at radius 0.5
  double discrete_at_half = 0.0;  // discrete solution at (0.5, 0), linear along the axis
  Eigen::Index iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

AnnulusRow annulus_solve(double epsilon, Eigen::Index resolution, double tolerance = 1e-12);

/// One row per resolution. Resolutions must increase and be at least 33.
std::vector<AnnulusRow> annulus_convergence(double epsilon,
                                            const std::vector<Eigen::Index>& resolutions,
                                            double tolerance = 1e-12);

// ---------------------------------------------------------------------------
// alpha-capacity

enum class CapacityDomain { unit_disk, unit_square };

/// Minimizer of the discrete energy sum |grad u|^2 + alpha u^2 over the grid
/// [-1, 1]^2 (spacing 2 / (n - 1)) with u = 1 on E and u = 0 outside D.
struct CapacityResult {
  double value = 0.0;
  double alpha = 0.0;
  ScalarField minimizer;
  Eigen::Index resolution = 0;
  double minimizer_min = 0.0;
  double minimizer_max = 0.0;
  Eigen::Index iterations = 0;
};

CapacityResult alpha_capacity(const Mask& region, double alpha,
                              CapacityDomain domain = CapacityDomain::unit_disk,
                              double tolerance = 1e-12);

/// Pixels of an n x n grid over [-1, 1]^2 with radius <= rho.
Mask disk_region(Eigen::Index resolution, double rho);
/// The single pixel nearest the origin.
Mask center_pixel_region(Eigen::Index resolution);

// ---------------------------------------------------------------------------
// Friedrichs constant, coercivity and stability constants

struct FriedrichsResult {
  bool bounded = false;
  double kappa0 = 0.0;  // +infinity when unbounded
  int iterations = 0;
  /// Unknown pixels of a stiffness-free component (a nullspace of the
  /// seminorm on the discrete space) when unbounded.
  std::vector<Eigen::Index> null_component;
  std::string evidence;
};

/// Smallest kappa0 with ||u||^2 <= kappa0 |||u|||^2 on the discrete space
/// (u = 0 on known pixels), i.e. the largest eigenvalue of mass versus
/// weighted stiffness.
FriedrichsResult friedrichs_constant(const DomainSpec& domain, const WeightField& weight);

struct ConstantEstimates {
  double kappa = 0.0;
  double kappa_prime = 0.0;
  double kappa0 = 0.0;
  double stability_factor = 0.0;  // (1 + kappa0) / kappa_prime, +infinity if kappa_prime <= 0
  double f_norm_bound = 0.0;      // ||g|| + ||Lap f|| + ||grad f / sqrt(1 - c)||
  bool kappa0_bounded = false;
};

/// Three-term upper bound of the right-hand-side functional. +infinity when
/// 1 - c vanishes at an unknown pixel with a non-zero gradient of f.
double functional_bound(const DomainSpec& domain, const WeightField& weight, const ScalarField& f);

ConstantEstimates estimate_constants(const DomainSpec& domain, const WeightField& weight,
                                     const ScalarField* f = nullptr);

struct StabilityReport {
  ConstantEstimates constants;
  double v_norm = 0.0;     // ||u - f||_V of the weak solution
  double bound = 0.0;      // stability_factor * f_norm_bound
  double margin = 0.0;     // bound - v_norm
  bool holds = false;
  bool admissible = false;     // kappa finite and kappa_prime > 0
  bool hypothesis_ok = false;  // f_norm_bound finite
  Eigen::Index iterations = 0;
  double residual = 0.0;
};

StabilityReport stability_check(const DomainSpec& domain, const WeightField& weight,
                                const ScalarField& f);

// ---------------------------------------------------------------------------
// Mask sparsification

/// Mean squared error of the harmonic reconstruction from the masked pixels.
double reconstruction_mse(const ScalarField& image, const Mask& mask);

struct SparsifyResult {
  Mask mask;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  int accepted = 0;
  Eigen::Index known_pixels = 0;
};

/// Stochastic pixel exchange: start from a random mask of the requested
/// density (frame pixels are never selected), then per trial move a few mask
/// pixels to high-error positions and keep the move if the reconstruction
/// MSE drops. Deterministic for a fixed seed.
SparsifyResult sparsify_mask(const ScalarField& image, double density, std::uint64_t seed,
                             int trials);

/// Smooth gradients, an edge, and a textured patch; used by the demo.
ScalarField test_image(Eigen::Index size);

}  // namespace wlap

#endif  // WLAP_ANALYSIS_HPP
