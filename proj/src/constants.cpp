#include "wlap/analysis.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace wlap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unknown pixels of the first connected component (through faces with a
// positive diffusion coefficient) that has no such face to a known pixel.
std::vector<Eigen::Index> first_unanchored_component(const DomainSpec& d, const ScalarField& c) {
  std::vector<char> seen(static_cast<std::size_t>(d.pixel_count()), 0);
  for (const auto start : d.unknown_pixels) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<Eigen::Index> component;
    bool anchored = false;
    std::deque<Eigen::Index> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
      const auto p = queue.front();
      queue.pop_front();
      component.push_back(p);
      d.for_each_neighbor(p, [&](Eigen::Index q) {
        if (face_coefficient(d, c, p, q) <= 0.0) return;
        if (d.is_known(q)) {
          anchored = true;
        } else if (!seen[static_cast<std::size_t>(q)]) {
          seen[static_cast<std::size_t>(q)] = 1;
          queue.push_back(q);
        }
      });
    }
    if (!anchored) return component;
  }
  return {};
}

}  // namespace

FriedrichsResult friedrichs_constant(const DomainSpec& domain, const WeightField& weight) {
  if (weight.c.width() != domain.width || weight.c.height() != domain.height)
    throw std::invalid_argument("friedrichs_constant: weight does not match domain grid");
  FriedrichsResult out;
  if (domain.unknown_count() == 0) {
    out.bounded = true;
    out.evidence = "no unknown pixels";
    return out;
  }
  out.null_component = first_unanchored_component(domain, weight.c);
  if (!out.null_component.empty()) {
    out.kappa0 = kInf;
    out.evidence = "seminorm vanishes on the indicator of " +
                   std::to_string(out.null_component.size()) +
                   " unknown pixel(s) not coupled to any known pixel through 1 - c > 0";
    return out;
  }
  const SparseMatrix stiffness = weighted_stiffness(domain, weight.c);
  const SparseMatrix mass = lumped_mass(domain);
  const auto eig = largest_generalized_eigenvalue(mass, stiffness, 1e-13, 20000);
  out.bounded = true;
  out.kappa0 = eig.value;
  out.iterations = eig.iterations;
  out.evidence = eig.converged ? "power iteration converged" : "power iteration hit iteration cap";
  return out;
}

double functional_bound(const DomainSpec& domain, const WeightField& weight, const ScalarField& f) {
  if (f.width() != domain.width || f.height() != domain.height)
    throw std::invalid_argument("functional_bound: image does not match domain grid");
  const auto data = weak_data(weight, f);
  const auto [fx, fy] = compute_gradient(f);
  double g2 = 0.0, lap2 = 0.0, grad2 = 0.0;
  for (const auto p : domain.unknown_pixels) {
    const double w = domain.cell_area(p);
    g2 += w * data.g[p] * data.g[p];
    lap2 += w * data.laplacian_f[p] * data.laplacian_f[p];
    const double gf2 = fx[p] * fx[p] + fy[p] * fy[p];
    const double diffusion = 1.0 - weight.c[p];
    if (diffusion <= 0.0) {
      if (gf2 > 0.0) return kInf;
    } else {
      grad2 += w * gf2 / diffusion;
    }
  }
  return std::sqrt(g2) + std::sqrt(lap2) + std::sqrt(grad2);
}

ConstantEstimates estimate_constants(const DomainSpec& domain, const WeightField& weight,
                                     const ScalarField* f) {
  ConstantEstimates e;
  e.kappa = growth_kappa(weight, domain).kappa_min;
  e.kappa_prime = quadratic_kappa_prime(weight, domain);
  const auto fr = friedrichs_constant(domain, weight);
  e.kappa0 = fr.kappa0;
  e.kappa0_bounded = fr.bounded;
  e.stability_factor = (e.kappa_prime > 0.0 && fr.bounded) ? (1.0 + e.kappa0) / e.kappa_prime : kInf;
  e.f_norm_bound = f ? functional_bound(domain, weight, *f) : 0.0;
  return e;
}

StabilityReport stability_check(const DomainSpec& domain, const WeightField& weight,
                                const ScalarField& f) {
  StabilityReport r;
  r.constants = estimate_constants(domain, weight, &f);
  r.admissible = std::isfinite(r.constants.kappa) && r.constants.kappa_prime > 0.0;
  r.hypothesis_ok = std::isfinite(r.constants.f_norm_bound);

  const auto system = assemble_weak(domain, weight, f);
  SolveOptions opt;
  opt.method = system.symmetric_hint ? SolveMethod::cg : SolveMethod::bicgstab;
  opt.tolerance = 1e-12;
  const auto rep = solve(system, opt);
  r.iterations = rep.iterations;
  r.residual = rep.final_residual;

  const auto v = expand_unknowns(domain, rep.solution);
  r.v_norm = v_norm(v, weight, domain);
  const double factor = r.constants.stability_factor;
  r.bound = (r.constants.f_norm_bound == 0.0) ? 0.0 : factor * r.constants.f_norm_bound;
  r.margin = r.bound - r.v_norm;
  r.holds = r.v_norm <= r.bound;
  return r;
}

}  // namespace wlap
