#include "wlap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wlap {
namespace {

struct Reconstruction {
  ScalarField u;
  double mse = 0.0;
};

Reconstruction reconstruct(const ScalarField& image, const Mask& mask, const ScalarField* guess) {
  Reconstruction r;
  if (mask.all()) {
    r.u = image;
    return r;
  }
  const auto domain = build_domain(mask, image.spacing);
  const auto system = assemble_dirichlet(domain, image);
  SolveOptions opt;
  opt.tolerance = 1e-10;
  Vector x0;
  if (guess) {
    x0 = gather_unknowns(domain, *guess);
    opt.initial_guess = &x0;
  }
  const auto rep = solve(system, opt);
  r.u = recover_from_dirichlet(domain, rep.solution, image);
  r.mse = (r.u.values - image.values).square().mean();
  return r;
}

}  // namespace

double reconstruction_mse(const ScalarField& image, const Mask& mask) {
  if (mask.rows() != image.height() || mask.cols() != image.width())
    throw std::invalid_argument("reconstruction_mse: mask does not match image");
  return reconstruct(image, mask, nullptr).mse;
}

SparsifyResult sparsify_mask(const ScalarField& image, double density, std::uint64_t seed,
                             int trials) {
  const auto w = image.width(), ht = image.height();
  const auto total = w * ht;
  if (!(density * double(total) >= 1.0))
    throw std::invalid_argument("sparsify_mask: density * pixels must be at least 1");
  if (trials < 0) throw std::invalid_argument("sparsify_mask: trials must be non-negative");

  SparsifyResult out;
  if (density >= 1.0) {
    out.mask = Mask::Constant(ht, w, true);
    out.known_pixels = total;
    return out;
  }

  // Frame pixels stay unknown: known data on the outer boundary is not allowed.
  std::vector<Eigen::Index> interior;
  for (Eigen::Index i = 1; i + 1 < ht; ++i)
    for (Eigen::Index j = 1; j + 1 < w; ++j) interior.push_back(i * w + j);
  const auto k = std::clamp<Eigen::Index>(std::llround(density * double(total)), 1,
                                          Eigen::Index(interior.size()) - 1);

  std::mt19937_64 rng(seed);
  std::shuffle(interior.begin(), interior.end(), rng);
  // interior[0, k) is the mask, interior[k, end) the pool.
  Mask mask = Mask::Constant(ht, w, false);
  for (Eigen::Index s = 0; s < k; ++s) mask(interior[s] / w, interior[s] % w) = true;

  auto best = reconstruct(image, mask, nullptr);
  out.initial_mse = best.mse;

  const Eigen::Index moves = std::max<Eigen::Index>(1, std::llround(0.02 * double(k)));
  const auto pool = Eigen::Index(interior.size()) - k;
  for (int t = 0; t < trials; ++t) {
    std::vector<Eigen::Index> drop, add;
    std::uniform_int_distribution<Eigen::Index> pick_mask(0, k - 1), pick_pool(k, k + pool - 1);
    while (Eigen::Index(drop.size()) < moves) {
      const auto s = pick_mask(rng);
      if (std::find(drop.begin(), drop.end(), s) == drop.end()) drop.push_back(s);
    }
    // Of a few random pool pixels, take those with the largest error.
    std::vector<Eigen::Index> sample;
    for (Eigen::Index s = 0; s < std::min(4 * moves, pool); ++s) {
      const auto c = pick_pool(rng);
      if (std::find(sample.begin(), sample.end(), c) == sample.end()) sample.push_back(c);
    }
    auto error = [&](Eigen::Index s) { return std::abs(best.u[interior[s]] - image[interior[s]]); };
    std::stable_sort(sample.begin(), sample.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return error(a) > error(b); });
    const auto count = std::min<Eigen::Index>(moves, Eigen::Index(sample.size()));
    add.assign(sample.begin(), sample.begin() + count);
    drop.resize(static_cast<std::size_t>(count));

    Mask trial = mask;
    for (const auto s : drop) trial(interior[s] / w, interior[s] % w) = false;
    for (const auto s : add) trial(interior[s] / w, interior[s] % w) = true;
    auto candidate = reconstruct(image, trial, &best.u);
    if (candidate.mse < best.mse) {
      for (std::size_t m = 0; m < drop.size(); ++m) std::swap(interior[drop[m]], interior[add[m]]);
      mask = std::move(trial);
      best = std::move(candidate);
      ++out.accepted;
    }
  }
  out.mask = std::move(mask);
  out.final_mse = best.mse;
  out.known_pixels = k;
  return out;
}

ScalarField test_image(Eigen::Index size) {
  if (size < 8) throw std::invalid_argument("test_image: size must be at least 8");
  const double h = 1.0 / double(size - 1);
  constexpr double pi = std::numbers::pi;
  return ScalarField::sample(size, size, h, [](double x, double y) {
    double v = 0.25 + 0.35 * x + 0.15 * std::sin(pi * y);
    if (std::hypot(x - 0.65, y - 0.35) < 0.2) v += 0.3;
    if (x < 0.45 && y > 0.55) v += 0.12 * std::sin(10 * pi * x) * std::sin(10 * pi * y);
    return std::clamp(v, 0.0, 1.0);
  });
}

}  // namespace wlap
