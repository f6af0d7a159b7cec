#include "wlap/cli.hpp"

#include "wlap/analysis.hpp"
#include "wlap/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace wlap {
namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += num(xs[k]);
    else
      s += std::to_string(xs[k]);
  }
  return s;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) return;
  if (!std::filesystem::is_regular_file(path))
    throw UsageError{flag, std::string(flag) + ": no such file: " + path};
}

template <class Fn>
auto load(const char* flag, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw UsageError{flag, std::string(flag) + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw UsageError{flag, std::string(flag) + ": " + e.what()};
  }
}

ScalarField load_weight(const RunConfig& cfg) {
  auto c = load("--weight", [&] { return read_field(cfg.weight, cfg.spacing); });
  try {
    validate_weight_range(c);
  } catch (const std::invalid_argument& e) {
    throw UsageError{"--weight", std::string("--weight: ") + e.what()};
  }
  return c;
}

Mask load_mask(const RunConfig& cfg, Eigen::Index width, Eigen::Index height) {
  auto m = load("--mask", [&] { return read_mask(cfg.mask); });
  if (m.cols() != width || m.rows() != height)
    throw UsageError{"--mask", "--mask: size " + std::to_string(m.cols()) + "x" +
                                   std::to_string(m.rows()) + " does not match " +
                                   std::to_string(width) + "x" + std::to_string(height)};
  return m;
}

SolveReport solve_any(const SparseSystem& system, double tolerance) {
  SolveOptions opt;
  opt.tolerance = tolerance;
  opt.method = system.symmetric_hint ? SolveMethod::cg : SolveMethod::bicgstab;
  try {
    return solve(system, opt);
  } catch (const BreakdownError&) {
    if (system.n() > kDirectLimit) throw;
    opt.method = SolveMethod::direct;
    return solve(system, opt);
  }
}

int cmd_inpaint(const RunConfig& cfg, std::ostream& out) {
  const auto f = load("--image", [&] { return read_field(cfg.image, cfg.spacing); });
  ScalarField c;
  Mask known;
  if (!cfg.weight.empty()) {
    c = load_weight(cfg);
    if (!c.same_shape(f)) throw UsageError{"--weight", "--weight: size does not match --image"};
    known = c.values >= 1.0;
  } else {
    known = load_mask(cfg, f.width(), f.height());
    c = ScalarField(known.cast<double>(), cfg.spacing);
  }
  std::string form = cfg.form;
  if (form.empty()) form = cfg.weight.empty() ? "dirichlet" : "weak";

  ScalarField u;
  SolveReport rep;
  SparseSystem system;
  if (form == "collocation") {
    const auto domain = build_domain(Mask::Constant(f.height(), f.width(), false), cfg.spacing);
    system = assemble_collocation(domain, make_weight(c), f);
    rep = solve_any(system, cfg.tolerance);
    u = recover_from_collocation(domain, rep.solution);
  } else {
    const auto domain = build_domain(known, cfg.spacing);
    if (form == "dirichlet") {
      system = assemble_dirichlet(domain, f);
      rep = solve_any(system, cfg.tolerance);
      u = recover_from_dirichlet(domain, rep.solution, f);
    } else {
      system = assemble_weak(domain, make_weight(c, domain), f);
      rep = solve_any(system, cfg.tolerance);
      u = recover_from_weak(domain, rep.solution, f);
    }
  }
  write_field(u, cfg.out, {cfg.sixteen_bit});
  out << "command=inpaint\n"
      << "form=" << form << "\n"
      << "unknowns=" << system.n() << "\n"
      << "method=" << to_string(rep.method) << "\n"
      << "iterations=" << rep.iterations << "\n"
      << "residual=" << num(rep.final_residual) << "\n"
      << "converged=" << (rep.converged ? "true" : "false") << "\n"
      << "out=" << cfg.out << "\n";
  return rep.converged ? kExitOk : kExitFailed;
}

DomainSpec weight_domain(const RunConfig& cfg, const ScalarField& c) {
  const Mask known = cfg.mask.empty() ? Mask(c.values >= 1.0) : load_mask(cfg, c.width(), c.height());
  return load(cfg.mask.empty() ? "--weight" : "--mask", [&] { return build_domain(known, cfg.spacing); });
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const auto c = load_weight(cfg);
  const auto domain = weight_domain(cfg, c);
  const auto report = check_admissibility(make_weight(c, domain), domain, cfg.levels);
  out << "command=check\n"
      << "kappa_min=" << num(report.kappa_min) << "\n"
      << "growth_violations=" << report.growth_violations.size() << "\n"
      << "kappa_prime_max=" << num(report.kappa_prime_max) << "\n"
      << "A_k=" << join(report.a_sequence) << "\n"
      << "A_limit_estimate=" << num(report.a_limit_estimate) << "\n"
      << "A_monotone=" << (report.a_monotone ? "true" : "false") << "\n"
      << "unit_weight_pixels=" << report.unit_weight_pixels.size() << "\n"
      << "passed=" << (report.passed ? "true" : "false") << "\n";
  return report.passed ? kExitOk : kExitFailed;
}

int cmd_constants(const RunConfig& cfg, std::ostream& out) {
  const auto c = load_weight(cfg);
  const auto domain = weight_domain(cfg, c);
  const auto weight = make_weight(c, domain);
  std::optional<ScalarField> f;
  if (!cfg.image.empty()) {
    f = load("--image", [&] { return read_field(cfg.image, cfg.spacing); });
    if (!f->same_shape(c)) throw UsageError{"--image", "--image: size does not match --weight"};
  }
  out << "command=constants\n";
  auto print = [&](const ConstantEstimates& e) {
    out << "kappa=" << num(e.kappa) << "\n"
        << "kappa_prime=" << num(e.kappa_prime) << "\n"
        << "kappa0=" << num(e.kappa0) << "\n"
        << "kappa0_bounded=" << (e.kappa0_bounded ? "true" : "false") << "\n"
        << "stability_factor=" << num(e.stability_factor) << "\n";
    if (f) out << "f_norm_bound=" << num(e.f_norm_bound) << "\n";
  };
  if (!f) {
    const auto e = estimate_constants(domain, weight);
    print(e);
    if (!e.kappa0_bounded) out << "friedrichs=" << friedrichs_constant(domain, weight).evidence << "\n";
    return e.kappa0_bounded && e.kappa_prime > 0.0 ? kExitOk : kExitFailed;
  }
  const auto s = stability_check(domain, weight, *f);
  print(s.constants);
  out << "v_norm=" << num(s.v_norm) << "\n"
      << "bound=" << num(s.bound) << "\n"
      << "margin=" << num(s.margin) << "\n"
      << "admissible=" << (s.admissible ? "true" : "false") << "\n"
      << "hypothesis_ok=" << (s.hypothesis_ok ? "true" : "false") << "\n"
      << "holds=" << (s.holds ? "true" : "false") << "\n";
  return s.holds && s.constants.kappa0_bounded ? kExitOk : kExitFailed;
}

int cmd_capacity(const RunConfig& cfg, std::ostream& out) {
  Mask region;
  const auto& r = cfg.region;
  if (r == "center-pixel") {
    region = center_pixel_region(cfg.resolution);
  } else if (r.rfind("disk:", 0) == 0) {
    double rho = 0.0;
    try {
      std::size_t used = 0;
      rho = std::stod(r.substr(5), &used);
      if (used != r.size() - 5) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError{"--region", "--region: cannot parse radius in '" + r + "'"};
    }
    if (!(rho > 0.0 && rho < 1.0)) throw UsageError{"--region", "--region: radius must lie in (0, 1)"};
    region = disk_region(cfg.resolution, rho);
  } else {
    require_file(r, "--region");
    region = load("--region", [&] { return read_mask(r); });
  }
  const auto dom = cfg.capacity_domain == "square" ? CapacityDomain::unit_square : CapacityDomain::unit_disk;
  const auto res = load("--region", [&] { return alpha_capacity(region, cfg.alpha, dom, 1e-12); });
  out << "command=capacity\n"
      << "resolution=" << res.resolution << "\n"
      << "alpha=" << num(res.alpha) << "\n"
      << "capacity=" << num(res.value) << "\n"
      << "minimizer_min=" << num(res.minimizer_min) << "\n"
      << "minimizer_max=" << num(res.minimizer_max) << "\n"
      << "iterations=" << res.iterations << "\n";
  return kExitOk;
}

int cmd_annulus(const RunConfig& cfg, std::ostream& out) {
  std::vector<Eigen::Index> res(cfg.resolutions.begin(), cfg.resolutions.end());
  const auto rows = load("--resolutions", [&] { return annulus_convergence(cfg.epsilon, res); });
  out << "command=annulus\n"
      << "epsilon=" << num(cfg.epsilon) << "\n";
  bool ok = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    out << "resolution=" << row.resolution << " spacing=" << num(row.spacing)
        << " max_error=" << num(row.max_error) << " ratio="
        << (k ? num(rows[k - 1].max_error / row.max_error) : std::string("-"))
        << " exact_at_half=" << num(row.exact_at_half)
        << " discrete_at_half=" << num(row.discrete_at_half) << " iterations=" << row.iterations
        << " residual=" << num(row.residual) << "\n";
    ok = ok && row.converged;
  }
  return ok ? kExitOk : kExitFailed;
}

int cmd_sparsify(const RunConfig& cfg, std::ostream& out) {
  const auto image = cfg.image.empty()
                         ? test_image(cfg.test_image_size)
                         : load("--image", [&] { return read_field(cfg.image, cfg.spacing); });
  const auto r = load("--density", [&] { return sparsify_mask(image, cfg.density, cfg.seed, cfg.trials); });
  if (!cfg.out.empty()) write_mask(r.mask, cfg.out);
  out << "command=sparsify\n"
      << "known_pixels=" << r.known_pixels << "\n"
      << "density=" << num(double(r.known_pixels) / double(image.size())) << "\n"
      << "initial_mse=" << num(r.initial_mse) << "\n"
      << "final_mse=" << num(r.final_mse) << "\n"
      << "accepted=" << r.accepted << "\n";
  if (!cfg.out.empty()) out << "out=" << cfg.out << "\n";
  return kExitOk;
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Weighted-Laplacian inpainting and admissibility checks", "wlap"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", cfg.verbose, "Print diagnostics to stderr");

  auto* inpaint = app.add_subcommand("inpaint", "Reconstruct an image from known pixels");
  inpaint->add_option("--image", cfg.image, "Image with data on the known pixels (.pgm/.csv)")->required();
  auto* mask = inpaint->add_option("--mask", cfg.mask, "Known-pixel mask (sample > 0 is known)");
  auto* weight = inpaint->add_option("--weight", cfg.weight, "Weight c in [0,1]; c = 1 marks known pixels");
  mask->excludes(weight);
  weight->excludes(mask);
  inpaint->add_option("--out", cfg.out, "Output image (.pgm/.csv)")->required();
  inpaint->add_option("--form", cfg.form, "weak, collocation or dirichlet")
      ->check(CLI::IsMember({"weak", "collocation", "dirichlet"}));
  inpaint->add_option("--tolerance", cfg.tolerance, "Relative residual tolerance")->check(CLI::PositiveNumber);
  inpaint->add_option("--spacing", cfg.spacing, "Grid step h")->check(CLI::PositiveNumber);
  inpaint->add_flag("--sixteen-bit", cfg.sixteen_bit, "Write PGM with maxval 65535");

  auto* check = app.add_subcommand("check", "Admissibility checklist for a weight");
  check->add_option("--weight", cfg.weight, "Weight c in [0,1]")->required();
  check->add_option("--mask", cfg.mask, "Known pixels (default: c = 1)");
  check->add_option("--levels", cfg.levels, "Number of A_k terms")->check(CLI::Range(1, 30));
  check->add_option("--spacing", cfg.spacing, "Grid step h")->check(CLI::PositiveNumber);

  auto* constants = app.add_subcommand("constants", "Coercivity, Friedrichs and stability constants");
  constants->add_option("--weight", cfg.weight, "Weight c in [0,1]")->required();
  constants->add_option("--mask", cfg.mask, "Known pixels (default: c = 1)");
  constants->add_option("--image", cfg.image, "Data f; adds the stability check");
  constants->add_option("--spacing", cfg.spacing, "Grid step h")->check(CLI::PositiveNumber);

  auto* capacity = app.add_subcommand("capacity", "alpha-capacity of a region");
  capacity->add_option("--region", cfg.region, "Mask file, disk:RHO or center-pixel")->required();
  capacity->add_option("--alpha", cfg.alpha, "Mass weight alpha")->check(CLI::PositiveNumber);
  capacity->add_option("--resolution", cfg.resolution, "Grid size for built-in regions")
      ->check(CLI::Range(5L, 4097L));
  capacity->add_option("--domain", cfg.capacity_domain, "disk or square")
      ->check(CLI::IsMember({"disk", "square"}));

  auto* annulus = app.add_subcommand("annulus", "Convergence table for the annulus problem");
  annulus->add_option("--epsilon", cfg.epsilon, "Inner radius")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  annulus->add_option("--resolutions", cfg.resolutions, "Comma-separated grid sizes")->delimiter(',');

  auto* sparsify = app.add_subcommand("sparsify", "Optimise a sparse inpainting mask");
  auto* img = sparsify->add_option("--image", cfg.image, "Image (.pgm/.csv)");
  sparsify->add_option("--test-image", cfg.test_image_size, "Size of the built-in test image")
      ->check(CLI::Range(8L, 4096L))
      ->excludes(img);
  sparsify->add_option("--density", cfg.density, "Fraction of known pixels")->check(CLI::Range(1e-9, 1.0));
  sparsify->add_option("--seed", cfg.seed, "Random seed");
  sparsify->add_option("--trials", cfg.trials, "Exchange trials")->check(CLI::NonNegativeNumber);
  sparsify->add_option("--out", cfg.out, "Write the mask (.pgm/.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError{"", e.what()};
  }

  const std::pair<CLI::App*, Command> commands[] = {
      {inpaint, Command::inpaint},   {check, Command::check},     {constants, Command::constants},
      {capacity, Command::capacity}, {annulus, Command::annulus}, {sparsify, Command::sparsify}};
  for (const auto& [sub, command] : commands)
    if (sub->parsed()) cfg.command = command;

  if (cfg.command == Command::inpaint && cfg.mask.empty() && cfg.weight.empty())
    throw UsageError{"--mask", "inpaint: one of --mask or --weight is required"};
  if (cfg.command == Command::inpaint && cfg.form == "dirichlet" && cfg.mask.empty() && cfg.weight.empty())
    throw UsageError{"--mask", "--form dirichlet needs --mask or --weight"};
  require_file(cfg.image, "--image");
  require_file(cfg.mask, "--mask");
  require_file(cfg.weight, "--weight");
  return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::inpaint: return cmd_inpaint(config, out);
      case Command::check: return cmd_check(config, out);
      case Command::constants: return cmd_constants(config, out);
      case Command::capacity: return cmd_capacity(config, out);
      case Command::annulus: return cmd_annulus(config, out);
      case Command::sparsify: return cmd_sparsify(config, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(argc, argv, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return kExitUsage;
  }
  if (!cfg) return kExitOk;
  return run(*cfg, out, err);
}

}  // namespace wlap
