#include "oracles.hpp"
#include "wlap/cli.hpp"
#include "wlap/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace wlap;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wlap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> keys(const std::string& text) {
  std::map<std::string, std::string> m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.find(' ') == std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("wlap_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("check on a constant weight passes") {
  TempDir tmp;
  write_field(ScalarField(Eigen::ArrayXXd::Constant(33, 33, 0.5), 1.0), tmp / "c.csv");
  const auto r = cli({"check", "--weight", tmp / "c.csv"});
  CHECK(r.code == kExitOk);
  const auto k = keys(r.out);
  CHECK(k.at("command") == "check");
  CHECK(k.at("kappa_min") == "0");
  CHECK(k.at("kappa_prime_max") == "1");
  CHECK(k.at("growth_violations") == "0");
  CHECK(k.at("passed") == "true");
}

TEST_CASE("check fails on a ramp and reports violations") {
  TempDir tmp;
  const auto c = ScalarField::sample(33, 33, 1.0 / 32, [](double x, double) { return 0.9 * x; });
  write_field(c, tmp / "ramp.csv");
  const auto r = cli({"check", "--weight", tmp / "ramp.csv", "--spacing", std::to_string(1.0 / 32)});
  CHECK(r.code == kExitFailed);
  const auto k = keys(r.out);
  CHECK(k.at("kappa_min") == "inf");
  CHECK(std::stoi(k.at("growth_violations")) > 0);
  CHECK(k.at("passed") == "false");
}

TEST_CASE("annulus table prints the exact value at radius one half") {
  const auto r = cli({"annulus", "--epsilon", "0.1", "--resolutions", "65,129"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("epsilon=0.1\n") != std::string::npos);
  CHECK(r.out.find("resolution=65 ") != std::string::npos);
  CHECK(r.out.find("resolution=129 ") != std::string::npos);
  CHECK(r.out.find("exact_at_half=0.3010299957") != std::string::npos);
}

TEST_CASE("binary weight inpaint agrees with the dirichlet form") {
  TempDir tmp;
  oracle::Gen gen(41);
  const auto f = gen.field(24, 20, 1.0);
  const auto known = gen.interior_mask(24, 20, 0.15);
  const ScalarField c(known.cast<double>(), 1.0);
  write_field(f, tmp / "f.csv");
  write_field(c, tmp / "c.csv");
  write_mask(known, tmp / "m.csv");

  const auto weak = cli({"inpaint", "--image", tmp / "f.csv", "--weight", tmp / "c.csv", "--out",
                         tmp / "weak.csv", "--tolerance", "1e-13"});
  REQUIRE(weak.code == kExitOk);
  CHECK(keys(weak.out).at("form") == "weak");
  const auto dir = cli({"inpaint", "--image", tmp / "f.csv", "--mask", tmp / "m.csv", "--out",
                        tmp / "dir.csv", "--tolerance", "1e-13"});
  REQUIRE(dir.code == kExitOk);
  CHECK(keys(dir.out).at("form") == "dirichlet");

  const auto a = read_field(tmp / "weak.csv"), b = read_field(tmp / "dir.csv");
  CHECK((a.values - b.values).abs().maxCoeff() < 1e-8);
  // Known pixels keep their data exactly.
  for (Eigen::Index k = 0; k < f.size(); ++k)
    if (known.data()[k]) CHECK(b[k] == f[k]);
}

TEST_CASE("collocation form with a soft weight") {
  TempDir tmp;
  const auto f = ScalarField::sample(17, 17, 1.0, [](double x, double y) { return 0.01 * (x + y); });
  ScalarField c(Eigen::ArrayXXd::Constant(17, 17, 0.3), 1.0);
  write_field(f, tmp / "f.csv");
  write_field(c, tmp / "c.csv");
  const auto r = cli({"inpaint", "--image", tmp / "f.csv", "--weight", tmp / "c.csv", "--form", "collocation",
                      "--out", tmp / "u.pgm", "--sixteen-bit"});
  CHECK(r.code == kExitOk);
  CHECK(keys(r.out).at("unknowns") == "289");
  CHECK(fs::exists(tmp / "u.pgm"));
}

TEST_CASE("usage errors exit with 2 and name the flag") {
  TempDir tmp;
  SUBCASE("missing file") {
    const auto r = cli({"check", "--weight", tmp / "nope.csv"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--weight") != std::string::npos);
  }
  SUBCASE("unknown subcommand") { CHECK(cli({"frobnicate"}).code == kExitUsage); }
  SUBCASE("no subcommand") { CHECK(cli({}).code == kExitUsage); }
  SUBCASE("inpaint without mask or weight") {
    write_field(ScalarField(Eigen::ArrayXXd::Zero(5, 5), 1.0), tmp / "f.csv");
    const auto r = cli({"inpaint", "--image", tmp / "f.csv", "--out", tmp / "u.csv"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--mask") != std::string::npos);
  }
  SUBCASE("mask and weight together") {
    write_field(ScalarField(Eigen::ArrayXXd::Zero(5, 5), 1.0), tmp / "f.csv");
    CHECK(cli({"inpaint", "--image", tmp / "f.csv", "--mask", tmp / "f.csv", "--weight", tmp / "f.csv",
               "--out", tmp / "u.csv"})
              .code == kExitUsage);
  }
  SUBCASE("weight out of range") {
    write_field(ScalarField(Eigen::ArrayXXd::Constant(5, 5, 1.5), 1.0), tmp / "c.csv");
    const auto r = cli({"check", "--weight", tmp / "c.csv"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--weight") != std::string::npos);
  }
  SUBCASE("malformed pgm names the flag and the offset") {
    std::ofstream(tmp / "bad.pgm", std::ios::binary) << "P5\n2 2\n1023\n";
    const auto r = cli({"check", "--weight", tmp / "bad.pgm"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--weight") != std::string::npos);
    CHECK(r.err.find("maxval-unsupported") != std::string::npos);
  }
  SUBCASE("bad form") {
    write_field(ScalarField(Eigen::ArrayXXd::Zero(5, 5), 1.0), tmp / "f.csv");
    CHECK(cli({"inpaint", "--image", tmp / "f.csv", "--mask", tmp / "f.csv", "--form", "spectral", "--out",
               tmp / "u.csv"})
              .code == kExitUsage);
  }
  SUBCASE("bad capacity region") {
    const auto r = cli({"capacity", "--region", "disk:abc"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--region") != std::string::npos);
  }
  SUBCASE("mask size mismatch") {
    write_field(ScalarField(Eigen::ArrayXXd::Zero(5, 5), 1.0), tmp / "f.csv");
    write_field(ScalarField(Eigen::ArrayXXd::Zero(6, 6), 1.0), tmp / "m.csv");
    const auto r = cli({"inpaint", "--image", tmp / "f.csv", "--mask", tmp / "m.csv", "--out", tmp / "u.csv"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--mask") != std::string::npos);
  }
}

TEST_CASE("weight equal to 1 on the frame is a usage error") {
  TempDir tmp;
  const auto c = ScalarField::sample(9, 9, 0.125, [](double x, double) { return x; });
  write_field(c, tmp / "c.csv");
  const auto r = cli({"check", "--weight", tmp / "c.csv", "--spacing", "0.125"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--weight") != std::string::npos);
  CHECK(r.err.find("frame") != std::string::npos);
}

TEST_CASE("help exits 0") {
  const auto r = cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("inpaint") != std::string::npos);
}

TEST_CASE("constants reports an unbounded Friedrichs constant with exit 1") {
  TempDir tmp;
  write_field(ScalarField(Eigen::ArrayXXd::Constant(9, 9, 0.5), 1.0), tmp / "c.csv");
  const auto r = cli({"constants", "--weight", tmp / "c.csv"});
  CHECK(r.code == kExitFailed);
  const auto k = keys(r.out);
  CHECK(k.at("kappa0") == "inf");
  CHECK(k.at("kappa0_bounded") == "false");
  CHECK(r.out.find("friedrichs=") != std::string::npos);
}

TEST_CASE("constants with an image runs the stability check") {
  TempDir tmp;
  const auto c = ScalarField::sample(17, 17, 1.0 / 16, [](double x, double y) {
    return 0.5 + 0.2 * std::sin(3 * x) * std::sin(2 * y);
  });
  Mask known = Mask::Constant(17, 17, false);
  for (Eigen::Index i = 2; i < 16; i += 4)
    for (Eigen::Index j = 2; j < 16; j += 4) known(i, j) = true;
  ScalarField cw = c;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (known.data()[k]) cw[k] = 1.0;
  const auto f = ScalarField::sample(17, 17, 1.0 / 16, [](double x, double y) { return x * y; });
  write_field(cw, tmp / "c.csv");
  write_field(f, tmp / "f.csv");
  const auto r = cli({"constants", "--weight", tmp / "c.csv", "--image", tmp / "f.csv", "--spacing",
                      std::to_string(1.0 / 16)});
  const auto k = keys(r.out);
  CHECK(k.at("kappa0_bounded") == "true");
  CHECK(k.count("v_norm") == 1);
  CHECK(k.count("margin") == 1);
  if (k.at("admissible") == "true" && k.at("hypothesis_ok") == "true") CHECK(k.at("holds") == "true");
}

TEST_CASE("capacity built-in regions") {
  const auto disk = cli({"capacity", "--region", "disk:0.3", "--resolution", "33"});
  CHECK(disk.code == kExitOk);
  const auto pixel = cli({"capacity", "--region", "center-pixel", "--resolution", "33"});
  CHECK(pixel.code == kExitOk);
  const double cd = std::stod(keys(disk.out).at("capacity"));
  const double cp = std::stod(keys(pixel.out).at("capacity"));
  CHECK(cd > cp);
  CHECK(cp > 0.0);
  const auto square = cli({"capacity", "--region", "disk:0.3", "--resolution", "33", "--domain", "square"});
  CHECK(std::stod(keys(square.out).at("capacity")) <= cd);
}

TEST_CASE("sparsify is reproducible for a fixed seed") {
  TempDir tmp;
  const std::vector<std::string> args{"sparsify", "--test-image", "32", "--density", "0.08",
                                      "--seed", "7", "--trials", "10"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", tmp / "a.pgm"});
  b.insert(b.end(), {"--out", tmp / "b.pgm"});
  const auto ra = cli(a), rb = cli(b);
  CHECK(ra.code == kExitOk);
  auto ka = keys(ra.out), kb = keys(rb.out);
  ka.erase("out");
  kb.erase("out");
  CHECK(ka == kb);
  CHECK((read_mask(tmp / "a.pgm") == read_mask(tmp / "b.pgm")).all());
  CHECK(std::stod(ka.at("final_mse")) <= std::stod(ka.at("initial_mse")));
}

TEST_CASE("inpaint output is idempotent") {
  TempDir tmp;
  oracle::Gen gen(3);
  const auto f = gen.field(16, 16, 1.0);
  write_field(f, tmp / "f.pgm");
  write_mask(gen.interior_mask(16, 16, 0.2), tmp / "m.pgm");
  const std::vector<std::string> base{"inpaint", "--image", tmp / "f.pgm", "--mask", tmp / "m.pgm", "--out"};
  auto a = base, b = base;
  a.push_back(tmp / "u1.pgm");
  b.push_back(tmp / "u2.pgm");
  REQUIRE(cli(a).code == kExitOk);
  REQUIRE(cli(b).code == kExitOk);
  std::ifstream ia(tmp / "u1.pgm", std::ios::binary), ib(tmp / "u2.pgm", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(ia)), {}), sb((std::istreambuf_iterator<char>(ib)), {});
  CHECK(sa == sb);
}

#ifdef WLAP_CLI_PATH
TEST_CASE("installed binary maps exit codes") {
  const std::string exe = WLAP_CLI_PATH;
  CHECK(std::system((exe + " --help > /dev/null").c_str()) == 0);
  const int bad = std::system((exe + " check --weight /nonexistent.csv 2> /dev/null").c_str());
  REQUIRE(WIFEXITED(bad));
  CHECK(WEXITSTATUS(bad) == kExitUsage);
}
#endif
