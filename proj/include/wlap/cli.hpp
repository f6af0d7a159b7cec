#ifndef WLAP_CLI_HPP
#define WLAP_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlap {

enum class Command { inpaint, check, constants, capacity, annulus, sparsify };

struct RunConfig {
  Command command = Command::check;

  std::string image;
  std::string mask;
  std::string weight;
  std::string out;
  std::string form;    // inpaint: weak | collocation | dirichlet; empty picks from the inputs
  std::string region;  // capacity: mask file, disk:RHO or center-pixel
  std::string capacity_domain = "disk";

  double spacing = 1.0;
  double tolerance = 1e-10;
  double epsilon = 0.25;
  double alpha = 1e-6;
  double density = 0.05;
  long resolution = 257;
  std::vector<long> resolutions{65, 129, 257};
  std::uint64_t seed = 1;
  int trials = 50;
  int levels = 4;
  long test_image_size = 64;
  bool sixteen_bit = false;
  bool verbose = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Thrown for invalid flags or inputs; the message names the flag.
struct UsageError {
  std::string flag;
  std::string message;
};

/// Parses the command line. Throws UsageError. `--help` output goes to `out`
/// and yields std::nullopt.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Runs the command and writes key=value lines to `out`, diagnostics to
/// `err`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wlap

#endif  // WLAP_CLI_HPP
