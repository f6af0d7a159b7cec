#ifndef WLAP_IO_HPP
#define WLAP_IO_HPP

#include "wlap/field.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlap {

enum class FormatErrorKind { malformed_header, truncated_data, maxval_unsupported, malformed_data };

const char* to_string(FormatErrorKind k);

/// Unreadable file contents. `offset()` is the byte offset of the problem.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, std::size_t offset, const std::string& path,
              const std::string& detail);
  FormatErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  FormatErrorKind kind_;
  std::size_t offset_;
};

/// PGM (P2 or P5, maxval 255 or 65535) samples are divided by maxval; CSV
/// values (one image row per line) are taken verbatim. The format follows the
/// extension: .pgm or .csv.
ScalarField read_field(const std::string& path, double spacing = 1.0);

/// Known pixels are those with a positive sample.
Mask read_mask(const std::string& path);

struct WriteOptions {
  bool sixteen_bit = false;  // PGM maxval 65535 instead of 255
};

/// PGM output is P5 with values clamped to [0, 1] and rounded; CSV output
/// keeps 17 significant digits so it reads back exactly.
void write_field(const ScalarField& field, const std::string& path, WriteOptions options = {});
void write_mask(const Mask& mask, const std::string& path);

/// Parsing entry points for in-memory buffers; `name` is used in messages.
ScalarField parse_pgm(const std::string& bytes, const std::string& name, double spacing = 1.0);
ScalarField parse_csv(const std::string& text, const std::string& name, double spacing = 1.0);

}  // namespace wlap

#endif  // WLAP_IO_HPP
