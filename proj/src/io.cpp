#include "wlap/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace wlap {
namespace {

enum class Format { pgm, csv };

Format format_of(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == "pgm") return Format::pgm;
  if (ext == "csv") return Format::csv;
  throw std::invalid_argument(path + ": unknown extension (expected .pgm or .csv)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

class PgmHeader {
 public:
  PgmHeader(const std::string& bytes, const std::string& name) : b_(bytes), name_(name) {}

  // Skips whitespace and comments, then reads an unsigned decimal.
  long next_int(const char* what) {
    skip();
    const auto start = pos_;
    last_start_ = start;
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000'000) fail("header value too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= b_.size())
        throw FormatError(FormatErrorKind::malformed_header, pos_, name_,
                          std::string("end of file while reading ") + what);
      fail(std::string("expected ") + what, pos_);
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  std::size_t last_start() const { return last_start_; }
  void advance(std::size_t n) { pos_ += n; }

  [[noreturn]] void fail(const std::string& detail, std::size_t at) const {
    throw FormatError(FormatErrorKind::malformed_header, at, name_, detail);
  }

 private:
  void skip() {
    while (pos_ < b_.size()) {
      const unsigned char ch = b_[pos_];
      if (ch == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& b_;
  const std::string& name_;
  std::size_t pos_ = 2;
  std::size_t last_start_ = 2;
};

std::string format_csv_value(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

const char* to_string(FormatErrorKind k) {
  switch (k) {
    case FormatErrorKind::malformed_header: return "malformed-header";
    case FormatErrorKind::truncated_data: return "truncated-data";
    case FormatErrorKind::maxval_unsupported: return "maxval-unsupported";
    case FormatErrorKind::malformed_data: return "malformed-data";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::size_t offset, const std::string& path,
                         const std::string& detail)
    : std::runtime_error(path + ": " + to_string(kind) + " at byte offset " + std::to_string(offset) +
                         ": " + detail),
      kind_(kind),
      offset_(offset) {}

ScalarField parse_pgm(const std::string& bytes, const std::string& name, double spacing) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw FormatError(FormatErrorKind::malformed_header, 0, name, "expected magic P2 or P5");
  const bool binary = bytes[1] == '5';
  PgmHeader hdr(bytes, name);
  const auto width = hdr.next_int("width");
  const auto height = hdr.next_int("height");
  const auto maxval = hdr.next_int("maxval");
  const auto maxval_at = hdr.last_start();
  if (width < 1 || height < 1) hdr.fail("width and height must be positive", maxval_at);
  if (maxval != 255 && maxval != 65535)
    throw FormatError(FormatErrorKind::maxval_unsupported, maxval_at, name,
                      "maxval " + std::to_string(maxval) + " (supported: 255, 65535)");

  ScalarField f(width, height, spacing);
  const auto count = static_cast<std::size_t>(width * height);
  const double scale = 1.0 / double(maxval);
  if (binary) {
    if (hdr.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[hdr.pos()])))
      hdr.fail("expected a single whitespace byte before the raster", hdr.pos());
    hdr.advance(1);
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const auto start = hdr.pos();
    if (bytes.size() - start < count * sample_bytes)
      throw FormatError(FormatErrorKind::truncated_data, bytes.size(), name,
                        "raster needs " + std::to_string(count * sample_bytes) + " bytes, found " +
                            std::to_string(bytes.size() - start));
    for (std::size_t k = 0; k < count; ++k) {
      const auto at = start + k * sample_bytes;
      unsigned v = static_cast<unsigned char>(bytes[at]);
      if (sample_bytes == 2) v = (v << 8) | static_cast<unsigned char>(bytes[at + 1]);
      if (v > unsigned(maxval))
        throw FormatError(FormatErrorKind::malformed_data, at, name, "sample exceeds maxval");
      f[Eigen::Index(k)] = double(v) * scale;
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      long v;
      try {
        v = hdr.next_int("sample");
      } catch (const FormatError& e) {
        if (e.offset() >= bytes.size())
          throw FormatError(FormatErrorKind::truncated_data, bytes.size(), name,
                            "expected " + std::to_string(count) + " samples, found " +
                                std::to_string(k));
        throw FormatError(FormatErrorKind::malformed_data, e.offset(), name, "expected a sample");
      }
      if (v > maxval)
        throw FormatError(FormatErrorKind::malformed_data, hdr.last_start(), name,
                          "sample exceeds maxval");
      f[Eigen::Index(k)] = double(v) * scale;
    }
  }
  return f;
}

ScalarField parse_csv(const std::string& text, const std::string& name, double spacing) {
  std::vector<double> values;
  Eigen::Index width = -1, height = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    auto line_end = end;
    if (line_end > pos && text[line_end - 1] == '\r') --line_end;
    if (line_end == pos) {
      pos = end + 1;
      continue;  // blank line
    }
    Eigen::Index cols = 0;
    std::size_t at = pos;
    while (true) {
      while (at < line_end && text[at] == ' ') ++at;
      double v;
      const auto res = std::from_chars(text.data() + at, text.data() + line_end, v);
      if (res.ec != std::errc() || !std::isfinite(v))
        throw FormatError(FormatErrorKind::malformed_data, at, name, "expected a finite number");
      values.push_back(v);
      ++cols;
      at = std::size_t(res.ptr - text.data());
      while (at < line_end && text[at] == ' ') ++at;
      if (at == line_end) break;
      if (text[at] != ',')
        throw FormatError(FormatErrorKind::malformed_data, at, name, "expected ','");
      ++at;
    }
    if (width < 0) width = cols;
    if (cols != width)
      throw FormatError(FormatErrorKind::malformed_data, pos, name,
                        "row " + std::to_string(height) + " has " + std::to_string(cols) +
                            " values, expected " + std::to_string(width));
    ++height;
    pos = end + 1;
  }
  if (height == 0) throw FormatError(FormatErrorKind::truncated_data, 0, name, "no rows");
  ScalarField f(width, height, spacing);
  for (Eigen::Index k = 0; k < f.size(); ++k) f[k] = values[std::size_t(k)];
  return f;
}

ScalarField read_field(const std::string& path, double spacing) {
  const auto fmt = format_of(path);
  const auto bytes = slurp(path);
  return fmt == Format::pgm ? parse_pgm(bytes, path, spacing) : parse_csv(bytes, path, spacing);
}

Mask read_mask(const std::string& path) { return read_field(path).values > 0.0; }

void write_field(const ScalarField& field, const std::string& path, WriteOptions options) {
  std::string out;
  if (format_of(path) == Format::pgm) {
    const unsigned maxval = options.sixteen_bit ? 65535 : 255;
    out = "P5\n" + std::to_string(field.width()) + " " + std::to_string(field.height()) + "\n" +
          std::to_string(maxval) + "\n";
    out.reserve(out.size() + std::size_t(field.size()) * (options.sixteen_bit ? 2 : 1));
    for (Eigen::Index k = 0; k < field.size(); ++k) {
      const double v = std::isnan(field[k]) ? 0.0 : std::clamp(field[k], 0.0, 1.0);
      const auto q = static_cast<unsigned>(std::lround(v * maxval));
      if (options.sixteen_bit) out.push_back(char(q >> 8));
      out.push_back(char(q & 0xff));
    }
  } else {
    for (Eigen::Index i = 0; i < field.height(); ++i) {
      for (Eigen::Index j = 0; j < field.width(); ++j) {
        if (j) out.push_back(',');
        out += format_csv_value(field(i, j));
      }
      out.push_back('\n');
    }
  }
  dump(path, out);
}

void write_mask(const Mask& mask, const std::string& path) {
  write_field(ScalarField(mask.cast<double>(), 1.0), path);
}

}  // namespace wlap
