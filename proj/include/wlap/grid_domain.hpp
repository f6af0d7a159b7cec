#ifndef WLAP_GRID_DOMAIN_HPP
#define WLAP_GRID_DOMAIN_HPP

#include "wlap/field.hpp"

#include <stdexcept>
#include <vector>

namespace wlap {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PixelClass { interior_unknown, outer_boundary, known_interior, known_boundary };

const char* to_string(PixelClass c);

/// Discrete inpainting geometry.
///
/// The outer boundary is the pixel frame. The known boundary is the layer of
/// known pixels with at least one unknown 4-neighbour. Unknown pixels are
/// numbered row-major; `unknown_index[p]` is -1 for known pixels.
struct DomainSpec {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  double spacing = 1.0;

  Mask known;
  std::vector<Eigen::Index> outer_boundary;
  std::vector<Eigen::Index> known_boundary;
  std::vector<Eigen::Index> unknown_index;
  std::vector<Eigen::Index> unknown_pixels;

  Eigen::Index pixel_count() const { return width * height; }
  Eigen::Index unknown_count() const { return static_cast<Eigen::Index>(unknown_pixels.size()); }
  Eigen::Index row(Eigen::Index p) const { return p / width; }
  Eigen::Index col(Eigen::Index p) const { return p % width; }
  bool is_known(Eigen::Index p) const { return known.data()[p]; }
  bool on_frame(Eigen::Index p) const {
    const auto i = row(p), j = col(p);
    return i == 0 || j == 0 || i == height - 1 || j == width - 1;
  }

  /// False when no known pixel touches an unknown one ("no Dirichlet data").
  bool has_dirichlet_data() const { return !known_boundary.empty(); }
  /// False when the known set is empty or covers the whole grid.
  bool known_set_proper() const;

  /// Area of the pixel's control volume: spacing^2, halved on the frame,
  /// quartered at corners.
  double cell_area(Eigen::Index p) const;

  /// Calls fn(q) for every in-grid 4-neighbour q of p.
  template <typename Fn>
  void for_each_neighbor(Eigen::Index p, Fn&& fn) const {
    const auto i = row(p), j = col(p);
    if (i > 0) fn(p - width);
    if (j > 0) fn(p - 1);
    if (j + 1 < width) fn(p + 1);
    if (i + 1 < height) fn(p + width);
  }
};

/// Classifies the boundaries of a known-pixel mask. Throws DomainError for
/// grids smaller than 3x3 or known pixels on the frame.
DomainSpec build_domain(const Mask& known_mask, double spacing);

PixelClass classify_pixel(const DomainSpec& domain, Eigen::Index pixel);
PixelClass classify_pixel(const DomainSpec& domain, Eigen::Index row, Eigen::Index col);

/// Scatters a vector over the unknowns into a full field; known pixels take `fill`.
ScalarField expand_unknowns(const DomainSpec& domain, const Vector& unknowns, double fill = 0.0);

/// Extracts the unknown entries of a field.
Vector gather_unknowns(const DomainSpec& domain, const ScalarField& field);

}  // namespace wlap

#endif  // WLAP_GRID_DOMAIN_HPP
