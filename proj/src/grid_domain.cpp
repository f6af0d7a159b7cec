#include "wlap/grid_domain.hpp"

#include <string>

namespace wlap {

const char* to_string(PixelClass c) {
  switch (c) {
    case PixelClass::interior_unknown: return "interior-unknown";
    case PixelClass::outer_boundary: return "outer-boundary";
    case PixelClass::known_interior: return "known-interior";
    case PixelClass::known_boundary: return "known-boundary";
  }
  return "?";
}

bool DomainSpec::known_set_proper() const {
  const auto n_known = pixel_count() - unknown_count();
  return n_known > 0 && n_known < pixel_count();
}

double DomainSpec::cell_area(Eigen::Index p) const {
  const auto i = row(p), j = col(p);
  double a = spacing * spacing;
  if (i == 0 || i == height - 1) a *= 0.5;
  if (j == 0 || j == width - 1) a *= 0.5;
  return a;
}

DomainSpec build_domain(const Mask& known_mask, double spacing) {
  if (known_mask.rows() < 3 || known_mask.cols() < 3)
    throw DomainError("mask must be at least 3x3, got " + std::to_string(known_mask.cols()) + "x" +
                      std::to_string(known_mask.rows()));
  if (!(spacing > 0.0)) throw DomainError("spacing must be positive");

  DomainSpec d;
  d.width = known_mask.cols();
  d.height = known_mask.rows();
  d.spacing = spacing;
  d.known = known_mask;

  const auto n = d.pixel_count();
  d.unknown_index.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index p = 0; p < n; ++p) {
    if (d.on_frame(p)) {
      if (d.is_known(p))
        throw DomainError("known pixel on the image frame at (row " + std::to_string(d.row(p)) +
                          ", col " + std::to_string(d.col(p)) +
                          "): outer and known boundaries must be disjoint");
      d.outer_boundary.push_back(p);
    }
    if (!d.is_known(p)) {
      d.unknown_index[static_cast<std::size_t>(p)] = d.unknown_count();
      d.unknown_pixels.push_back(p);
    } else {
      bool touches_unknown = false;
      d.for_each_neighbor(p, [&](Eigen::Index q) { touches_unknown |= !known_mask.data()[q]; });
      if (touches_unknown) d.known_boundary.push_back(p);
    }
  }
  return d;
}

PixelClass classify_pixel(const DomainSpec& domain, Eigen::Index pixel) {
  if (pixel < 0 || pixel >= domain.pixel_count())
    throw std::out_of_range("pixel " + std::to_string(pixel) + " outside " +
                            std::to_string(domain.width) + "x" + std::to_string(domain.height) +
                            " grid");
  if (!domain.is_known(pixel))
    return domain.on_frame(pixel) ? PixelClass::outer_boundary : PixelClass::interior_unknown;
  bool touches_unknown = false;
  domain.for_each_neighbor(pixel, [&](Eigen::Index q) { touches_unknown |= !domain.is_known(q); });
  return touches_unknown ? PixelClass::known_boundary : PixelClass::known_interior;
}

PixelClass classify_pixel(const DomainSpec& domain, Eigen::Index row, Eigen::Index col) {
  if (row < 0 || col < 0 || row >= domain.height || col >= domain.width)
    throw std::out_of_range("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                            ") outside grid");
  return classify_pixel(domain, row * domain.width + col);
}

ScalarField expand_unknowns(const DomainSpec& domain, const Vector& unknowns, double fill) {
  if (unknowns.size() != domain.unknown_count())
    throw std::invalid_argument("unknown vector has wrong length");
  ScalarField out(domain.width, domain.height, domain.spacing, fill);
  for (Eigen::Index k = 0; k < domain.unknown_count(); ++k)
    out[domain.unknown_pixels[static_cast<std::size_t>(k)]] = unknowns[k];
  return out;
}

Vector gather_unknowns(const DomainSpec& domain, const ScalarField& field) {
  if (field.width() != domain.width || field.height() != domain.height)
    throw std::invalid_argument("field does not match domain grid");
  Vector out(domain.unknown_count());
  for (Eigen::Index k = 0; k < domain.unknown_count(); ++k)
    out[k] = field[domain.unknown_pixels[static_cast<std::size_t>(k)]];
  return out;
}

}  // namespace wlap
