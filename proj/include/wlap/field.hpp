#ifndef WLAP_FIELD_HPP
#define WLAP_FIELD_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlap {

template <typename Scalar>
using ImageArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = ImageArray<bool>;
using Vector = Eigen::VectorXd;

/// Real-valued function sampled on a uniform pixel grid.
///
/// Pixel (row i, column j) sits at x = j * spacing, y = i * spacing, so a
/// grid of n samples spans (n - 1) * spacing domain units. Values are stored
/// row-major; `values(i, j)` and `values.data()[i * width + j]` agree.
template <typename Scalar>
struct BasicScalarField {
  ImageArray<Scalar> values;
  Scalar spacing = Scalar(1);

  BasicScalarField() = default;

  BasicScalarField(Eigen::Index width, Eigen::Index height, Scalar h, Scalar fill = Scalar(0))
      : values(ImageArray<Scalar>::Constant(height, width, fill)), spacing(h) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("field dimensions must be positive");
    if (!(h > Scalar(0)))
      throw std::invalid_argument("field spacing must be positive");
  }

  BasicScalarField(ImageArray<Scalar> v, Scalar h) : values(std::move(v)), spacing(h) {
    if (values.size() == 0)
      throw std::invalid_argument("field dimensions must be positive");
    if (!(h > Scalar(0)))
      throw std::invalid_argument("field spacing must be positive");
  }

  Eigen::Index width() const { return values.cols(); }
  Eigen::Index height() const { return values.rows(); }
  Eigen::Index size() const { return values.size(); }

  Scalar& operator()(Eigen::Index i, Eigen::Index j) { return values(i, j); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }

  /// Linear (row-major) access.
  Scalar& operator[](Eigen::Index p) { return values.data()[p]; }
  Scalar operator[](Eigen::Index p) const { return values.data()[p]; }

  Scalar x(Eigen::Index j) const { return Scalar(j) * spacing; }
  Scalar y(Eigen::Index i) const { return Scalar(i) * spacing; }

  bool same_shape(const BasicScalarField& other) const {
    return width() == other.width() && height() == other.height();
  }

  /// Samples fn(x, y) at every pixel.
  template <typename Fn>
  static BasicScalarField sample(Eigen::Index width, Eigen::Index height, Scalar h, Fn&& fn) {
    BasicScalarField out(width, height, h);
    for (Eigen::Index i = 0; i < height; ++i)
      for (Eigen::Index j = 0; j < width; ++j) out(i, j) = fn(out.x(j), out.y(i));
    return out;
  }
};

using ScalarField = BasicScalarField<double>;

template <typename Scalar>
void require_same_shape(const BasicScalarField<Scalar>& a, const BasicScalarField<Scalar>& b,
                        const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": field dimensions differ (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
}

}  // namespace wlap

#endif  // WLAP_FIELD_HPP
