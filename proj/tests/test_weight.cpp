#include "oracles.hpp"
#include "wlap/weight.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wlap;

TEST_CASE("gradient of a constant vanishes") {
  const auto [gx, gy] = compute_gradient(ScalarField(9, 6, 0.1, 0.5));
  CHECK(gx.values.abs().maxCoeff() == 0.0);
  CHECK(gy.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("gradient is exact on quadratics, frame included") {
  const auto c = ScalarField::sample(11, 8, 0.1, [](double x, double y) {
    return 0.3 * x + 0.1 * y + 0.2 * x * x - 0.05 * x * y + 0.07 * y * y;
  });
  const auto [gx, gy] = compute_gradient(c);
  for (Eigen::Index i = 0; i < c.height(); ++i)
    for (Eigen::Index j = 0; j < c.width(); ++j) {
      const double x = c.x(j), y = c.y(i);
      CHECK(gx(i, j) == doctest::Approx(0.3 + 0.4 * x - 0.05 * y).epsilon(1e-12));
      CHECK(gy(i, j) == doctest::Approx(0.1 - 0.05 * x + 0.14 * y).epsilon(1e-12));
    }
}

TEST_CASE("linear ramp has unit gradient") {
  const auto c = ScalarField::sample(17, 5, 1.0 / 16, [](double x, double) { return x; });
  const auto [gx, gy] = compute_gradient(c);
  CHECK((gx.values - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(gy.values.abs().maxCoeff() < 1e-12);
}

TEST_CASE("sin^2(x/2) gradient converges at second order") {
  auto err = [](Eigen::Index n) {
    const double h = std::numbers::pi / double(n - 1);
    const auto c = ScalarField::sample(n, 5, h, [](double x, double) {
      const double s = std::sin(0.5 * x);
      return s * s;
    });
    const auto [gx, gy] = compute_gradient(c);
    double e = 0.0;
    for (Eigen::Index i = 0; i < c.height(); ++i)
      for (Eigen::Index j = 0; j < c.width(); ++j)
        e = std::max(e, std::abs(gx(i, j) - 0.5 * std::sin(c.x(j))));
    return std::pair{e, h};
  };
  const auto [e129, h129] = err(129);
  const auto [e257, h257] = err(257);
  CHECK(e129 <= h129 * h129 / 4);
  CHECK(e129 / e257 == doctest::Approx(4.0).epsilon(0.1));
  (void)h257;
}

TEST_CASE("domain-aware gradient ignores known pixels") {
  // Binary weight: the jump across the known boundary must not show up.
  Mask m = Mask::Constant(9, 9, false);
  m.block(3, 3, 3, 3).setConstant(true);
  const auto d = build_domain(m, 0.125);
  const ScalarField c(m.cast<double>(), 0.125);
  const auto [gx, gy] = compute_gradient(c, d);
  CHECK(gx.values.abs().maxCoeff() == 0.0);
  CHECK(gy.values.abs().maxCoeff() == 0.0);

  // Away from known pixels it agrees with the plain stencil.
  const auto smooth = ScalarField::sample(9, 9, 0.125, [](double x, double y) { return 0.2 + 0.3 * x * y; });
  const auto [sx, sy] = compute_gradient(smooth, d);
  const auto [px, py] = compute_gradient(smooth);
  CHECK(sx(1, 1) == doctest::Approx(px(1, 1)));
  CHECK(sy(7, 6) == doctest::Approx(py(7, 6)));
  // Next to the block: one-sided but still exact on this bilinear field.
  CHECK(sx(4, 2) == doctest::Approx(0.3 * smooth.y(4)).epsilon(1e-12));
}

TEST_CASE("weight range validation") {
  ScalarField c(4, 4, 1.0, 0.5);
  c(2, 1) = 1.5;
  CHECK_THROWS_AS(make_weight(c), std::invalid_argument);
  c(2, 1) = std::nan("");
  CHECK_THROWS_AS(validate_weight_range(c), std::invalid_argument);
  c(2, 1) = -1e-3;
  CHECK_THROWS_AS(validate_weight_range(c), std::invalid_argument);
  c(2, 1) = 1.0;
  CHECK_NOTHROW(validate_weight_range(c));
  CHECK_THROWS_AS(make_weight(c, ScalarField(3, 4, 1.0), ScalarField(4, 4, 1.0)), std::invalid_argument);
}

TEST_CASE("unit weight pixels inside the unknown region are reported") {
  ScalarField c(6, 6, 1.0, 0.2);
  c(2, 3) = 1.0;
  const auto d = build_domain(Mask::Constant(6, 6, false), 1.0);
  const auto px = unit_weight_pixels(make_weight(c), d);
  REQUIRE(px.size() == 1);
  CHECK(px[0] == 2 * 6 + 3);
}

TEST_CASE("coefficient table") {
  const auto c = ScalarField::sample(7, 7, 0.1, [](double x, double y) { return 0.3 + 0.2 * x + 0.1 * y; });
  const auto w = make_weight(c);
  const auto div = build_coefficients(w, CrossSign::divergence_form);
  const auto tab = build_coefficients(w, CrossSign::ternary_table);
  for (Eigen::Index p = 0; p < c.size(); ++p) {
    CHECK(div.diag_val[p] == c[p]);
    CHECK(div.diag_grad[p] == 1.0 - c[p]);
    CHECK(div.cross_x[p] == doctest::Approx(-0.2));
    CHECK(div.cross_y[p] == doctest::Approx(-0.1));
    CHECK(tab.cross_x[p] == doctest::Approx(-0.2));
    CHECK(tab.cross_y[p] == doctest::Approx(0.1));
  }
}

TEST_CASE("face coefficients") {
  Mask m = Mask::Constant(5, 5, false);
  m(2, 2) = true;
  const auto d = build_domain(m, 1.0);
  ScalarField c(5, 5, 1.0, 0.0);
  c(1, 1) = 0.5;
  c(1, 2) = 0.75;
  c(2, 1) = 1.0;
  // Harmonic mean of 0.5 and 0.25.
  CHECK(face_coefficient(d, c, 6, 7) == doctest::Approx(2.0 * 0.5 * 0.25 / 0.75));
  // Degenerate endpoint blocks the flux.
  CHECK(face_coefficient(d, c, 6, 11) == 0.0);
  // Face to a known pixel takes the unknown side.
  CHECK(face_coefficient(d, c, 7, 12) == doctest::Approx(0.25));
}

TEST_CASE("stiffness, mass and Gram match the face and cell sums") {
  oracle::Gen gen(5);
  const auto m = gen.interior_mask(8, 7, 0.25);
  const auto d = build_domain(m, 0.2);
  const auto c = gen.field(8, 7, 0.2, 0.0, 0.9);
  const Eigen::MatrixXd k = Eigen::MatrixXd(weighted_stiffness(d, c));
  const Eigen::MatrixXd mass = Eigen::MatrixXd(lumped_mass(d));
  const Eigen::MatrixXd g = Eigen::MatrixXd(v_gram(d, c));
  CHECK((k - k.transpose()).norm() == 0.0);
  CHECK((g - k - mass).norm() < 1e-14);
  for (int trial = 0; trial < 5; ++trial) {
    Vector u(d.unknown_count());
    for (auto& x : u) x = gen.uniform(-1, 1);
    const auto full = expand_unknowns(d, u);
    double faces = 0.0, cells = 0.0;
    for_each_face(d, [&](Eigen::Index p, Eigen::Index q, double len) {
      faces += face_coefficient(d, c, p, q) * len * (full[p] - full[q]) * (full[p] - full[q]);
    });
    for (const auto p : d.unknown_pixels) cells += d.cell_area(p) * full[p] * full[p];
    CHECK(u.dot(k * u) == doctest::Approx(faces).epsilon(1e-12));
    CHECK(u.dot(mass * u) == doctest::Approx(cells).epsilon(1e-12));
  }
}
