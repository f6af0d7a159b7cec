#include "wlap/discretization.hpp"

#include <cmath>
#include <string>

namespace wlap {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Face length over spacing for the face between neighbours p and q.
double face_length_ratio(const DomainSpec& d, Eigen::Index p, Eigen::Index q) {
  const bool horizontal = d.row(p) == d.row(q);
  if (horizontal) {
    const auto i = d.row(p);
    return (i == 0 || i == d.height - 1) ? 0.5 : 1.0;
  }
  const auto j = d.col(p);
  return (j == 0 || j == d.width - 1) ? 0.5 : 1.0;
}

void require_grid(const DomainSpec& d, const ScalarField& f, const char* what) {
  if (f.width() != d.width || f.height() != d.height)
    throw std::invalid_argument(std::string(what) + ": field does not match domain grid");
}

SparseMatrix from_triplets(Eigen::Index n, const Triplets& t) {
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

// Second-order one-sided derivative at the first/last sample of a line.
double one_sided_first(double f0, double f1, double f2, double h) {
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

bool all_zero_on_unknowns(const DomainSpec& d, const ScalarField& c) {
  for (const auto p : d.unknown_pixels)
    if (c[p] != 0.0) return false;
  return true;
}

}  // namespace

const char* to_string(SystemOrigin o) {
  switch (o) {
    case SystemOrigin::dirichlet: return "dirichlet";
    case SystemOrigin::collocation: return "collocation";
    case SystemOrigin::weak: return "weak";
  }
  return "?";
}

void verify_system(const SparseSystem& s) {
  const auto& a = s.matrix;
  if (!a.isCompressed()) throw std::logic_error("system matrix is not compressed");
  if (a.rows() != s.n() || a.cols() != s.n())
    throw std::logic_error("system matrix does not match rhs length");
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (outer[r + 1] < outer[r]) throw std::logic_error("row offsets not monotone");
    for (auto k = outer[r]; k < outer[r + 1]; ++k) {
      if (inner[k] < 0 || inner[k] >= a.cols())
        throw std::logic_error("column index out of range in row " + std::to_string(r));
      if (k > outer[r] && inner[k] <= inner[k - 1])
        throw std::logic_error("duplicate or unsorted column in row " + std::to_string(r));
    }
  }
  if (s.symmetric_hint) {
    const SparseMatrix at = a.transpose();
    const double diff = (a - at).norm();
    if (diff > 1e-12 * std::max(1.0, a.norm()))
      throw std::logic_error("symmetric_hint set but matrix is not symmetric");
  }
}

SparseSystem assemble_dirichlet(const DomainSpec& domain, const ScalarField& f,
                                AssemblyOptions options) {
  require_grid(domain, f, "assemble_dirichlet");
  if (!domain.has_dirichlet_data() && !options.allow_singular)
    throw NoDataError("assemble_dirichlet: no known pixel touches the inpainting region");

  const auto n = domain.unknown_count();
  SparseSystem s;
  s.rhs = Vector::Zero(n);
  s.origin = SystemOrigin::dirichlet;
  s.symmetric_hint = true;

  Triplets t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto p = domain.unknown_pixels[static_cast<std::size_t>(r)];
    double diag = 0.0;
    domain.for_each_neighbor(p, [&](Eigen::Index q) {
      const double l = face_length_ratio(domain, p, q);
      diag += l;
      const auto c = domain.unknown_index[static_cast<std::size_t>(q)];
      if (c >= 0)
        t.emplace_back(r, c, -l);
      else
        s.rhs[r] += l * f[q];
    });
    t.emplace_back(r, r, diag);
  }
  s.matrix = from_triplets(n, t);
  return s;
}

SparseSystem assemble_collocation(const DomainSpec& domain, const WeightField& weight,
                                  const ScalarField& f, AssemblyOptions options) {
  require_grid(domain, f, "assemble_collocation");
  require_grid(domain, weight.c, "assemble_collocation");
  const auto& c = weight.c;
  if (!options.allow_singular && (c.values == 0.0).all())
    throw NoDataError("assemble_collocation: weight is identically zero (pure Neumann problem)");

  const auto n = domain.pixel_count();
  SparseSystem s;
  s.rhs = Vector::Zero(n);
  s.origin = SystemOrigin::collocation;
  s.symmetric_hint = c.values.maxCoeff() == c.values.minCoeff();

  Triplets t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (Eigen::Index p = 0; p < n; ++p) {
    const double w = domain.cell_area(p);
    const double diffusion = 1.0 - c[p];
    double diag = w * c[p];
    domain.for_each_neighbor(p, [&](Eigen::Index q) {
      const double l = diffusion * face_length_ratio(domain, p, q);
      diag += l;
      if (l != 0.0) t.emplace_back(p, q, -l);
    });
    t.emplace_back(p, p, diag);
    s.rhs[p] = w * c[p] * f[p];
  }
  s.matrix = from_triplets(n, t);
  return s;
}

WeakData weak_data(const WeightField& weight, const ScalarField& f) {
  require_same_shape(weight.c, f, "weak_data");
  const auto w = f.width(), ht = f.height();
  const double h = f.spacing;
  WeakData d{ScalarField(w, ht, h), ScalarField(w, ht, h), ScalarField(w, ht, h),
             ScalarField(w, ht, h)};

  for (Eigen::Index i = 0; i < ht; ++i) {
    d.normal_x(i, 0) = one_sided_first(f(i, 0), f(i, 1), f(i, 2), h);
    d.normal_x(i, w - 1) = one_sided_first(f(i, w - 1), f(i, w - 2), f(i, w - 3), h);
  }
  for (Eigen::Index j = 0; j < w; ++j) {
    d.normal_y(0, j) = one_sided_first(f(0, j), f(1, j), f(2, j), h);
    d.normal_y(ht - 1, j) = one_sided_first(f(ht - 1, j), f(ht - 2, j), f(ht - 3, j), h);
  }

  // Ghost values f_ghost = f_inner + 2 h d_n f reproduce the one-sided normal
  // derivative under central differencing.
  for (Eigen::Index i = 0; i < ht; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) {
      const double left = j > 0 ? f(i, j - 1) : f(i, 1) - 2.0 * h * d.normal_x(i, 0);
      const double right = j + 1 < w ? f(i, j + 1) : f(i, w - 2) - 2.0 * h * d.normal_x(i, w - 1);
      const double up = i > 0 ? f(i - 1, j) : f(1, j) - 2.0 * h * d.normal_y(0, j);
      const double down = i + 1 < ht ? f(i + 1, j) : f(ht - 2, j) - 2.0 * h * d.normal_y(ht - 1, j);
      d.laplacian_f(i, j) = (left + right + up + down - 4.0 * f(i, j)) / (h * h);
      d.g(i, j) = (1.0 - weight.c(i, j)) * d.laplacian_f(i, j);
    }
  }
  return d;
}

SparseMatrix weak_form_matrix(const DomainSpec& domain, const WeightField& weight) {
  const auto& c = weight.c;
  const auto n = domain.unknown_count();
  const double h = domain.spacing;
  const auto& idx = domain.unknown_index;

  Triplets t;
  t.reserve(static_cast<std::size_t>(9 * n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto p = domain.unknown_pixels[static_cast<std::size_t>(r)];
    const auto i = domain.row(p), j = domain.col(p);
    const double area = domain.cell_area(p);
    double diag = area * c[p];
    domain.for_each_neighbor(p, [&](Eigen::Index q) {
      const double k = face_coefficient(domain, c, p, q) * face_length_ratio(domain, p, q);
      diag += k;
      const auto col = idx[static_cast<std::size_t>(q)];
      if (col >= 0 && k != 0.0) t.emplace_back(r, col, -k);
    });
    t.emplace_back(r, r, diag);

    // -(grad c . grad v) v with central differences; frame-normal components
    // are data and live in the right-hand side.
    const double ax = -area * weight.grad_x[p] / (2.0 * h);
    const double ay = -area * weight.grad_y[p] / (2.0 * h);
    if (j > 0 && j + 1 < domain.width && ax != 0.0) {
      if (const auto e = idx[static_cast<std::size_t>(p + 1)]; e >= 0) t.emplace_back(r, e, ax);
      if (const auto e = idx[static_cast<std::size_t>(p - 1)]; e >= 0) t.emplace_back(r, e, -ax);
    }
    if (i > 0 && i + 1 < domain.height && ay != 0.0) {
      if (const auto e = idx[static_cast<std::size_t>(p + domain.width)]; e >= 0)
        t.emplace_back(r, e, ay);
      if (const auto e = idx[static_cast<std::size_t>(p - domain.width)]; e >= 0)
        t.emplace_back(r, e, -ay);
    }
  }
  return from_triplets(n, t);
}

SparseSystem assemble_weak(const DomainSpec& domain, const WeightField& weight,
                           const ScalarField& f, AssemblyOptions options) {
  require_grid(domain, f, "assemble_weak");
  require_grid(domain, weight.c, "assemble_weak");
  if (!options.allow_singular && !domain.has_dirichlet_data() &&
      all_zero_on_unknowns(domain, weight.c))
    throw NoDataError("assemble_weak: weight vanishes on the inpainting region and no known "
                      "pixel pins the solution");

  const auto n = domain.unknown_count();
  const double h = domain.spacing;
  const auto data = weak_data(weight, f);

  SparseSystem s;
  s.matrix = weak_form_matrix(domain, weight);
  s.rhs = Vector::Zero(n);
  s.origin = SystemOrigin::weak;

  bool convection = false;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto p = domain.unknown_pixels[static_cast<std::size_t>(r)];
    const auto i = domain.row(p), j = domain.col(p);
    const double area = domain.cell_area(p);
    const double diffusion = 1.0 - weight.c[p];
    convection |= weight.grad_x[p] != 0.0 || weight.grad_y[p] != 0.0;

    double b = area * data.g[p];
    const bool x_frame = j == 0 || j == domain.width - 1;
    const bool y_frame = i == 0 || i == domain.height - 1;
    // On the frame d_n v = -d_n f = normal data, so the normal component of
    // grad v in the convection term is known.
    if (x_frame) {
      const double outward = j == 0 ? -1.0 : 1.0;
      b += area * weight.grad_x[p] * outward * data.normal_x[p];
      b += (y_frame ? 0.5 * h : h) * diffusion * data.normal_x[p];
    }
    if (y_frame) {
      const double outward = i == 0 ? -1.0 : 1.0;
      b += area * weight.grad_y[p] * outward * data.normal_y[p];
      b += (x_frame ? 0.5 * h : h) * diffusion * data.normal_y[p];
    }
    s.rhs[r] = b;
  }
  s.symmetric_hint = !convection;
  return s;
}

ScalarField recover_from_weak(const DomainSpec& domain, const Vector& v, const ScalarField& f) {
  require_grid(domain, f, "recover_from_weak");
  ScalarField u = f;
  for (Eigen::Index r = 0; r < domain.unknown_count(); ++r)
    u[domain.unknown_pixels[static_cast<std::size_t>(r)]] += v[r];
  return u;
}

ScalarField recover_from_dirichlet(const DomainSpec& domain, const Vector& u,
                                   const ScalarField& f) {
  require_grid(domain, f, "recover_from_dirichlet");
  ScalarField out = f;
  for (Eigen::Index r = 0; r < domain.unknown_count(); ++r)
    out[domain.unknown_pixels[static_cast<std::size_t>(r)]] = u[r];
  return out;
}

ScalarField recover_from_collocation(const DomainSpec& domain, const Vector& u) {
  if (u.size() != domain.pixel_count())
    throw std::invalid_argument("recover_from_collocation: wrong solution length");
  ScalarField out(domain.width, domain.height, domain.spacing);
  for (Eigen::Index p = 0; p < u.size(); ++p) out[p] = u[p];
  return out;
}

SparseMatrix symmetric_part(const SparseMatrix& a) {
  SparseMatrix at = a.transpose();
  SparseMatrix s = 0.5 * (a + at);
  s.makeCompressed();
  return s;
}

}  // namespace wlap
