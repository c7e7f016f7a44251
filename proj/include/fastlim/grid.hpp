#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fastlim/errors.hpp"

namespace fastlim {

/// Cell-centered tensor grid on a 1D interval or 2D rectangle [0,Lx]x[0,Ly].
/// Cells are stored row-major with x varying fastest.
class Grid {
 public:
  int dim() const noexcept { return dim_; }
  int cells(int axis) const { return cells_.at(static_cast<std::size_t>(axis)); }
  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }
  double spacing(int axis) const { return spacing_.at(static_cast<std::size_t>(axis)); }

  std::size_t size() const noexcept {
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= static_cast<std::size_t>(cells_[static_cast<std::size_t>(a)]);
    return n;
  }

  double cell_volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[static_cast<std::size_t>(a)];
    return v;
  }

  double min_spacing() const noexcept {
    double h = spacing_[0];
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[static_cast<std::size_t>(a)]);
    return h;
  }

  /// Coordinate of the center of cell `index` along `axis`.
  double center(std::size_t index, int axis) const {
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const std::size_t i = axis == 0 ? index % nx : index / nx;
    return (static_cast<double>(i) + 0.5) * spacing(axis);
  }

  friend Grid build_grid(int dim, std::span<const int> cells, std::span<const double> lengths);

 private:
  int dim_ = 1;
  std::array<int, 2> cells_{{0, 1}};
  std::array<double, 2> lengths_{{0.0, 1.0}};
  std::array<double, 2> spacing_{{0.0, 1.0}};
};

/// Constructs a grid; cells >= 3 and lengths > 0 on every axis, dim in {1,2}.
inline Grid build_grid(int dim, std::span<const int> cells, std::span<const double> lengths) {
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  const auto d = static_cast<std::size_t>(dim);
  if (cells.size() != d || lengths.size() != d) {
    throw InvalidArgument("grid needs exactly one cell count and one length per axis");
  }
  Grid g;
  g.dim_ = dim;
  for (std::size_t a = 0; a < d; ++a) {
    if (cells[a] < 3) throw InvalidArgument("grid needs at least 3 cells per axis");
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw InvalidArgument("grid lengths must be positive and finite");
    }
    g.cells_[a] = cells[a];
    g.lengths_[a] = lengths[a];
    g.spacing_[a] = lengths[a] / static_cast<double>(cells[a]);
  }
  return g;
}

inline Grid build_grid(int dim, std::initializer_list<int> cells, std::initializer_list<double> lengths) {
  return build_grid(dim, std::span<const int>(cells.begin(), cells.size()),
                    std::span<const double>(lengths.begin(), lengths.size()));
}

/// One scalar concentration sampled at cell centers.
class Field {
 public:
  Field() = default;
  explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit Field(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  std::span<const double> view() const noexcept { return values_; }
  std::span<double> view() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }
  double min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
  double max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  Field& operator+=(const Field& o) noexcept {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) noexcept {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double a) noexcept {
    for (double& x : values_) x *= a;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) noexcept { return a += b; }
  friend Field operator-(Field a, const Field& b) noexcept { return a -= b; }
  friend Field operator*(double s, Field a) noexcept { return a *= s; }

  bool operator==(const Field&) const = default;

 private:
  std::vector<double> values_;
};

/// Pointwise product.
inline Field hadamard(const Field& a, const Field& b) {
  Field r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

/// Field sampled from f(x) (1D) or f(x, y) (2D) at cell centers.
template <class F>
Field sample(const Grid& g, F&& f) {
  Field r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.dim() == 1) {
      r[i] = f(g.center(i, 0), 0.0);
    } else {
      r[i] = f(g.center(i, 0), g.center(i, 1));
    }
  }
  return r;
}

inline double integral(const Field& u, const Grid& g) {
  double s = 0.0;
  for (double x : u) s += x;
  return s * g.cell_volume();
}

inline double norm_l1(const Field& u, const Grid& g) {
  double s = 0.0;
  for (double x : u) s += std::abs(x);
  return s * g.cell_volume();
}

inline double norm_l2(const Field& u, const Grid& g) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return std::sqrt(s * g.cell_volume());
}

namespace detail {

inline void check_on_grid(const Field& u, const Grid& g, const char* what) {
  if (u.size() != g.size()) {
    throw InvalidArgument(std::string(what) + ": field has " + std::to_string(u.size()) +
                          " values, grid has " + std::to_string(g.size()) + " cells");
  }
  if (!u.all_finite()) throw NonFiniteValue(std::string(what) + ": non-finite input");
}

}  // namespace detail

/// Second-order central-difference Laplacian with homogeneous Neumann
/// conditions via mirror ghosts (u[-1] = u[0], u[n] = u[n-1]).
/// The induced matrix is symmetric with zero row sums.
inline Field laplacian(const Field& u, const Grid& g) {
  detail::check_on_grid(u, g, "laplacian");
  Field r(u.size());
  const auto nx = static_cast<std::size_t>(g.cells(0));
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double left = i == 0 ? u[i] : u[i - 1];
      const double right = i + 1 == nx ? u[i] : u[i + 1];
      r[i] = (left - 2.0 * u[i] + right) * ihx2;
    }
    return r;
  }
  const auto ny = static_cast<std::size_t>(g.cells(1));
  const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * j;
      const double c = u[k];
      const double w = i == 0 ? c : u[k - 1];
      const double e = i + 1 == nx ? c : u[k + 1];
      const double s = j == 0 ? c : u[k - nx];
      const double n = j + 1 == ny ? c : u[k + nx];
      r[k] = (w - 2.0 * c + e) * ihx2 + (s - 2.0 * c + n) * ihy2;
    }
  }
  return r;
}

/// Laplacian of the pointwise product: Δ(gcoef · u).
inline Field cross_diffusion(const Field& gcoef, const Field& u, const Grid& g) {
  detail::check_on_grid(gcoef, g, "cross_diffusion");
  detail::check_on_grid(u, g, "cross_diffusion");
  return laplacian(hadamard(gcoef, u), g);
}

}  // namespace fastlim
