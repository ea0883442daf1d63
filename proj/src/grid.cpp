#include "hjh/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "hjh/errors.hpp"

namespace hjh {

double norm(const Vec& v, int dim) {
  return dim == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]);
}

double dot(const Vec& a, const Vec& b, int dim) {
  return dim == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (points_per_axis < 4) throw ConfigError("grid needs at least 4 points per axis");
  h_ = 1.0 / n_;
  size_ = dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

std::size_t TorusGrid::index(int i, int j) const noexcept {
  i %= n_;
  if (i < 0) i += n_;
  if (dim_ == 1) return static_cast<std::size_t>(i);
  j %= n_;
  if (j < 0) j += n_;
  return static_cast<std::size_t>(j) * n_ + i;
}

std::array<int, 2> TorusGrid::coords(std::size_t k) const noexcept {
  if (dim_ == 1) return {static_cast<int>(k), 0};
  return {static_cast<int>(k % n_), static_cast<int>(k / n_)};
}

Vec TorusGrid::point(std::size_t k) const noexcept {
  const auto c = coords(k);
  return {c[0] * h_, dim_ == 2 ? c[1] * h_ : 0.0};
}

std::size_t TorusGrid::neighbor(std::size_t k, int axis, int direction) const noexcept {
  auto c = coords(k);
  c[axis] += direction;
  return index(c[0], c[1]);
}

GridFunction sample(const TorusGrid& grid, const ScalarField& f) {
  GridFunction out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = f(grid.point(k));
  return out;
}

double interpolate_periodic(const TorusGrid& grid, std::span<const double> values, const Vec& x) {
  const int n = grid.points_per_axis();
  auto split = [n](double t, int& i0, double& w) {
    const double s = (t - std::floor(t)) * n;
    i0 = static_cast<int>(std::floor(s));
    w = s - i0;
    if (i0 >= n) {
      i0 -= n;
    }
  };
  int i0 = 0;
  double wx = 0.0;
  split(x[0], i0, wx);
  if (grid.dim() == 1) {
    return (1.0 - wx) * values[grid.index(i0)] + wx * values[grid.index(i0 + 1)];
  }
  int j0 = 0;
  double wy = 0.0;
  split(x[1], j0, wy);
  const double v00 = values[grid.index(i0, j0)];
  const double v10 = values[grid.index(i0 + 1, j0)];
  const double v01 = values[grid.index(i0, j0 + 1)];
  const double v11 = values[grid.index(i0 + 1, j0 + 1)];
  return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11);
}

double discrete_lipschitz(const TorusGrid& grid, std::span<const double> values) {
  double lip = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int axis = 0; axis < grid.dim(); ++axis)
      lip = std::max(lip, std::abs(values[grid.neighbor(k, axis, 1)] - values[k]) / grid.spacing());
  return lip;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace hjh
