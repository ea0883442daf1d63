#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hjh {

// Points and gradients; in 1D the second slot is ignored and kept at zero.
using Vec = std::array<double, 2>;
using GridFunction = std::vector<double>;
using ScalarField = std::function<double(const Vec&)>;

double norm(const Vec& v, int dim);
double dot(const Vec& a, const Vec& b, int dim);

// Uniform periodic grid on [0,1)^dim, row-major with axis 0 fastest.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis);

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(int i, int j = 0) const noexcept;
  std::array<int, 2> coords(std::size_t k) const noexcept;
  Vec point(std::size_t k) const noexcept;
  std::size_t neighbor(std::size_t k, int axis, int direction) const noexcept;

  bool operator==(const TorusGrid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_;
  int n_;
  double h_;
  std::size_t size_;
};

GridFunction sample(const TorusGrid& grid, const ScalarField& f);

// Periodic (bi)linear interpolation; x is any real point.
double interpolate_periodic(const TorusGrid& grid, std::span<const double> values, const Vec& x);

double discrete_lipschitz(const TorusGrid& grid, std::span<const double> values);

// Fixed-order pairwise summation, independent of how values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace hjh
