#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "hjh/coupling.hpp"
#include "hjh/effective_table.hpp"
#include "hjh/hamiltonian.hpp"

namespace hjh {

// Closed interval or box with `intervals` cells per axis; boundary points are part of the grid.
class BoxGrid {
 public:
  BoxGrid(int dim, Vec lo, Vec hi, int intervals);
  static BoxGrid interval(double a, double b, int intervals) { return BoxGrid(1, {a, 0.0}, {b, 0.0}, intervals); }

  int dim() const noexcept { return dim_; }
  int intervals() const noexcept { return n_; }
  int points_per_axis() const noexcept { return n_ + 1; }
  std::size_t size() const noexcept { return size_; }
  const Vec& lo() const noexcept { return lo_; }
  const Vec& hi() const noexcept { return hi_; }
  double spacing(int axis) const { return h_.at(axis); }

  std::size_t index(int i, int j = 0) const noexcept;
  std::array<int, 2> coords(std::size_t k) const noexcept;
  Vec point(std::size_t k) const noexcept;
  bool is_boundary(std::size_t k) const noexcept;

  bool operator==(const BoxGrid& o) const noexcept {
    return dim_ == o.dim_ && n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_;
  }

 private:
  int dim_;
  int n_;
  Vec lo_, hi_;
  std::array<double, 2> h_{0.0, 0.0};
  std::size_t size_;
};

// Boundary values per side: left, right[, bottom, top]. Corners take the smaller side value.
GridFunction side_data(const BoxGrid& grid, const std::vector<double>& sides);

// u_i + H_i(x/eps, Du_i) + (1/eps)(u_i - sum_j c_ij u_j) = 0 in the box, u_i = g_i on the boundary.
struct DirichletProblem {
  HamiltonianSpec spec;
  CouplingMatrix coupling;
  double epsilon;
  BoxGrid grid;
  std::vector<GridFunction> boundary;  // full-size arrays; only boundary entries are read

  void validate() const;
  // max_i (sup |H_i(., 0)| + sup |g_i|)
  double uniform_bound() const;
};

struct DirichletOptions {
  double r_grad = 4.0;  // starting gradient radius for the step size; raised when exceeded
  double cfl = 0.9;
  long max_iterations = 5'000'000;
  long history_stride = 1000;
};

struct DirichletSolution {
  BoxGrid grid;
  std::vector<GridFunction> components;
  long iterations = 0;
  double residual = 0.0;
  double max_gradient = 0.0;

  int m() const noexcept { return static_cast<int>(components.size()); }
  // Largest difference quotient between neighbouring gridpoints.
  double lipschitz(int i) const;
};

DirichletSolution solve_dirichlet_eps(const DirichletProblem& problem, double tol, const DirichletOptions& options = {});

// u + Hbar(Du) = 0 with u = g_bar on the boundary.
DirichletSolution solve_dirichlet_effective(const EffectiveTable& table, const BoxGrid& grid, const GridFunction& g_bar,
                                            double tol, const DirichletOptions& options = {});

// Pointwise min over the components.
GridFunction effective_boundary_datum(const std::vector<GridFunction>& g);

// Rows (x[, y], component, value).
void write_dirichlet_csv(std::ostream& os, const DirichletSolution& solution);

}  // namespace hjh
