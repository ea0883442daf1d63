#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hjh/cell.hpp"

namespace hjh {

// Uniform P-lattice, axis 0 fastest.
struct PLattice {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<int, 2> count{1, 1};

  static PLattice line(double lo, double hi, int count);
  static PLattice box(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> count);

  std::size_t size() const noexcept;
  double step(int axis) const;
  double coordinate(int axis, int i) const;
  Vec point(std::size_t k) const;
  std::size_t index(int i, int j = 0) const noexcept;
  void validate() const;
};

struct TableEntry {
  Vec P{0.0, 0.0};
  double h_bar = 0.0;
  double err_bar = 0.0;
  double lower_cert = 0.0;
  double upper_cert = 0.0;
  bool ok = true;
  std::string failure;
};

class EffectiveTable {
 public:
  EffectiveTable() = default;
  EffectiveTable(PLattice lattice, std::vector<TableEntry> entries, double delta_min, int grid_n);

  const PLattice& lattice() const noexcept { return lattice_; }
  const std::vector<TableEntry>& entries() const noexcept { return entries_; }
  const TableEntry& at(int i, int j = 0) const { return entries_.at(lattice_.index(i, j)); }
  double delta_min() const noexcept { return delta_min_; }
  int grid_n() const noexcept { return grid_n_; }
  bool complete() const;
  std::size_t gaps() const;

  // Piecewise-linear (1D) or bilinear (2D); outside the hull the query is clamped.
  double interpolate(const Vec& P, bool* clamped = nullptr) const;
  // Largest |difference quotient| between lattice neighbours along an axis.
  double max_slope(int axis) const;
  // Godunov extremum of the interpolant over [p-, p+] per axis (exact in 1D, sampled in 2D).
  double godunov(const Vec& p_minus, const Vec& p_plus, bool* clamped = nullptr) const;

  void write_csv(std::ostream& os) const;
  static EffectiveTable read_csv(std::istream& is);

 private:
  PLattice lattice_;
  std::vector<TableEntry> entries_;
  double delta_min_ = 0.0;
  int grid_n_ = 0;
};

EffectiveTable build_table(const HamiltonianSpec& spec, const CouplingMatrix& k, const PLattice& lattice,
                           const std::vector<double>& deltas, double tol, const CellOptions& options = {});

}  // namespace hjh
