#include "hjh/effective_table.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "hjh/errors.hpp"

namespace hjh {

PLattice PLattice::line(double lo, double hi, int count) {
  PLattice l;
  l.dim = 1;
  l.lo = {lo, 0.0};
  l.hi = {hi, 0.0};
  l.count = {count, 1};
  l.validate();
  return l;
}

PLattice PLattice::box(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> count) {
  PLattice l;
  l.dim = 2;
  l.lo = lo;
  l.hi = hi;
  l.count = count;
  l.validate();
  return l;
}

void PLattice::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("P-lattice dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (count[a] < 1) throw ConfigError("P-lattice needs at least one point per axis");
    if (count[a] == 1 ? lo[a] != hi[a] : !(hi[a] > lo[a])) throw ConfigError("P-lattice range is inconsistent");
  }
}

std::size_t PLattice::size() const noexcept {
  return dim == 1 ? static_cast<std::size_t>(count[0]) : static_cast<std::size_t>(count[0]) * count[1];
}

double PLattice::step(int axis) const { return count[axis] > 1 ? (hi[axis] - lo[axis]) / (count[axis] - 1) : 0.0; }

double PLattice::coordinate(int axis, int i) const {
  if (count[axis] == 1) return lo[axis];
  if (i == count[axis] - 1) return hi[axis];
  return lo[axis] + i * step(axis);
}

Vec PLattice::point(std::size_t k) const {
  const int i = static_cast<int>(k % count[0]);
  const int j = dim == 2 ? static_cast<int>(k / count[0]) : 0;
  return {coordinate(0, i), dim == 2 ? coordinate(1, j) : 0.0};
}

std::size_t PLattice::index(int i, int j) const noexcept {
  return static_cast<std::size_t>(j) * count[0] + i;
}

EffectiveTable::EffectiveTable(PLattice lattice, std::vector<TableEntry> entries, double delta_min, int grid_n)
    : lattice_(lattice), entries_(std::move(entries)), delta_min_(delta_min), grid_n_(grid_n) {
  lattice_.validate();
  if (entries_.size() != lattice_.size()) throw ConfigError("table entries do not match the lattice");
}

bool EffectiveTable::complete() const { return gaps() == 0; }

std::size_t EffectiveTable::gaps() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const TableEntry& e) {
    return !e.ok || !std::isfinite(e.h_bar);
  }));
}

namespace {

// Locate t on an axis: cell index and weight, clamping to the hull.
void locate(const PLattice& l, int axis, double t, int& i0, double& w, bool& clamped) {
  const int n = l.count[axis];
  if (n == 1) {
    i0 = 0;
    w = 0.0;
    if (std::abs(t - l.lo[axis]) > 1e-12) clamped = true;
    return;
  }
  const double tol = 1e-12 * std::max(1.0, l.hi[axis] - l.lo[axis]);
  if (t < l.lo[axis] - tol || t > l.hi[axis] + tol) clamped = true;
  t = std::clamp(t, l.lo[axis], l.hi[axis]);
  const double s = (t - l.lo[axis]) / l.step(axis);
  i0 = std::min(static_cast<int>(std::floor(s)), n - 2);
  w = s - i0;
}

}  // namespace

double EffectiveTable::interpolate(const Vec& P, bool* clamped) const {
  bool c = false;
  int i0 = 0, j0 = 0;
  double wx = 0.0, wy = 0.0;
  locate(lattice_, 0, P[0], i0, wx, c);
  double out;
  if (lattice_.dim == 1) {
    const double a = entries_[i0].h_bar;
    out = wx == 0.0 ? a : (1.0 - wx) * a + wx * entries_[i0 + 1].h_bar;
  } else {
    locate(lattice_, 1, P[1], j0, wy, c);
    const int i1 = lattice_.count[0] > 1 ? i0 + 1 : i0;
    const int j1 = lattice_.count[1] > 1 ? j0 + 1 : j0;
    const double v00 = entries_[lattice_.index(i0, j0)].h_bar, v10 = entries_[lattice_.index(i1, j0)].h_bar;
    const double v01 = entries_[lattice_.index(i0, j1)].h_bar, v11 = entries_[lattice_.index(i1, j1)].h_bar;
    out = (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11);
  }
  if (clamped && c) *clamped = true;
  return out;
}

double EffectiveTable::max_slope(int axis) const {
  if (axis >= lattice_.dim || lattice_.count[axis] < 2) return 0.0;
  const double h = lattice_.step(axis);
  double s = 0.0;
  const int ni = lattice_.count[0], nj = lattice_.dim == 2 ? lattice_.count[1] : 1;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      const int i2 = axis == 0 ? i + 1 : i, j2 = axis == 1 ? j + 1 : j;
      if (i2 >= ni || j2 >= nj) continue;
      s = std::max(s, std::abs(entries_[lattice_.index(i2, j2)].h_bar - entries_[lattice_.index(i, j)].h_bar) / h);
    }
  }
  return s;
}

namespace {

// Candidate abscissae for extremizing a function that is linear between lattice nodes.
std::vector<double> candidates(const PLattice& l, int axis, double a, double b, int refine) {
  std::vector<double> c{a, b};
  for (int i = 0; i < l.count[axis]; ++i) {
    const double t = l.coordinate(axis, i);
    if (t > a && t < b) c.push_back(t);
  }
  std::sort(c.begin(), c.end());
  if (refine > 0) {
    std::vector<double> r;
    for (std::size_t s = 0; s + 1 < c.size(); ++s)
      for (int q = 0; q < refine; ++q) r.push_back(c[s] + (c[s + 1] - c[s]) * (q + 1.0) / (refine + 1.0));
    c.insert(c.end(), r.begin(), r.end());
  }
  return c;
}

}  // namespace

double EffectiveTable::godunov(const Vec& p_minus, const Vec& p_plus, bool* clamped) const {
  double a[2] = {0.0, 0.0}, b[2] = {0.0, 0.0};
  bool take_min[2] = {true, true};
  bool c = false;
  for (int k = 0; k < lattice_.dim; ++k) {
    double lo = p_minus[k], hi = p_plus[k];
    take_min[k] = lo <= hi;
    if (lo > hi) std::swap(lo, hi);
    // An infinite side carries no information; the coercive interpolant's extremum lies in the hull.
    if (std::isinf(lo)) lo = std::min(lattice_.lo[k], hi);
    if (std::isinf(hi)) hi = std::max(lattice_.hi[k], lo);
    a[k] = lo;
    b[k] = hi;
  }
  auto pick = [](bool mn, double x, double y) { return mn ? std::min(x, y) : std::max(x, y); };
  double out;
  if (lattice_.dim == 1) {
    const auto cand = candidates(lattice_, 0, a[0], b[0], 0);
    out = take_min[0] ? INFINITY : -INFINITY;
    for (double t : cand) out = pick(take_min[0], out, interpolate({t, 0.0}, &c));
  } else {
    const auto c1 = candidates(lattice_, 1, a[1], b[1], 0);
    const auto c0 = candidates(lattice_, 0, a[0], b[0], 4);
    out = take_min[0] ? INFINITY : -INFINITY;
    for (double s : c0) {
      double inner = take_min[1] ? INFINITY : -INFINITY;
      for (double t : c1) inner = pick(take_min[1], inner, interpolate({s, t}, &c));
      out = pick(take_min[0], out, inner);
    }
  }
  if (clamped && c) *clamped = true;
  return out;
}

void EffectiveTable::write_csv(std::ostream& os) const {
  os << (lattice_.dim == 1 ? "P0" : "P0,P1") << ",H_bar,err_bar,lower_cert,upper_cert,delta_min,grid_N\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& e : entries_) {
    line.str("");
    line << e.P[0] << ',';
    if (lattice_.dim == 2) line << e.P[1] << ',';
    const double hb = e.ok ? e.h_bar : NAN;
    line << hb << ',' << e.err_bar << ',' << e.lower_cert << ',' << e.upper_cert << ',' << delta_min_ << ','
         << grid_n_ << '\n';
    os << line.str();
  }
}

EffectiveTable EffectiveTable::read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("empty table file");
  int dim;
  if (header.rfind("P0,P1,", 0) == 0) {
    dim = 2;
  } else if (header.rfind("P0,", 0) == 0) {
    dim = 1;
  } else {
    throw ConfigError("table header not recognized");
  }
  std::vector<TableEntry> entries;
  double delta_min = 0.0;
  int grid_n = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(std::strtod(cell.c_str(), nullptr));
    if (static_cast<int>(f.size()) != dim + 6) throw ConfigError("table row has the wrong number of fields");
    TableEntry e;
    e.P = {f[0], dim == 2 ? f[1] : 0.0};
    e.h_bar = f[dim];
    e.err_bar = f[dim + 1];
    e.lower_cert = f[dim + 2];
    e.upper_cert = f[dim + 3];
    e.ok = std::isfinite(e.h_bar);
    if (!e.ok) e.failure = "missing sample";
    delta_min = f[dim + 4];
    grid_n = static_cast<int>(f[dim + 5]);
    entries.push_back(e);
  }
  if (entries.empty()) throw ConfigError("table has no rows");
  PLattice l;
  l.dim = dim;
  for (int a = 0; a < dim; ++a) {
    std::vector<double> v;
    for (const auto& e : entries) v.push_back(e.P[a]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    l.lo[a] = v.front();
    l.hi[a] = v.back();
    l.count[a] = static_cast<int>(v.size());
  }
  l.validate();
  if (l.size() != entries.size()) throw ConfigError("table rows do not form a full lattice");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Vec p = l.point(k);
    for (int a = 0; a < dim; ++a)
      if (std::abs(p[a] - entries[k].P[a]) > 1e-9 * std::max(1.0, std::abs(p[a])))
        throw ConfigError("table rows are not in lattice order");
  }
  return EffectiveTable(l, std::move(entries), delta_min, grid_n);
}

EffectiveTable build_table(const HamiltonianSpec& spec, const CouplingMatrix& k, const PLattice& lattice,
                           const std::vector<double>& deltas, double tol, const CellOptions& options) {
  lattice.validate();
  if (lattice.dim != spec.dim()) throw ConfigError("P-lattice and Hamiltonian dimensions differ");
  std::vector<TableEntry> entries(lattice.size());
  const TorusGrid grid(spec.dim(), options.points_per_axis);
  const long count = static_cast<long>(lattice.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long q = 0; q < count; ++q) {
    TableEntry& e = entries[q];
    e.P = lattice.point(q);
    e.lower_cert = lower_bound(spec, e.P);
    const std::vector<GridFunction> zero(spec.m(), GridFunction(grid.size(), 0.0));
    e.upper_cert = upper_certificate(spec, k, e.P, grid, zero);
    try {
      const EffectiveEstimate est = effective_at(spec, k, e.P, deltas, tol, options);
      e.h_bar = est.h_bar;
      e.err_bar = est.error_bar;
      e.upper_cert = std::min(e.upper_cert, est.finest.upper_spread);
    } catch (const std::exception& ex) {
      e.ok = false;
      e.h_bar = NAN;
      e.err_bar = NAN;
      e.failure = ex.what();
    }
  }
  return EffectiveTable(lattice, std::move(entries), deltas.empty() ? 0.0 : deltas.back(), options.points_per_axis);
}

}  // namespace hjh
