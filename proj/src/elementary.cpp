#include "hjh/elementary.hpp"

#include <algorithm>
#include <cmath>

#include "hjh/errors.hpp"

namespace hjh {

ElementaryMetadata metadata_for(const HamiltonianSpec& spec) {
  ElementaryMetadata m;
  m.convex = m.homogeneous = true;
  for (int i = 0; i < spec.m(); ++i) {
    m.convex = m.convex && spec.convex_in_p(i);
    m.homogeneous = m.homogeneous && spec.homogeneous_degree_one(i);
  }
  return m;
}

bool ElementaryReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.applicable || c.pass; });
}

const CheckResult& ElementaryReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ConfigError("no elementary check named " + name);
}

namespace {

struct View {
  const EffectiveTable& t;
  int nx() const { return t.lattice().count[0]; }
  int ny() const { return t.lattice().dim == 2 ? t.lattice().count[1] : 1; }
  bool inside(int i, int j) const { return i >= 0 && i < nx() && j >= 0 && j < ny(); }
  const TableEntry& at(int i, int j) const { return t.at(i, j); }
};

void record(CheckResult& c, double violation) {
  ++c.count;
  if (c.count == 1 || violation > c.worst) c.worst = violation;
  if (violation > 0.0) c.pass = false;
}

}  // namespace

ElementaryReport run_elementary_checks(const EffectiveTable& table, const ElementaryMetadata& meta) {
  const View v{table};
  const auto& lat = table.lattice();
  ElementaryReport rep;

  CheckResult coercive{"coercivity", true};
  {
    // Lattice point closest to P = 0.
    int oi = 0, oj = 0;
    double best = INFINITY;
    for (int j = 0; j < v.ny(); ++j)
      for (int i = 0; i < v.nx(); ++i) {
        const double r = norm(lat.point(lat.index(i, j)), lat.dim);
        if (r < best) best = r, oi = i, oj = j;
      }
    const auto& o = v.at(oi, oj);
    for (int j = 0; j < v.ny(); ++j)
      for (int i = 0; i < v.nx(); ++i) {
        const bool edge = i == 0 || i == v.nx() - 1 || (lat.dim == 2 && (j == 0 || j == v.ny() - 1));
        const auto& e = v.at(i, j);
        if (!edge || !e.ok || !o.ok) continue;
        record(coercive, o.h_bar - e.h_bar - meta.coercivity_slack);
      }
  }
  rep.checks.push_back(coercive);

  CheckResult convex{"midpoint_convexity", meta.convex};
  if (meta.convex) {
    std::vector<std::array<int, 2>> dirs{{1, 0}};
    if (lat.dim == 2) dirs.insert(dirs.end(), {{0, 1}, {1, 1}, {1, -1}});
    for (int j = 0; j < v.ny(); ++j)
      for (int i = 0; i < v.nx(); ++i)
        for (const auto& d : dirs)
          for (int s = 1;; ++s) {
            const int ai = i - s * d[0], aj = j - s * d[1], bi = i + s * d[0], bj = j + s * d[1];
            if (!v.inside(ai, aj) || !v.inside(bi, bj)) break;
            const auto &a = v.at(ai, aj), &m = v.at(i, j), &b = v.at(bi, bj);
            if (!a.ok || !m.ok || !b.ok) continue;
            const double slack = meta.convexity_factor * std::max({a.err_bar, m.err_bar, b.err_bar});
            record(convex, m.h_bar - 0.5 * (a.h_bar + b.h_bar) - slack);
          }
  }
  rep.checks.push_back(convex);

  CheckResult collapse{"equal_hamiltonian_collapse", meta.single != nullptr};
  if (meta.single) {
    const auto& other = *meta.single;
    if (other.entries().size() != table.entries().size()) throw ConfigError("collapse table has a different lattice");
    for (std::size_t k = 0; k < table.entries().size(); ++k) {
      const auto &a = table.entries()[k], &b = other.entries()[k];
      if (!a.ok || !b.ok) continue;
      record(collapse, std::abs(a.h_bar - b.h_bar) - meta.collapse_tol);
    }
  }
  rep.checks.push_back(collapse);

  CheckResult homog{"degree_one_homogeneity", meta.homogeneous};
  if (meta.homogeneous) {
    for (std::size_t k = 0; k < table.entries().size(); ++k) {
      const auto& e = table.entries()[k];
      if (!e.ok) continue;
      // Locate 2P on the lattice.
      int idx[2] = {0, 0};
      bool on = true;
      for (int a = 0; a < lat.dim; ++a) {
        const double f = (2.0 * e.P[a] - lat.lo[a]) / lat.step(a);
        idx[a] = static_cast<int>(std::lround(f));
        on = on && std::abs(f - idx[a]) < 1e-9 && idx[a] >= 0 && idx[a] < lat.count[a];
      }
      if (!on) continue;
      const auto& d = v.at(idx[0], idx[1]);
      if (!d.ok) continue;
      record(homog, std::abs(d.h_bar - 2.0 * e.h_bar) - meta.homogeneity_tol);
    }
  }
  rep.checks.push_back(homog);

  CheckResult maxc{"max_comparison", meta.max_table != nullptr};
  if (meta.max_table) {
    const auto& other = *meta.max_table;
    if (other.entries().size() != table.entries().size()) throw ConfigError("max table has a different lattice");
    for (std::size_t k = 0; k < table.entries().size(); ++k) {
      const auto &a = table.entries()[k], &b = other.entries()[k];
      if (!a.ok || !b.ok) continue;
      record(maxc, a.h_bar - b.h_bar - meta.max_tol);
    }
  }
  rep.checks.push_back(maxc);
  return rep;
}

HamiltonianSpec max_hamiltonian(const HamiltonianSpec& spec) {
  const auto& first = spec.component(0);
  bool same_speed = true, same_potential = true;
  for (const auto& c : spec.components()) {
    if (c.profile != first.profile) throw ConfigError("max Hamiltonian needs a common profile");
    same_speed = same_speed && c.speed.is_constant && first.speed.is_constant &&
                 c.speed.constant_value == first.speed.constant_value;
    same_potential = same_potential && c.potential.is_constant && first.potential.is_constant &&
                     c.potential.constant_value == first.potential.constant_value;
  }
  Component k;
  k.profile = first.profile;
  const auto comps = spec.components();
  if (same_speed) {
    // a F - V is largest where V is smallest.
    k.speed = first.speed;
    k.potential.name = "min_potential";
    k.potential.is_constant = false;
    k.potential.fn = [comps](const Vec& xi) {
      double out = INFINITY;
      for (const auto& c : comps) out = std::min(out, c.potential(xi));
      return out;
    };
  } else if (same_potential) {
    // Every profile is nonnegative, so a F is largest where a is largest.
    k.potential = first.potential;
    k.speed.name = "max_speed";
    k.speed.is_constant = false;
    k.speed.fn = [comps](const Vec& xi) {
      double out = -INFINITY;
      for (const auto& c : comps) out = std::max(out, c.speed(xi));
      return out;
    };
  } else {
    throw ConfigError("max Hamiltonian needs a common speed or a common constant potential");
  }
  return HamiltonianSpec(spec.dim(), {k});
}

nlohmann::json to_json(const ElementaryReport& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : r.checks)
    j.push_back({{"name", c.name}, {"applicable", c.applicable}, {"pass", c.pass}, {"worst", c.worst}, {"count", c.count}});
  return j;
}

}  // namespace hjh
