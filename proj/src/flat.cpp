#include "hjh/flat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjh/errors.hpp"
#include "hjh/families.hpp"

namespace hjh {

const char* to_string(FlatKind k) {
  switch (k) {
    case FlatKind::nested_wells: return "nested_wells";
    case FlatKind::stripe: return "stripe";
    case FlatKind::interval_wells: return "interval_wells";
    case FlatKind::single_well: return "single_well";
    case FlatKind::contained_well: return "contained_well";
    case FlatKind::product_wells: return "product_wells";
  }
  return "?";
}

const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::flat_zero: return "flat_zero";
    case Prediction::stripe_square: return "stripe_square";
    case Prediction::product_flat: return "product_flat";
  }
  return "?";
}

namespace {

constexpr double kZero = 1e-12;
constexpr int kAudit1d = 4096;
constexpr int kAudit2d = 256;

Component well(Coefficient v) {
  Component c;
  c.potential = std::move(v);
  return c;
}

std::vector<Vec> line_samples(std::initializer_list<double> ps) {
  std::vector<Vec> out;
  for (double p : ps) out.push_back({p, 0.0});
  return out;
}

// Potential values on the audit grid (k / n per axis).
std::vector<double> potential_on_grid(const HamiltonianSpec& spec, int i, int n) {
  std::vector<double> out;
  const int rows = spec.dim() == 1 ? 1 : n;
  out.reserve(static_cast<std::size_t>(n) * rows);
  const auto& v = spec.component(i).potential;
  for (int b = 0; b < rows; ++b)
    for (int a = 0; a < n; ++a) out.push_back(v({static_cast<double>(a) / n, static_cast<double>(b) / n}));
  return out;
}

bool in_closed(double t, Interval I) { return t >= I.lo && t <= I.hi; }
bool in_open(double t, Interval I) { return t > I.lo && t < I.hi; }

// {|v - level| <= kZero} coincides with the points where member(t) holds.
bool level_set_is(const std::vector<double>& v, double level, int n, auto member) {
  for (int k = 0; k < n; ++k) {
    const bool on = std::abs(v[k] - level) <= kZero;
    if (on != member(static_cast<double>(k) / n)) return false;
  }
  return true;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void push(std::vector<HypothesisCheck>& out, std::string name, bool ok, double value = 0.0) {
  out.push_back({std::move(name), ok, value});
}

double psi(const FlatExperiment& e, double t) {
  if (t <= e.w2.lo || t >= e.w2.hi) return 0.0;
  if (t >= e.w1.lo && t <= e.w1.hi) return 1.0;
  if (t < e.w1.lo) return coeff::smootherstep((t - e.w2.lo) / (e.w1.lo - e.w2.lo));
  return coeff::smootherstep((e.w2.hi - t) / (e.w2.hi - e.w1.hi));
}

double nested_center(const FlatExperiment& e) { return 0.5 * (e.w1.lo + e.w1.hi); }

// sup over the cell of |1 - psi - (xi - c) psi'|, the factor multiplying |P| in |P + D phi|.
double nested_slope_factor(const FlatExperiment& e) {
  const int n = 1 << 16;
  const double c = nested_center(e), h = 1e-7;
  double out = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const double d = (psi(e, std::min(t + h, 1.0)) - psi(e, std::max(t - h, 0.0))) / (std::min(t + h, 1.0) - std::max(t - h, 0.0));
    out = std::max(out, std::abs(1.0 - psi(e, t) - (t - c) * d));
  }
  return out;
}

double nested_eps0(const FlatExperiment& e) {
  double out = INFINITY;
  for (int i = 0; i < e.spec.m(); ++i) {
    const auto v = potential_on_grid(e.spec, i, kAudit1d);
    for (int k = 0; k < kAudit1d; ++k)
      if (!in_open(static_cast<double>(k) / kAudit1d, e.w1)) out = std::min(out, v[k]);
  }
  return out;
}

}  // namespace

FlatExperiment interval_wells_experiment(double eps0) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ConfigError("eps0 must lie in (0, 1)");
  FlatExperiment e{"interval_wells",
                   FlatKind::interval_wells,
                   Prediction::flat_zero,
                   HamiltonianSpec(1, {well(coeff::interval_well(4 / 16.0, 12 / 16.0, 3 / 16.0, 13 / 16.0, 0.0, -eps0)),
                                       well(coeff::interval_well(7 / 16.0, 9 / 16.0, 6 / 16.0, 10 / 16.0, 0.0, 2.0))}),
                   line_samples({0.0, 0.02, -0.02, 0.05, -0.05})};
  e.eps0 = eps0;
  e.zero_sets = {{4 / 16.0, 12 / 16.0}, {7 / 16.0, 9 / 16.0}};
  return e;
}

FlatExperiment nested_wells_experiment() {
  FlatExperiment e{"nested_wells",
                   FlatKind::nested_wells,
                   Prediction::flat_zero,
                   HamiltonianSpec(1, {well(coeff::interval_well(0.40, 0.50, 0.36, 0.54, 0.0, 1.0)),
                                       well(coeff::interval_well(0.45, 0.60, 0.41, 0.64, 0.0, 1.0))}),
                   line_samples({0.0, 0.05, -0.05, 0.1, -0.1, 0.2, -0.2})};
  e.zero_sets = {{0.40, 0.50}, {0.45, 0.60}};
  e.w1 = {0.35, 0.65};
  e.w2 = {0.25, 0.75};
  return e;
}

FlatExperiment stripe_experiment(double b1, double b2) {
  return {"stripe",
          FlatKind::stripe,
          Prediction::stripe_square,
          HamiltonianSpec(2, {well(coeff::stripe_well(b1)), well(coeff::stripe_well(b2))}),
          {{0.0, 0.0}, {0.25, 0.0}, {0.5, 0.0}, {0.0, 0.25}, {0.25, 0.25}, {0.5, 0.25}, {0.0, 0.5}, {0.25, 0.5}, {-0.5, 0.5}},
          0.05};
}

FlatExperiment single_well_experiment() {
  return {"single_well",
          FlatKind::single_well,
          Prediction::flat_zero,
          HamiltonianSpec(1, {well(Coefficient::constant(0.0)), well(coeff::cosine_well(0, 0.5))}),
          line_samples({0.0, 0.05, -0.05, 0.1, -0.1, 0.2})};
}

FlatExperiment contained_well_experiment(bool arbitrary_first) {
  FlatExperiment e{arbitrary_first ? "contained_well_arbitrary" : "contained_well",
                   FlatKind::contained_well,
                   Prediction::flat_zero,
                   HamiltonianSpec(2, {well(arbitrary_first ? coeff::cosine_well(0, 0.5) : Coefficient::constant(0.0)),
                                       well(coeff::disk_well({0.5, 0.5}, 0.1, 0.2, 0.0, 1.0))}),
                   {{0.0, 0.0}, {0.05, 0.0}, {0.05, 0.05}, {0.0, -0.05}}};
  e.well_center = {0.5, 0.5};
  e.window_radius = 0.15;
  return e;
}

FlatExperiment product_wells_experiment() {
  return {"product_wells",
          FlatKind::product_wells,
          Prediction::product_flat,
          HamiltonianSpec(2, {well(coeff::cosine_well(0, 0.5)), well(coeff::cosine_well(1, 0.5))}),
          {{0.0, 0.0}, {0.05, 0.0}, {0.05, 0.05}, {-0.05, 0.05}}};
}

std::vector<HypothesisCheck> audit_hypotheses(const FlatExperiment& e) {
  std::vector<HypothesisCheck> out;
  const auto& spec = e.spec;
  if (spec.m() != 2) {
    push(out, "two components", false, spec.m());
    return out;
  }
  bool sep = true;
  for (int i = 0; i < 2; ++i) sep = sep && spec.separable(i);
  push(out, "components are |p|^2 - V_i", sep);

  if (spec.dim() == 1) {
    const int n = kAudit1d;
    const auto v1 = potential_on_grid(spec, 0, n), v2 = potential_on_grid(spec, 1, n);
    switch (e.kind) {
      case FlatKind::interval_wells: {
        const double eps0 = e.eps0;
        push(out, "-eps0 <= V_1 <= 0", min_of(v1) >= -eps0 - kZero && max_of(v1) <= kZero, min_of(v1));
        push(out, "{V_1 = 0} = [4/16, 12/16]", level_set_is(v1, 0.0, n, [](double t) { return in_closed(t, {4 / 16.0, 12 / 16.0}); }));
        push(out, "{V_1 = -eps0} = [0,1] \\ (3/16, 13/16)",
             level_set_is(v1, -eps0, n, [](double t) { return !in_open(t, {3 / 16.0, 13 / 16.0}); }));
        push(out, "0 <= V_2 <= 2", min_of(v2) >= -kZero && max_of(v2) <= 2.0 + kZero, max_of(v2));
        push(out, "{V_2 = 0} = [7/16, 9/16]", level_set_is(v2, 0.0, n, [](double t) { return in_closed(t, {7 / 16.0, 9 / 16.0}); }));
        push(out, "{V_2 = 2} = [0,1] \\ (6/16, 10/16)",
             level_set_is(v2, 2.0, n, [](double t) { return !in_open(t, {6 / 16.0, 10 / 16.0}); }));
        std::vector<double> sum(n);
        for (int k = 0; k < n; ++k) sum[k] = v1[k] + v2[k];
        push(out, "min (V_1 + V_2) = 0", std::abs(min_of(sum)) <= kZero, min_of(sum));
        break;
      }
      case FlatKind::nested_wells: {
        if (e.zero_sets.size() != 2) throw ConfigError("nested_wells needs two zero sets");
        const Interval U1 = e.zero_sets[0], U2 = e.zero_sets[1];
        push(out, "V_1 >= 0", min_of(v1) >= -kZero, min_of(v1));
        push(out, "V_2 >= 0", min_of(v2) >= -kZero, min_of(v2));
        push(out, "{V_1 = 0} = U_1", level_set_is(v1, 0.0, n, [&](double t) { return in_closed(t, U1); }));
        push(out, "{V_2 = 0} = U_2", level_set_is(v2, 0.0, n, [&](double t) { return in_closed(t, U2); }));
        push(out, "U_1 meets U_2", std::max(U1.lo, U2.lo) <= std::min(U1.hi, U2.hi));
        const double d_inner = std::min(std::min(U1.lo, U2.lo) - e.w1.lo, e.w1.hi - std::max(U1.hi, U2.hi));
        const double d_outer = std::min(e.w1.lo - e.w2.lo, e.w2.hi - e.w1.hi);
        push(out, "dist(U_1 u U_2, boundary of W_1) > 0", d_inner > 0.0, d_inner);
        push(out, "dist(W_1, boundary of W_2) > 0", d_outer > 0.0, d_outer);
        push(out, "W_2 compactly inside (0, 1)", e.w2.lo > 0.0 && e.w2.hi < 1.0);
        const double eps0 = nested_eps0(e);
        push(out, "V_i >= eps0 > 0 off W_1", eps0 > kZero, eps0);
        break;
      }
      case FlatKind::single_well: {
        push(out, "V_1 = 0", std::max(std::abs(min_of(v1)), std::abs(max_of(v1))) <= kZero);
        push(out, "V_2 >= 0", min_of(v2) >= -kZero, min_of(v2));
        push(out, "{V_2 = 0} = {1/2}", level_set_is(v2, 0.0, n, [](double t) { return t == 0.5; }));
        break;
      }
      default: push(out, std::string("construction is one-dimensional: ") + to_string(e.kind), false);
    }
    return out;
  }

  const int n = kAudit2d;
  const auto v1 = potential_on_grid(spec, 0, n), v2 = potential_on_grid(spec, 1, n);
  auto coord = [n](int k) { return Vec{static_cast<double>(k % n) / n, static_cast<double>(k / n) / n}; };
  auto zero_set_is = [&](const std::vector<double>& v, auto member) {
    for (int k = 0; k < n * n; ++k)
      if ((std::abs(v[k]) <= kZero) != member(coord(k))) return false;
    return true;
  };
  auto zeros = [&](const std::vector<double>& v) {
    std::vector<Vec> z;
    for (int k = 0; k < n * n; ++k)
      if (std::abs(v[k]) <= kZero) z.push_back(coord(k));
    return z;
  };
  push(out, "V_1 >= 0", min_of(v1) >= -kZero, min_of(v1));
  push(out, "V_2 >= 0", min_of(v2) >= -kZero, min_of(v2));
  switch (e.kind) {
    case FlatKind::stripe: {
      auto stripe = [](const Vec& x) { return x[1] == 0.5; };
      push(out, "{V_1 = 0} = {xi_2 = 1/2}", zero_set_is(v1, stripe));
      push(out, "{V_2 = 0} = {xi_2 = 1/2}", zero_set_is(v2, stripe));
      break;
    }
    case FlatKind::contained_well: {
      const auto z2 = zeros(v2);
      push(out, "{V_2 = 0} nonempty", !z2.empty(), static_cast<double>(z2.size()));
      double reach = 0.0;
      for (const auto& x : z2) reach = std::max(reach, std::hypot(x[0] - e.well_center[0], x[1] - e.well_center[1]));
      push(out, "{V_2 = 0} inside W", reach < e.window_radius, reach);
      bool meet = false;
      for (int k = 0; k < n * n; ++k) meet = meet || (std::abs(v1[k]) <= kZero && std::abs(v2[k]) <= kZero);
      push(out, "{V_1 = 0} meets {V_2 = 0}", meet);
      const bool inside = e.well_center[0] - e.window_radius > 0.0 && e.well_center[0] + e.window_radius < 1.0 &&
                          e.well_center[1] - e.window_radius > 0.0 && e.well_center[1] + e.window_radius < 1.0;
      push(out, "W compactly inside (0, 1)^2", inside);
      break;
    }
    case FlatKind::product_wells: {
      double dep1 = 0.0, dep2 = 0.0;
      for (int k = 0; k < n * n; ++k) {
        dep1 = std::max(dep1, std::abs(v1[k] - v1[k % n]));
        dep2 = std::max(dep2, std::abs(v2[k] - v2[(k / n) * n]));
      }
      push(out, "V_1 depends on xi_1 only", dep1 <= kZero, dep1);
      push(out, "V_2 depends on xi_2 only", dep2 <= kZero, dep2);
      int zeros1 = 0, zeros2 = 0;
      for (int a = 0; a < n; ++a) {
        zeros1 += std::abs(v1[a]) <= kZero;
        zeros2 += std::abs(v2[static_cast<std::size_t>(a) * n]) <= kZero;
      }
      push(out, "V^1 has a single zero", zeros1 == 1, zeros1);
      push(out, "V^2 has a single zero", zeros2 == 1, zeros2);
      break;
    }
    default: push(out, std::string("construction is two-dimensional: ") + to_string(e.kind), false);
  }
  return out;
}

FlatSolverConfig default_flat_config(const FlatExperiment& exp) {
  FlatSolverConfig c;
  if (exp.spec.dim() == 1) {
    c.cell.points_per_axis = 256;
  } else {
    c.cell.points_per_axis = exp.kind == FlatKind::stripe ? 128 : 64;
    c.tol = 1e-5;
  }
  return c;
}

GridFunction nested_wells_subsolution(const FlatExperiment& exp, double P, const TorusGrid& grid) {
  if (exp.kind != FlatKind::nested_wells || grid.dim() != 1) throw ConfigError("subsolution needs the 1D nested-wells experiment");
  const double c = nested_center(exp);
  GridFunction phi(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.point(k)[0];
    phi[k] = -P * (t - c) * psi(exp, t);
  }
  return phi;
}

SubsolutionCheck check_nested_wells_subsolution(const FlatExperiment& exp, const TorusGrid& grid,
                                                const std::vector<double>& fractions) {
  SubsolutionCheck out;
  out.gamma = std::sqrt(nested_eps0(exp)) / nested_slope_factor(exp);
  const auto K = CouplingMatrix::two_state();
  out.ok = true;
  for (double f : fractions) {
    for (double sign : {1.0, -1.0}) {
      if (f == 0.0 && sign < 0.0) continue;
      const double P = sign * f * out.gamma;
      const auto phi = nested_wells_subsolution(exp, P, grid);
      const double cert = upper_certificate(exp.spec, K, {P, 0.0}, grid, {phi, phi});
      out.P.push_back({P, 0.0});
      out.certificate.push_back(cert);
      out.ok = out.ok && cert <= 1e-9;
    }
  }
  return out;
}

FlatVerdict run_flat_experiment(const FlatExperiment& exp, const FlatSolverConfig& config) {
  FlatVerdict v;
  v.name = exp.name;
  v.prediction = exp.prediction;
  v.hypotheses = audit_hypotheses(exp);
  for (const auto& h : v.hypotheses)
    if (!h.ok) {
      std::ostringstream os;
      os << exp.name << ": hypothesis failed: " << h.name << " (value " << h.value << ")";
      throw ConfigError(os.str());
    }
  if (exp.samples.empty()) throw ConfigError("experiment has no P samples");
  const auto K = CouplingMatrix::two_state();
  const int dim = exp.spec.dim();
  const TorusGrid grid(dim, config.cell.points_per_axis);
  const std::vector<GridFunction> zero(2, GridFunction(grid.size(), 0.0));
  for (const Vec& P : exp.samples) {
    const auto est = effective_at(exp.spec, K, P, config.deltas, config.tol, config.cell);
    FlatPoint pt;
    pt.P = P;
    pt.h_bar = est.h_bar;
    pt.err_bar = est.error_bar;
    pt.lower_cert = lower_bound(exp.spec, P);
    pt.upper_cert = std::min(upper_certificate(exp.spec, K, P, grid, zero), est.finest.upper_spread);
    if (exp.prediction == Prediction::stripe_square) {
      pt.predicted = P[0] * P[0];
      pt.pass = P[1] == 0.0 ? std::abs(pt.h_bar - pt.predicted) <= exp.tolerance : pt.h_bar >= pt.predicted - exp.tolerance;
    } else {
      pt.predicted = 0.0;
      pt.pass = std::abs(pt.h_bar) <= exp.tolerance;
    }
    v.points.push_back(pt);
  }
  // Largest sampled radius r such that every sample within r meets the prediction (for the stripe,
  // the radius is |P_2| and the prediction is the equality H = P_1^2).
  auto radius = [&](const Vec& P) { return exp.prediction == Prediction::stripe_square ? std::abs(P[1]) : norm(P, dim); };
  auto holds = [&](const FlatPoint& p) {
    return exp.prediction == Prediction::stripe_square ? std::abs(p.h_bar - p.predicted) <= exp.tolerance : p.pass;
  };
  std::vector<double> radii;
  for (const auto& p : v.points) radii.push_back(radius(p.P));
  std::sort(radii.begin(), radii.end());
  v.gamma_scan = 0.0;
  for (double r : radii) {
    bool all = true;
    for (const auto& p : v.points)
      if (radius(p.P) <= r && !holds(p)) all = false;
    if (!all) break;
    v.gamma_scan = r;
  }
  bool all_pass = true;
  for (const auto& p : v.points) all_pass = all_pass && p.pass;
  if (exp.kind == FlatKind::nested_wells) {
    v.has_subsolution = true;
    v.subsolution = check_nested_wells_subsolution(exp, grid);
  }
  v.pass = all_pass && v.gamma_scan > 0.0 && (!v.has_subsolution || v.subsolution.ok);
  return v;
}

nlohmann::json to_json(const FlatVerdict& v) {
  nlohmann::json j;
  j["name"] = v.name;
  j["prediction"] = to_string(v.prediction);
  for (const auto& h : v.hypotheses) j["hypotheses"].push_back({{"name", h.name}, {"ok", h.ok}, {"value", h.value}});
  for (const auto& p : v.points)
    j["points"].push_back({{"P", {p.P[0], p.P[1]}},
                           {"H_bar", p.h_bar},
                           {"err_bar", p.err_bar},
                           {"lower_cert", p.lower_cert},
                           {"upper_cert", p.upper_cert},
                           {"predicted", p.predicted},
                           {"pass", p.pass}});
  j["gamma_scan"] = v.gamma_scan;
  if (v.has_subsolution) {
    nlohmann::json s;
    s["gamma"] = v.subsolution.gamma;
    for (std::size_t k = 0; k < v.subsolution.P.size(); ++k)
      s["checks"].push_back({{"P", v.subsolution.P[k][0]}, {"certificate", v.subsolution.certificate[k]}});
    s["ok"] = v.subsolution.ok;
    j["subsolution"] = s;
  }
  j["verdict"] = v.pass ? "pass" : "fail";
  return j;
}

std::vector<std::string> flat_experiment_names() {
  return {"interval_wells", "nested_wells", "stripe", "single_well", "contained_well", "contained_well_arbitrary",
          "product_wells"};
}

FlatExperiment flat_experiment(const std::string& name, double eps0) {
  if (name == "interval_wells") return interval_wells_experiment(eps0);
  if (name == "nested_wells") return nested_wells_experiment();
  if (name == "stripe") return stripe_experiment();
  if (name == "single_well") return single_well_experiment();
  if (name == "contained_well") return contained_well_experiment(false);
  if (name == "contained_well_arbitrary") return contained_well_experiment(true);
  if (name == "product_wells") return product_wells_experiment();
  throw ConfigError("unknown flat experiment '" + name + "'");
}

}  // namespace hjh
