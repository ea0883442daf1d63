// Runs every acceptance criterion at its stated tolerance and prints one PASS/FAIL line each.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjh/evolution.hpp"
#include "hjh/families.hpp"
#include "hjh/presets.hpp"
#include "hjh/runner.hpp"

using namespace hjh;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  double seconds = 0.0;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "" : "!") + what);
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

struct Runs {
  std::map<std::string, RunResult> cache;

  const RunResult& get(const std::string& name, const ExperimentConfig& cfg) {
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    RunOptions o;
    o.out_dir = "acceptance_artifacts/" + name;
    auto res = run(cfg, o);
    std::fprintf(stderr, "  [%s] status %d in %.1f s\n", name.c_str(), res.status, res.seconds);
    return cache.emplace(name, std::move(res)).first->second;
  }
  const RunResult& preset_run(const std::string& name) { return get(name, preset(name)); }
};

const Verdict* find(const RunResult& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

json artifact_json(const RunResult& r, const std::string& file) {
  for (const auto& [f, bytes] : r.artifacts.files())
    if (f == file) return json::parse(bytes);
  return json();
}

void need_status(Outcome& o, const RunResult& r, const std::string& name) {
  o.require(r.status == kSuccess || r.status == kVerdictFailed, name + " ran (status " + std::to_string(r.status) + ")");
}

Outcome explicit_pair(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("example-4.1");
  need_status(o, r, "example-4.1");
  for (double P : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    std::ostringstream n;
    n << "h_bar P=" << P;
    const auto* v = find(r, n.str());
    const double err = v ? std::abs(v->value - std::abs(P)) : INFINITY;
    o.require(err <= 0.05, "|Hbar(" + fmt(P) + ") - |P|| = " + fmt(err));
  }
  const auto* c = find(r, "corrector_difference P=1");
  o.require(c && c->value <= 0.05, "corrector sup error " + (c ? fmt(c->value) : std::string("missing")));
  o.require(r.seconds <= 60.0, "runtime " + fmt(r.seconds) + " s <= 60");
  o.seconds = r.seconds;
  return o;
}

Outcome nonconvex(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("nonconvex-H0");
  need_status(o, r, "nonconvex-H0");
  const auto* v = find(r, "h_bar P=0");
  o.require(v && std::abs(v->value - 1.0) <= 0.05, "Hbar(0) = " + (v ? fmt(v->value) : std::string("missing")));
  o.require(r.seconds <= 30.0, "runtime " + fmt(r.seconds) + " s <= 30");
  o.seconds = r.seconds;
  return o;
}

Outcome rotation_pair(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("remark-4.13");
  need_status(o, r, "remark-4.13");
  const auto* h = find(r, "h_bar P=0");
  o.require(h && std::abs(h->value) <= 0.05, "Hbar(0) = " + (h ? fmt(h->value) : std::string("missing")));
  const auto* lb = find(r, "lower_bound P=0");
  const double target = -2.0 * std::numbers::pi * std::numbers::pi;
  o.require(lb && std::abs(lb->value - target) <= 1e-9, "lower_bound - (-2 pi^2) = " + (lb ? fmt(lb->value - target) : std::string("missing")));
  const auto* gap = find(r, "strict_gap P=0");
  o.require(gap && gap->pass, "strict gap Hbar - err > lower_bound");
  o.require(r.seconds <= 30.0, "runtime " + fmt(r.seconds) + " s <= 30");
  o.seconds = r.seconds;
  return o;
}

Outcome flat_wells(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("thm-4.10");
  need_status(o, r, "thm-4.10");
  const auto flat = artifact_json(r, "flat.json");
  int sampled = 0;
  double worst = 0.0, worst_cert = 0.0;
  for (const auto& pt : flat.value("points", json::array())) {
    const double P = pt.at("P")[0].get<double>();
    if (std::abs(P) > 0.05 + 1e-12) continue;
    ++sampled;
    worst = std::max(worst, std::abs(pt.at("H_bar").get<double>()));
    worst_cert = std::max(worst_cert, std::abs(pt.at("lower_cert").get<double>()));
  }
  o.require(sampled == 5, std::to_string(sampled) + " points with |P| <= 0.05");
  o.require(worst <= 0.03, "max |Hbar| = " + fmt(worst));
  o.require(worst_cert == 0.0, "lower certificate max |.| = " + fmt(worst_cert));
  o.require(r.seconds <= 120.0, "runtime " + fmt(r.seconds) + " s <= 120");
  o.seconds = r.seconds;
  return o;
}

Outcome stripe(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("thm-4.9");
  need_status(o, r, "thm-4.9");
  const auto flat = artifact_json(r, "flat.json");
  int on_axis = 0, total = 0;
  double axis_err = 0.0, below = 0.0;
  for (const auto& pt : flat.value("points", json::array())) {
    const double p1 = pt.at("P")[0].get<double>(), p2 = pt.at("P")[1].get<double>();
    const double h = pt.at("H_bar").get<double>();
    ++total;
    below = std::max(below, p1 * p1 - h);
    if (p2 == 0.0) {
      ++on_axis;
      axis_err = std::max(axis_err, std::abs(h - p1 * p1));
    }
  }
  o.require(on_axis == 3 && total == 9, std::to_string(on_axis) + " axis points of " + std::to_string(total));
  o.require(axis_err <= 0.05, "max |Hbar((P1,0)) - P1^2| = " + fmt(axis_err));
  o.require(below <= 0.05, "max (P1^2 - Hbar) = " + fmt(below));
  o.require(r.seconds <= 600.0, "runtime " + fmt(r.seconds) + " s <= 600");
  o.seconds = r.seconds;
  return o;
}

Outcome rate(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("rate-thm1.2");
  need_status(o, r, "rate-thm1.2");
  const auto* dec = find(r, "error_decreasing");
  o.require(dec && dec->pass, "E(eps) strictly decreasing");
  const auto* slope = find(r, "fitted_slope");
  o.require(slope && slope->value >= 0.28, "slope " + (slope ? fmt(slope->value) : std::string("missing")) + " >= 0.28");
  const auto* layer = find(r, "layer_constant_spread");
  o.require(layer && layer->value <= 0.5, "layer constant spread " + (layer ? fmt(layer->value) : std::string("missing")) + " <= 0.5");
  o.require(r.seconds <= 600.0, "runtime " + fmt(r.seconds) + " s <= 600");
  o.seconds = r.seconds;
  return o;
}

Outcome sandwich(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("rate-thm1.2");
  const auto* v = find(r, "barrier_sandwich eps=0.1");
  o.require(v && v->pass, "violations at eps = 0.1: " + (v ? fmt(v->value) : std::string("missing")));
  return o;
}

Outcome initial_datum(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("rate-thm1.2");
  const auto* dec = find(r, "probe_error_decreasing");
  o.require(dec && dec->pass, "max |u_i - u| at t = 0.1 decreasing");
  const auto* gap = find(r, "probe_component_gap");
  o.require(gap && gap->value <= 0.02, "component gap at eps = 0.05: " + (gap ? fmt(gap->value) : std::string("missing")) + " <= 0.02");
  return o;
}

Outcome msystem(Runs& runs) {
  Outcome o;
  const auto& r = runs.preset_run("msys-thm5.1");
  need_status(o, r, "msys-thm5.1");
  const auto* g = find(r, "pairwise_gaps_decrease");
  o.require(g && g->pass, "pairwise gaps at t = 0.1 decrease");
  const auto* x = find(r, "limit_datum_extrapolation");
  o.require(x && x->value <= 0.02, "extrapolation error " + (x ? fmt(x->value) : std::string("missing")) + " <= 0.02");
  const auto* s = find(r, "coupling_spectral_decay");
  o.require(s && s->value <= 1e-10, "spectral decay error " + (s ? fmt(s->value) : std::string("missing")) + " <= 1e-10");
  o.seconds = r.seconds;
  return o;
}

Outcome dirichlet(Runs& runs) {
  Outcome o;
  // As stated: H_i = |p| with g_1 = 1, g_2 = 0 at the left endpoint.
  auto stated = preset_json("dirichlet-thm6.1");
  stated["name"] = "dirichlet-as-stated";
  stated["params"]["hamiltonian"] =
      json::parse(R"({"dim": 1, "components": [{"family": "norm"}, {"family": "norm"}]})");
  const auto& a = runs.get("dirichlet-as-stated", parse_config(stated));
  need_status(o, a, "as stated");
  const auto* ga = find(a, "adjacent_gap eps=0.05");
  o.require(ga && ga->value <= 0.05, "as stated: gap " + (ga ? fmt(ga->value) : std::string("missing")));
  const auto& v = runs.preset_run("dirichlet-thm6.1");
  need_status(o, v, "unit-cost variant");
  const auto* gv = find(v, "adjacent_gap eps=0.05");
  o.require(gv && gv->value <= 0.05, "unit-cost variant: gap " + (gv ? fmt(gv->value) : std::string("missing")));
  o.seconds = a.seconds + v.seconds;
  return o;
}

Outcome stochastic(Runs& runs) {
  Outcome o;
  const auto& mc = runs.preset_run("mc-pure-coupling");
  need_status(o, mc, "mc-pure-coupling");
  int within = 0, total = 0;
  for (const auto& v : mc.verdicts)
    if (v.name.rfind("pure_coupling", 0) == 0) ++total, within += v.pass;
  o.require(total > 0 && within == total, "closed form within 3 s.e. at " + std::to_string(within) + "/" + std::to_string(total) + " times");
  const auto* j = find(mc, "jump_law_no_jump");
  o.require(j && j->pass, "no-jump frequency within 3 s.e.");
  const auto& dpp = runs.preset_run("dpp-prop7.2");
  need_status(o, dpp, "dpp-prop7.2");
  const auto* d = find(dpp, "dpp h_split=0.25");
  o.require(d && d->pass, "dpp at h = t/2 within 3 s.e. + 5h");
  o.seconds = mc.seconds + dpp.seconds;
  o.require(o.seconds <= 300.0, "runtime " + fmt(o.seconds) + " s <= 300");
  return o;
}

// 50 random ordered pairs of initial data on the explicit pair; the marched solutions stay ordered.
std::size_t comparison_violations() {
  const auto spec = make_hamiltonian(json::parse(
      R"({"dim": 1, "components": [{"family": "norm"}, {"family": "norm", "speed": {"name": "explicit_speed"}}]})"));
  TorusGrid g(1, 64);
  CoupledEvolution solver(EpsSystemProblem{spec, CouplingMatrix::two_state(), 0.1, g,
                                           {GridFunction(64, 0.0), GridFunction(64, 0.0)}, 0.1});
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> d(-1, 1), up(0, 0.5);
  std::size_t bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GridFunction> lo(2, GridFunction(64)), hi(2, GridFunction(64));
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 64; ++k) {
        lo[c][k] = 0.5 * d(gen);
        hi[c][k] = lo[c][k] + up(gen);
      }
    StateField u(g, lo), w(g, hi);
    for (int s = 0; s < 40; ++s) {
      u = solver.step(u, solver.max_dt());
      w = solver.step(w, solver.max_dt());
      for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 64; ++k) bad += u.components[c][k] > w.components[c][k];
    }
  }
  return bad;
}

Outcome properties(Runs& runs) {
  Outcome o;
  const auto bad = comparison_violations();
  o.require(bad == 0, "comparison: " + std::to_string(bad) + " violations over 50 trials");
  const auto& col = runs.preset_run("collapse-equal-pair");
  const auto* c = find(col, "equal_hamiltonian_collapse");
  o.require(c && c->pass && c->value <= 1e-12, "collapse worst " + (c ? fmt(c->value) : std::string("missing")));
  const auto& q = runs.preset_run("elementary-quadratic-pair");
  const auto* cv = find(q, "midpoint_convexity");
  o.require(cv && cv->pass, "midpoint convexity within 2 err_bar");
  const auto* mx = find(q, "max_comparison");
  o.require(mx && mx->pass, "Hbar <= Kbar + 0.05, worst " + (mx ? fmt(mx->value) : std::string("missing")));
  const auto& ex = runs.preset_run("example-4.1");
  const auto* h = find(ex, "degree_one_homogeneity");
  o.require(h && h->pass, "degree-one homogeneity within 0.05");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome(Runs&)>>> criteria{
      {"explicit_effective_hamiltonian", explicit_pair},
      {"nonconvex_cell_value", nonconvex},
      {"counterexample_strict_gap", rotation_pair},
      {"flat_part_interval_wells", flat_wells},
      {"nonflat_stripe", stripe},
      {"rate_of_convergence", rate},
      {"barrier_sandwich", sandwich},
      {"effective_initial_datum", initial_datum},
      {"m_system_common_limit", msystem},
      {"dirichlet_effective_datum", dirichlet},
      {"stochastic_representation", stochastic},
      {"property_suites", properties},
  };
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));

  Runs runs;
  int failed = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const int id = static_cast<int>(n + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[n].second(runs);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    for (const auto& s : out.notes) detail += (detail.empty() ? "" : "; ") + s;
    std::printf("%s %2d %-32s %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, criteria[n].first.c_str(), detail.c_str(),
                wall);
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
