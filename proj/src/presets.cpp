#include "hjh/presets.hpp"

#include "hjh/errors.hpp"

namespace hjh {

namespace {

struct Entry {
  const char* name;
  const char* summary;
  const char* body;
};

// H_1 = |p|, H_2 = a(xi)|p| with the explicit speed; Hbar(P) = |P|.
#define HJH_A_PAIR R"({"dim": 1, "components": [{"family": "norm"}, {"family": "norm", "speed": {"name": "explicit_speed"}}]})"
// Same pair with unit running cost: H_i = a_i(xi)|p| - 1.
#define HJH_A_PAIR_COST \
  R"({"dim": 1, "components": [{"family": "norm", "potential": 1}, {"family": "norm", "speed": {"name": "explicit_speed"}, "potential": 1}]})"

const Entry kPresets[] = {
    {"example-4.1", "explicit pair a(xi)|p|: table with Hbar(P) = |P| and the closed-form corrector difference",
     R"({"kind": "table", "params": {
          "hamiltonian": )" HJH_A_PAIR R"(,
          "table": {"N": 512, "lattice": {"lo": -2, "hi": 2, "count": 9}, "deltas": [0.08, 0.04, 0.02], "tol": 1e-7},
          "expect": [{"P": -2, "value": 2}, {"P": -1, "value": 1}, {"P": -0.5, "value": 0.5},
                     {"P": 0.5, "value": 0.5}, {"P": 1, "value": 1}, {"P": 2, "value": 2}],
          "corrector": {"P": 1, "tol": 0.05}}})"},
    {"nonconvex-H0", "double-well pair (|p|^2 - 1)^2: Hbar(0) = 1",
     R"({"kind": "cell", "params": {
          "hamiltonian": {"dim": 1, "components": [{"family": "double_well"}, {"family": "double_well"}]},
          "N": 256, "P": [0], "expect": [{"P": 0, "value": 1, "tol": 0.05}]}})"},
    {"remark-4.13", "rotation-well pair: Hbar(0) = 0 strictly above the potential-sum bound -2 pi^2",
     R"({"kind": "cell", "params": {
          "hamiltonian": {"dim": 1, "components": [
            {"family": "quadratic", "potential": {"name": "rotation_well", "index": 1}},
            {"family": "quadratic", "potential": {"name": "rotation_well", "index": 2}}]},
          "N": 256, "P": [0], "expect": [{"P": 0, "value": 0, "tol": 0.05}],
          "lower_bound": {"P": 0, "value": -19.739208802178716, "tol": 1e-9}, "strict_gap": true}})"},
    {"thm-4.8", "nested interval wells: flat part with the explicit subsolution certificate",
     R"({"kind": "flat", "params": {"experiment": "nested_wells"}})"},
    {"thm-4.9", "2D stripe wells: Hbar((P1, 0)) = P1^2 and Hbar(P) >= P1^2",
     R"({"kind": "flat", "params": {"experiment": "stripe"}})"},
    {"thm-4.10", "interval wells with eps0 = 0.05: Hbar = 0 near P = 0 with a zero lower certificate",
     R"({"kind": "flat", "params": {"experiment": "interval_wells", "eps0": 0.05}})"},
    {"thm-4.12", "first potential identically zero, second a single well: flat near P = 0",
     R"({"kind": "flat", "params": {"experiment": "single_well"}})"},
    {"thm-4.13", "2D well contained in a disk window: flat near P = 0",
     R"({"kind": "flat", "params": {"experiment": "contained_well"}})"},
    {"thm-4.14", "2D product wells V(xi_1), V(xi_2): flat near P = 0",
     R"({"kind": "flat", "params": {"experiment": "product_wells"}})"},
    {"rate-thm1.2", "a(xi) pair, f = (sin 2 pi x, 0), T = 0.5: error sweep over eps with fitted slope",
     R"({"kind": "rate", "params": {
          "hamiltonian": )" HJH_A_PAIR R"(,
          "initial": [{"name": "sine"}, "zero"], "epsilons": [0.2, 0.1, 0.05], "horizon": 0.5, "eps_cells": 32,
          "probe_time": 0.1,
          "table": {"N": 128, "lattice": {"lo": -4, "hi": 4, "count": 17}},
          "expect": {"min_slope": 0.28, "layer_spread": 0.5, "sandwich_eps": 0.1, "probe_gap": 0.02}}})"},
    {"layer-prop3.1", "initial-layer window error against eps |log eps| on the a(xi) pair",
     R"({"kind": "rate", "params": {
          "hamiltonian": )" HJH_A_PAIR R"(,
          "initial": [{"name": "sine"}, "zero"], "epsilons": [0.2, 0.1, 0.05], "horizon": 0.5, "eps_cells": 32,
          "table": {"N": 128, "lattice": {"lo": -4, "hi": 4, "count": 17}},
          "layer_only": true}})"},
    {"dirichlet-thm6.1", "interval Dirichlet problem with g_1 = 1, g_2 = 0 on the left: effective datum min(g_1, g_2)",
     R"({"kind": "dirichlet", "params": {
          "hamiltonian": )" HJH_A_PAIR_COST R"(,
          "epsilons": [0.2, 0.1, 0.05], "lo": 0, "hi": 1, "eps_cells": 32,
          "boundary": [[1, 1], [0, 1]], "tol": 1e-8,
          "table": {"N": 128, "lattice": {"lo": -3, "hi": 3, "count": 25}},
          "side": "left", "gap_tol": 0.05}})"},
    {"msys-thm5.1", "three-state doubly stochastic system: common limit with datum (f_1 + f_2 + f_3)/3",
     R"({"kind": "evolve", "params": {
          "hamiltonian": {"dim": 1, "components": [{"family": "norm"},
            {"family": "norm", "speed": {"name": "explicit_speed"}}, {"family": "norm", "speed": 0.5}]},
          "coupling": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]],
          "initial": [{"name": "sine"}, "zero", {"name": "cosine", "amplitude": 0.5}],
          "epsilons": [0.2, 0.1, 0.05], "eps_cells": 32, "horizon": 0.1, "times": [0, 0.025, 0.05, 0.1],
          "common_limit": {"probe_time": 0.1, "fit_times": [0.025, 0.05, 0.1], "tol": 0.02}}})"},
    {"dpp-prop7.2", "dynamic programming split on a quadratic pair with PDE feedback",
     R"({"kind": "dpp", "seed": 11, "params": {
          "hamiltonian": {"dim": 1, "components": [{"family": "quadratic"},
            {"family": "quadratic", "speed": 0.5, "potential": {"name": "cosine_well", "axis": 0, "center": 0.5}}]},
          "initial": [{"name": "sine"}, "zero"], "epsilon": 0.1, "x": 0.2, "t": 0.5, "h_split": [0, 0.25, 0.5],
          "paths": 10000, "N": 256, "snapshots": 50}})"},
    {"mc-pure-coupling", "pure switching: Monte Carlo value against the propagator and the jump law",
     R"({"kind": "mc", "seed": 7, "params": {
          "hamiltonian": {"dim": 1, "components": [{"family": "zero"}, {"family": "zero"}]},
          "initial": [{"name": "sine"}, "zero"], "epsilon": 0.1, "x": 0.2, "times": [0.05, 0.1, 0.2],
          "paths": 100000, "closed_form": true, "jump_horizon": 0.1}})"},
    {"mc-effective-a-pair", "unit-scale control estimate of Hbar on the explicit pair",
     R"({"kind": "mc", "seed": 3, "params": {
          "hamiltonian": )" HJH_A_PAIR R"(,
          "initial": ["zero", "zero"], "epsilon": 0.1, "x": 0, "times": [0.1], "paths": 2000,
          "effective_P": [1, -0.5], "effective_horizon": 20, "effective_paths": 2000,
          "effective_expect": [1, 0.5]}})"},
    {"elementary-quadratic-pair", "quadratic pair with shifted cosine wells: convexity, coercivity, Hbar <= max table",
     R"({"kind": "table", "params": {
          "hamiltonian": {"dim": 1, "components": [
            {"family": "quadratic", "potential": {"name": "cosine_well", "axis": 0, "center": 0.25}},
            {"family": "quadratic", "potential": {"name": "cosine_well", "axis": 0, "center": 0.75}}]},
          "table": {"N": 128, "lattice": {"lo": -2, "hi": 2, "count": 9}},
          "max_comparison": true}})"},
    {"collapse-equal-pair", "equal components: table equals the single-equation table",
     R"({"kind": "table", "params": {
          "hamiltonian": {"dim": 1, "components": [
            {"family": "quadratic", "potential": {"name": "cosine_well", "axis": 0, "center": 0.25}},
            {"family": "quadratic", "potential": {"name": "cosine_well", "axis": 0, "center": 0.25}}]},
          "table": {"N": 128, "lattice": {"lo": -2, "hi": 2, "count": 9}},
          "collapse": true}})"},
};

#undef HJH_A_PAIR
#undef HJH_A_PAIR_COST

const Entry& find(const std::string& name) {
  for (const auto& e : kPresets)
    if (name == e.name) return e;
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& e : kPresets) out.push_back({e.name, preset_json(e.name).at("kind").get<std::string>(), e.summary});
  return out;
}

nlohmann::json preset_json(const std::string& name) {
  auto j = nlohmann::json::parse(find(name).body);
  j["name"] = name;
  return j;
}

ExperimentConfig preset(const std::string& name) { return parse_config(preset_json(name)); }

}  // namespace hjh
