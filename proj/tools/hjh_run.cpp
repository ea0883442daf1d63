#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjh/errors.hpp"
#include "hjh/presets.hpp"
#include "hjh/runner.hpp"

namespace {

// --set key=value overrides a scalar under "params"; the value is parsed as JSON when possible.
void apply_override(nlohmann::json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw hjh::ConfigError("--set expects key=value, got '" + kv + "'");
  const auto key = kv.substr(0, eq), text = kv.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  if (!value.is_primitive()) throw hjh::ConfigError("--set only overrides scalar keys");
  if (!j.contains("params") || !j["params"].is_object()) throw hjh::ConfigError("config has no params object");
  j["params"][key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenization experiments for weakly coupled Hamilton-Jacobi systems"};
  app.require_subcommand(1);
  std::string config_path, preset_name, out_dir = "out";
  int jobs = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;

  for (const auto& kind : hjh::kind_names()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    auto* cfg = sub->add_option("--config", config_path, "JSON experiment file");
    auto* pre = sub->add_option("--preset", preset_name, "named preset (see `presets`)");
    cfg->excludes(pre);
    sub->add_option("--out", out_dir, "artifact directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "worker thread cap (0: runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "override the random seed");
    sub->add_option("--set", overrides, "override a scalar params key: key=value");
  }
  auto* presets = app.add_subcommand("presets", "list the shipped presets");
  bool dump = false;
  presets->add_flag("--json", dump, "print every preset config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hjh::kConfigError;
  }

  if (presets->parsed()) {
    if (dump) {
      nlohmann::json all = nlohmann::json::object();
      for (const auto& p : hjh::list_presets()) all[p.name] = hjh::preset_json(p.name);
      std::cout << all.dump(2) << '\n';
    } else {
      for (const auto& p : hjh::list_presets()) std::printf("%-26s %-10s %s\n", p.name.c_str(), p.kind.c_str(), p.summary.c_str());
    }
    return 0;
  }

  const auto* sub = app.get_subcommands().front();
  hjh::ExperimentConfig config;
  try {
    nlohmann::json j;
    if (!preset_name.empty()) {
      j = hjh::preset_json(preset_name);
    } else if (!config_path.empty()) {
      j = hjh::load_config(config_path).source;
    } else {
      throw hjh::ConfigError("one of --config or --preset is required");
    }
    for (const auto& kv : overrides) apply_override(j, kv);
    if (sub->count("--seed")) j["seed"] = seed;
    config = hjh::parse_config(j);
    if (hjh::to_string(config.kind) != sub->get_name())
      throw hjh::ConfigError(std::string("config is a '") + hjh::to_string(config.kind) + "' experiment, not '" +
                             sub->get_name() + "'");
  } catch (const hjh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hjh::kConfigError;
  }

  hjh::RunOptions opt;
  opt.out_dir = out_dir;
  opt.jobs = jobs;
  const auto res = hjh::run(config, opt);
  if (res.status == hjh::kConfigError) {
    std::cerr << "config error: " << res.message << '\n';
    return res.status;
  }
  for (const auto& v : res.verdicts)
    std::printf("%s %-40s value=%.6g threshold=%.6g %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.value,
                v.threshold, v.detail.c_str());
  if (res.status == hjh::kNonConvergence) std::cerr << "nonconvergence: " << res.message << '\n';
  std::printf("%s: status %d, %.1fs, artifacts in %s\n", config.name.c_str(), res.status, res.seconds, out_dir.c_str());
  return res.status;
}
