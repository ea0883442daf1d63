#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "hjh/artifacts.hpp"
#include "hjh/config.hpp"
#include "hjh/errors.hpp"
#include "hjh/presets.hpp"
#include "hjh/runner.hpp"

using namespace hjh;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hjh_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(HJH_RUN_BINARY) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json cheap_cell() {
  return json::parse(R"({"kind": "cell", "name": "cheap", "params": {
    "hamiltonian": {"dim": 1, "components": [{"family": "quadratic"}, {"family": "quadratic"}]},
    "N": 64, "P": [0.5], "expect": [{"P": 0.5, "value": 0.25, "tol": 0.01}]}})");
}

}  // namespace

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("catalog: size, mandated names, round trip") {
  const auto list = list_presets();
  CHECK(list.size() >= 12);
  std::set<std::string> names;
  for (const auto& p : list) names.insert(p.name);
  CHECK(names.size() == list.size());
  for (const char* n : {"example-4.1", "nonconvex-H0", "remark-4.13", "thm-4.8", "thm-4.9", "thm-4.10", "thm-4.12",
                        "thm-4.13", "thm-4.14", "rate-thm1.2", "layer-prop3.1", "dirichlet-thm6.1", "msys-thm5.1",
                        "dpp-prop7.2"})
    CHECK(names.count(n) == 1);
  for (const auto& p : list) {
    CAPTURE(p.name);
    const auto cfg = preset(p.name);
    CHECK(to_string(cfg.kind) == p.kind);
    CHECK(cfg.name == p.name);
    // the echoed source parses to the same experiment again
    CHECK(parse_config(cfg.source).source == cfg.source);
  }
  CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
}

TEST_CASE("unknown keys are rejected at every level") {
  auto top = cheap_cell();
  top["colour"] = 1;
  CHECK_THROWS_AS(parse_config(top), ConfigError);
  auto params = cheap_cell();
  params["params"]["Nx"] = 4;
  CHECK_THROWS_AS(parse_config(params), ConfigError);
  auto comp = cheap_cell();
  comp["params"]["hamiltonian"]["components"][0]["sped"] = 1;
  CHECK_THROWS_AS(parse_config(comp), ConfigError);
  auto expect = cheap_cell();
  expect["params"]["expect"][0]["tolerance"] = 1;
  CHECK_THROWS_AS(parse_config(expect), ConfigError);
  auto datum = json::parse(R"({"kind": "mc", "params": {
    "hamiltonian": {"dim": 1, "components": [{"family": "zero"}, {"family": "zero"}]},
    "initial": [{"name": "sine", "phase": 1}, "zero"], "epsilon": 0.1, "times": [0.1]}})");
  CHECK_THROWS_AS(parse_config(datum), ConfigError);
  auto kind = cheap_cell();
  kind["kind"] = "celll";
  CHECK_THROWS_AS(parse_config(kind), ConfigError);
  auto rows = cheap_cell();
  rows["params"]["coupling"] = json::parse("[[0.5, 0.6], [1, 0]]");
  CHECK_THROWS_AS(parse_config(rows), ConfigError);
  CHECK_NOTHROW(parse_config(cheap_cell()));
}

TEST_CASE("status codes from the library runner") {
  RunOptions o;
  o.write = false;
  auto ok = run(parse_config(cheap_cell()), o);
  CHECK(ok.status == kSuccess);
  CHECK(ok.all_pass());

  auto wrong = cheap_cell();
  wrong["params"]["expect"][0]["value"] = 3.0;
  auto failed = run(parse_config(wrong), o);
  CHECK(failed.status == kVerdictFailed);

  auto stuck = cheap_cell();
  stuck["params"]["hamiltonian"]["components"][1] = json::parse(R"({"family": "norm", "speed": {"name": "explicit_speed"}})");
  stuck["params"]["hamiltonian"]["components"][0] = json::parse(R"({"family": "norm"})");
  stuck["params"]["max_iterations"] = 3;
  auto nc = run(parse_config(stuck), o);
  CHECK(nc.status == kNonConvergence);
  bool manifest = false;
  for (const auto& [file, bytes] : nc.artifacts.files()) manifest = manifest || file == "manifest.json";
  CHECK(manifest);
}

TEST_CASE("written artifacts match the manifest digests and reruns are byte-identical") {
  const auto a = scratch("a"), b = scratch("b");
  RunOptions oa, ob;
  oa.out_dir = a;
  ob.out_dir = b;
  const auto cfg = parse_config(cheap_cell());
  REQUIRE(run(cfg, oa).status == kSuccess);
  REQUIRE(run(cfg, ob).status == kSuccess);
  const auto manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest.at("status") == 0);
  CHECK(manifest.at("config") == cfg.source);
  CHECK(manifest.at("versions").contains("eigen"));
  for (const auto& entry : manifest.at("artifacts")) {
    const auto file = entry.at("file").get<std::string>();
    CAPTURE(file);
    CHECK(sha256_hex(slurp(a / file)) == entry.at("sha256").get<std::string>());
  }
  CHECK(slurp(a / "cell.csv") == slurp(b / "cell.csv"));
  CHECK(slurp(a / "verdicts.json") == slurp(b / "verdicts.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto cfg = dir / "cell.json";
  std::ofstream(cfg) << cheap_cell().dump();
  auto stuck = cheap_cell();
  stuck["params"]["hamiltonian"] = json::parse(
      R"({"dim": 1, "components": [{"family": "norm"}, {"family": "norm", "speed": {"name": "explicit_speed"}}]})");
  const auto slow = dir / "slow.json";
  std::ofstream(slow) << stuck.dump();
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"kind": "cell", "params": {"hamiltonian": {"dim": 1, "components": []}, "oops": 1}})";

  CHECK(cli("cell --config " + cfg.string() + " --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(fs::exists(dir / "ok" / "cell.csv"));

  CHECK(cli("cell --config " + bad.string() + " --out " + (dir / "bad").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "bad"));
  CHECK(cli("table --config " + cfg.string() + " --out " + (dir / "mismatch").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "mismatch"));
  CHECK(cli("cell --preset no-such --out " + (dir / "np").string()) == 2);
  CHECK(cli("cell --preset nonconvex-H0 --config " + cfg.string()) == 2);
  CHECK(cli("cell --config " + cfg.string() + " --set N=1 --out " + (dir / "n1").string()) == 2);

  CHECK(cli("cell --config " + slow.string() + " --set max_iterations=3 --out " + (dir / "nc").string()) == 3);
  CHECK(fs::exists(dir / "nc" / "manifest.json"));
  CHECK(cli("presets") == 0);
  fs::remove_all(dir);
}
