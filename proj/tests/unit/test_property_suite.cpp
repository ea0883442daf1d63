#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hjh/cell.hpp"
#include "hjh/elementary.hpp"
#include "hjh/errors.hpp"
#include "hjh/families.hpp"
#include "hjh/flat.hpp"

using namespace hjh;

namespace {

HamiltonianSpec spec_of(const char* text) { return make_hamiltonian(nlohmann::json::parse(text)); }

const char* kWellPair = R"({"dim":1,"components":[
  {"family":"quadratic","potential":{"name":"cosine_well","axis":0,"center":0.25}},
  {"family":"quadratic","potential":{"name":"cosine_well","axis":0,"center":0.75}}]})";
const char* kAPair = R"({"dim":1,"components":[{"family":"norm"},{"family":"norm","speed":{"name":"explicit_speed"}}]})";

EffectiveTable table_of(const HamiltonianSpec& spec, double lo, double hi, int count, int n = 64) {
  CellOptions o;
  o.points_per_axis = n;
  return build_table(spec, spec.m() == 1 ? CouplingMatrix::single() : CouplingMatrix::two_state(),
                     PLattice::line(lo, hi, count), {0.08, 0.04, 0.02}, 1e-7, o);
}

}  // namespace

TEST_CASE("metadata gating") {
  auto q = metadata_for(spec_of(kWellPair));
  CHECK(q.convex);
  CHECK_FALSE(q.homogeneous);
  auto a = metadata_for(spec_of(kAPair));
  CHECK(a.convex);
  CHECK(a.homogeneous);
  auto dw = metadata_for(spec_of(R"({"dim":1,"components":[{"family":"double_well"},{"family":"double_well"}]})"));
  CHECK_FALSE(dw.convex);
}

TEST_CASE("quadratic well pair: convexity, coercivity and Hbar <= Kbar") {
  auto spec = spec_of(kWellPair);
  auto table = table_of(spec, -1.5, 1.5, 7);
  auto kspec = max_hamiltonian(spec);
  auto ktable = table_of(kspec, -1.5, 1.5, 7);
  auto meta = metadata_for(spec);
  meta.max_table = &ktable;
  auto rep = run_elementary_checks(table, meta);
  CHECK(rep.find("coercivity").pass);
  CHECK(rep.find("midpoint_convexity").applicable);
  CHECK(rep.find("midpoint_convexity").pass);
  CHECK(rep.find("max_comparison").pass);
  CHECK_FALSE(rep.find("degree_one_homogeneity").applicable);
  CHECK(rep.pass());
}

TEST_CASE("max hamiltonian keeps the smaller potential") {
  auto spec = spec_of(kWellPair);
  auto k = max_hamiltonian(spec);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int t = 0; t < 50; ++t) {
    const Vec xi{d(gen), 0}, p{d(gen), 0};
    CHECK(k.eval(0, xi, p) == doctest::Approx(std::max(spec.eval(0, xi, p), spec.eval(1, xi, p))));
  }
}

TEST_CASE("equal components collapse to the single equation") {
  auto one = spec_of(R"({"dim":1,"components":[{"family":"quadratic","potential":{"name":"cosine_well","axis":0,"center":0.25}}]})");
  auto two = spec_of(R"({"dim":1,"components":[
    {"family":"quadratic","potential":{"name":"cosine_well","axis":0,"center":0.25}},
    {"family":"quadratic","potential":{"name":"cosine_well","axis":0,"center":0.25}}]})");
  auto single = table_of(one, -1, 1, 5);
  auto pair = table_of(two, -1, 1, 5);
  auto meta = metadata_for(two);
  meta.single = &single;
  auto rep = run_elementary_checks(pair, meta);
  CHECK(rep.find("equal_hamiltonian_collapse").applicable);
  CHECK(rep.find("equal_hamiltonian_collapse").pass);
  CHECK(rep.find("equal_hamiltonian_collapse").worst <= 1e-12);
}

TEST_CASE("explicit pair is homogeneous of degree one") {
  auto table = table_of(spec_of(kAPair), -2, 2, 9);
  auto rep = run_elementary_checks(table, metadata_for(spec_of(kAPair)));
  CHECK(rep.find("degree_one_homogeneity").applicable);
  CHECK(rep.find("degree_one_homogeneity").pass);
  CHECK(table.at(8).h_bar == doctest::Approx(2 * table.at(6).h_bar).epsilon(0.02));
}

TEST_CASE("double-well table: convexity skipped, coercivity asserted") {
  auto spec = spec_of(R"({"dim":1,"components":[{"family":"double_well"},{"family":"double_well"}]})");
  auto table = table_of(spec, -2, 2, 5);
  auto rep = run_elementary_checks(table, metadata_for(spec));
  CHECK_FALSE(rep.find("midpoint_convexity").applicable);
  CHECK(rep.find("coercivity").applicable);
  CHECK(rep.find("coercivity").pass);
}

TEST_CASE("a deliberately non-convex table fails the convexity check") {
  auto lat = PLattice::line(-1, 1, 3);
  std::vector<TableEntry> e(3);
  for (int k = 0; k < 3; ++k) e[k].P = lat.point(k);
  e[0].h_bar = 1.0;
  e[1].h_bar = 1.5;
  e[2].h_bar = 1.0;
  ElementaryMetadata meta;
  meta.convex = true;
  auto rep = run_elementary_checks(EffectiveTable(lat, e, 0.02, 64), meta);
  CHECK_FALSE(rep.find("midpoint_convexity").pass);
  CHECK_FALSE(rep.pass());
}

TEST_CASE("every flat construction passes its own audit") {
  for (const auto& name : flat_experiment_names()) {
    CAPTURE(name);
    auto exp = flat_experiment(name);
    for (const auto& h : audit_hypotheses(exp)) {
      CAPTURE(h.name);
      CHECK(h.ok);
    }
  }
}

TEST_CASE("a broken construction is refused before solving") {
  auto exp = nested_wells_experiment();
  exp.spec = spec_of(R"({"dim":1,"components":[{"family":"quadratic","potential":-0.1},{"family":"quadratic"}]})");
  CHECK_THROWS_AS(run_flat_experiment(exp), ConfigError);
  CHECK_THROWS_AS(flat_experiment("no_such"), ConfigError);
}

TEST_CASE("nested wells subsolution certificate is nonpositive") {
  auto exp = nested_wells_experiment();
  auto chk = check_nested_wells_subsolution(exp, TorusGrid(1, 256));
  CHECK(chk.ok);
  for (double c : chk.certificate) CHECK(c <= 1e-9);
  CHECK(chk.gamma > 0.0);
}

TEST_CASE("interval wells are flat at zero") {
  auto exp = interval_wells_experiment(0.05);
  auto v = run_flat_experiment(exp, default_flat_config(exp));
  CHECK(v.pass);
  for (const auto& p : v.points) {
    CHECK(std::abs(p.h_bar) <= 0.03);
    CHECK(p.lower_cert == doctest::Approx(0.0).scale(1.0));
  }
}
