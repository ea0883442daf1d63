#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hjh/dirichlet.hpp"
#include "hjh/errors.hpp"
#include "hjh/families.hpp"

using namespace hjh;

namespace {

HamiltonianSpec spec_of(const char* text) { return make_hamiltonian(nlohmann::json::parse(text)); }

const char* kNormPair = R"({"dim":1,"components":[{"family":"norm"},{"family":"norm"}]})";
const char* kCostPair = R"({"dim":1,"components":[{"family":"norm","potential":1},
  {"family":"norm","speed":{"name":"explicit_speed"},"potential":1}]})";

EffectiveTable shifted_norm_table() {
  auto lat = PLattice::line(-3, 3, 61);
  std::vector<TableEntry> e(lat.size());
  for (std::size_t k = 0; k < lat.size(); ++k) {
    e[k].P = lat.point(k);
    e[k].h_bar = std::abs(e[k].P[0]) - 1.0;
  }
  return EffectiveTable(lat, e, 0.02, 64);
}

DirichletSolution solve(const char* h, double eps, int cells, std::vector<double> g1, std::vector<double> g2) {
  auto grid = BoxGrid::interval(0, 1, cells);
  DirichletProblem p{spec_of(h), CouplingMatrix::two_state(), eps, grid, {side_data(grid, g1), side_data(grid, g2)}};
  return solve_dirichlet_eps(p, 1e-10);
}

}  // namespace

TEST_CASE("box grid and side data") {
  auto g = BoxGrid::interval(0, 2, 8);
  CHECK(g.size() == 9);
  CHECK(g.spacing(0) == doctest::Approx(0.25));
  CHECK(g.is_boundary(0));
  CHECK(g.is_boundary(8));
  CHECK_FALSE(g.is_boundary(4));
  auto d = side_data(g, {1.0, 3.0});
  CHECK(d[0] == 1.0);
  CHECK(d[8] == 3.0);
  BoxGrid sq(2, {0, 0}, {1, 1}, 4);
  auto corner = side_data(sq, {1.0, 2.0, 0.5, 3.0});
  CHECK(corner[sq.index(0, 0)] == 0.5);
  CHECK(corner[sq.index(4, 4)] == 2.0);
}

TEST_CASE("effective datum is the pointwise minimum") {
  auto g = BoxGrid::interval(0, 1, 4);
  auto gb = effective_boundary_datum({side_data(g, {0.0, 1.0}), side_data(g, {1.0, 0.5})});
  CHECK(gb[0] == 0.0);
  CHECK(gb[4] == 0.5);
}

TEST_CASE("zero data with a norm pair gives zero") {
  auto sol = solve(kNormPair, 0.1, 40, {0, 0}, {0, 0});
  for (const auto& c : sol.components)
    for (double v : c) CHECK(v == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("equal components with equal data stay equal") {
  auto sol = solve(kCostPair, 0.1, 64, {0.2, 0.7}, {0.2, 0.7});
  auto same = solve(R"({"dim":1,"components":[{"family":"norm","potential":1},{"family":"norm","potential":1}]})", 0.1, 64,
                    {0.2, 0.7}, {0.2, 0.7});
  for (std::size_t k = 0; k < same.grid.size(); ++k)
    CHECK(same.components[0][k] == doctest::Approx(same.components[1][k]).epsilon(1e-8));
  CHECK(sol.residual <= 1e-10);
}

TEST_CASE("effective solution matches 1 - exp(-x)") {
  auto g = BoxGrid::interval(0, 1, 200);
  auto gb = side_data(g, {0.0, 1.0});
  auto sol = solve_dirichlet_effective(shifted_norm_table(), g, gb, 1e-10);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(sol.components[0][k] - (1 - std::exp(-g.point(k)[0]))));
  CHECK(worst <= 5 * g.spacing(0));
}

TEST_CASE("eps sweep approaches the min datum while the classical datum is lost") {
  const std::vector<double> eps{0.2, 0.1, 0.05};
  std::vector<double> gap;
  for (double e : eps) {
    const int cells = static_cast<int>(std::lround(16 / e));
    auto sol = solve(kCostPair, e, cells, {1, 1}, {0, 1});
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < sol.grid.size(); ++k) {
      const double ref = 1 - std::exp(-sol.grid.point(k)[0]);
      for (const auto& c : sol.components) worst = std::max(worst, std::abs(c[k] - ref));
    }
    gap.push_back(worst);
    // next to the left endpoint component 1 sits near g_2 = 0, far from its own datum 1
    CHECK(sol.components[0][1] < 0.5);
  }
  CHECK(gap[1] < gap[0]);
  CHECK(gap[2] < gap[1]);
}

TEST_CASE("dirichlet csv columns") {
  auto sol = solve(kNormPair, 0.2, 8, {0, 0}, {0, 0});
  std::stringstream ss;
  write_dirichlet_csv(ss, sol);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "x,component,value");
}

TEST_CASE("invalid problems are rejected") {
  auto grid = BoxGrid::interval(0, 1, 8);
  DirichletProblem p{spec_of(kNormPair), CouplingMatrix::two_state(), -1.0, grid,
                     {side_data(grid, {0, 0}), side_data(grid, {0, 0})}};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
