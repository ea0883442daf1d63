#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "hjh/effective.hpp"
#include "hjh/errors.hpp"
#include "hjh/families.hpp"

using namespace hjh;
using std::numbers::pi;

namespace {

EffectiveTable analytic_table(const std::function<double(double)>& h, double lo, double hi, int count) {
  auto lat = PLattice::line(lo, hi, count);
  std::vector<TableEntry> e(lat.size());
  for (std::size_t k = 0; k < lat.size(); ++k) {
    e[k].P = lat.point(k);
    e[k].h_bar = h(e[k].P[0]);
  }
  return EffectiveTable(lat, e, 0.02, 64);
}

double periodic_distance(double a, double b) {
  const double d = std::abs(a - b) - std::floor(std::abs(a - b));
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST_CASE("quadratic table against the brute-force Hopf-Lax value") {
  const int n = 128;
  TorusGrid g(1, n);
  auto f = [](double y) { return -std::cos(2 * pi * y) / (2 * pi); };
  EffectiveProblem p{analytic_table([](double P) { return P * P; }, -2, 2, 161), g,
                     sample(g, [&](const Vec& x) { return f(x[0]); }), 0.1};
  auto run = solve_effective(p, {0.1});
  const double t = 0.1;
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.point(k)[0];
    double best = INFINITY;
    // y over a fine lattice covering one period around x
    for (int a = -4000; a <= 4000; ++a) {
      const double y = x + a / 8000.0;
      best = std::min(best, f(y) + (x - y) * (x - y) / (4 * t));
    }
    worst = std::max(worst, std::abs(run.snapshots[0].components[0][k] - best));
  }
  CHECK(worst <= 5 * g.spacing());
  CHECK(run.clamped_queries == 0);
}

TEST_CASE("constant datum drops by t Hbar(0)") {
  TorusGrid g(1, 32);
  EffectiveProblem p{analytic_table([](double P) { return P * P + 0.3; }, -1, 1, 21), g, GridFunction(32, 2.0), 0.5};
  auto run = solve_effective(p, {0.25, 0.5});
  for (double v : run.snapshots[0].components[0]) CHECK(v == doctest::Approx(2.0 - 0.25 * 0.3));
  for (double v : run.snapshots[1].components[0]) CHECK(v == doctest::Approx(2.0 - 0.5 * 0.3));
}

TEST_CASE("norm table evolves by the eikonal semigroup") {
  const int n = 256;
  TorusGrid g(1, n);
  auto f = [](double y) { return periodic_distance(y, 0.5); };
  EffectiveProblem p{analytic_table([](double P) { return std::abs(P); }, -2, 2, 41), g,
                     sample(g, [&](const Vec& x) { return f(x[0]); }), 0.2};
  for (FluxKind flux : {FluxKind::godunov, FluxKind::lax_friedrichs}) {
    EffectiveOptions o;
    o.flux = flux;
    auto run = solve_effective(p, {0.2}, o);
    const double t = 0.2;
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.point(k)[0];
      double best = INFINITY;
      for (int a = -2000; a <= 2000; ++a) best = std::min(best, f(x + t * a / 2000.0));
      worst = std::max(worst, std::abs(run.snapshots[0].components[0][k] - best));
    }
    CHECK(worst <= 0.05);
  }
}

TEST_CASE("tables with gaps are refused") {
  auto t = analytic_table([](double P) { return P; }, -1, 1, 3);
  auto e = t.entries();
  e[1].ok = false;
  EffectiveTable gappy(t.lattice(), e, 0.02, 64);
  TorusGrid g(1, 16);
  CHECK_THROWS_AS(solve_effective({gappy, g, GridFunction(16, 0.0), 0.1}, {0.1}), ConfigError);
}

TEST_CASE("inner solution") {
  GridFunction f1{3.0, 1.0}, f2{1.0, 1.0};
  auto w0 = inner_solution(f1, f2, 0.0);
  CHECK(w0[0] == f1);
  CHECK(w0[1] == f2);
  auto w = inner_solution(f1, f2, 0.5);
  CHECK(w[0][0] - w[1][0] == doctest::Approx(2 * std::exp(-1.0)));
  auto inf = inner_solution(f1, f2, 200.0);
  CHECK(inf[0][0] == doctest::Approx(2.0));
  CHECK(inf[1][0] == doctest::Approx(2.0));
}

TEST_CASE("matched solutions") {
  TorusGrid g(1, 8);
  GridFunction f1 = sample(g, [](const Vec& x) { return std::sin(2 * pi * x[0]); }), f2(8, 0.0);
  GridFunction u0(8), u1(8, 0.25), u2(8, -0.5);
  for (int k = 0; k < 8; ++k) u0[k] = 0.5 * f1[k];
  const double eps = 0.1;
  std::vector<StateField> run{StateField(g, {u0}, 0.0), StateField(g, {u1}, eps), StateField(g, {u2}, 0.5)};
  auto m = matched_solutions(run, {f1, f2}, CouplingMatrix::two_state(), eps);
  for (int k = 0; k < 8; ++k) {
    CHECK(m.matched[0].components[0][k] == doctest::Approx(f1[k]).scale(1.0));
    CHECK(m.matched[0].components[1][k] == doctest::Approx(f2[k]).scale(1.0));
    CHECK(m.matched[1].components[0][k] - u1[k] == doctest::Approx((f1[k] - f2[k]) / (2 * std::exp(2.0))).scale(1.0));
    CHECK(std::abs(m.matched[2].components[0][k] - u2[k]) <= std::exp(-10.0));
  }
}

TEST_CASE("fit_line recovers an exact line") {
  auto [slope, icpt] = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(slope == doctest::Approx(2.0));
  CHECK(icpt == doctest::Approx(1.0));
}

TEST_CASE("equal components and equal data: only the homogenization error remains") {
  auto spec = make_hamiltonian(nlohmann::json::parse(R"({"dim":1,"components":[{"family":"quadratic"},{"family":"quadratic"}]})"));
  auto table = analytic_table([](double P) { return P * P; }, -4, 4, 321);
  auto f = [](const Vec& x) { return 0.2 * std::sin(2 * pi * x[0]); };
  RateOptions o;
  o.eps_cells = 32;
  auto rep = rate_harness(spec, CouplingMatrix::two_state(), {f, f}, {0.2, 0.1}, 0.2, table, o);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) {
    CHECK(r.ok);
    CHECK(r.e_total < 0.05);
    CHECK(r.probe_gap == doctest::Approx(0.0).scale(1.0));
  }
  CHECK(rep.rows[1].e_total < rep.rows[0].e_total);
  std::stringstream ss;
  write_rate_csv(ss, rep);
  CHECK(ss.str().find("epsilon") != std::string::npos);
}
