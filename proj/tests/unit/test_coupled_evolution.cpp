#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "hjh/errors.hpp"
#include "hjh/evolution.hpp"
#include "hjh/families.hpp"

using namespace hjh;
using std::numbers::pi;

namespace {

HamiltonianSpec spec_of(const char* text) { return make_hamiltonian(nlohmann::json::parse(text)); }

const char* kZeroPair = R"({"dim":1,"components":[{"family":"zero"},{"family":"zero"}]})";
const char* kAPair = R"({"dim":1,"components":[{"family":"norm"},{"family":"norm","speed":{"name":"explicit_speed"}}]})";

EpsSystemProblem problem(const char* h, double eps, int n, std::vector<GridFunction> f, double T,
                         CouplingMatrix k = CouplingMatrix::two_state()) {
  TorusGrid g(1, n);
  return EpsSystemProblem{spec_of(h), std::move(k), eps, g, std::move(f), T};
}

GridFunction sine(const TorusGrid& g, double amp = 1.0) {
  return sample(g, [amp](const Vec& x) { return amp * std::sin(2 * pi * x[0]); });
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("expm agrees with the reference matrix exponential") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(0, 1);
  for (int m = 2; m <= 5; ++m) {
    Eigen::MatrixXd k(m, m);
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < m; ++j) row += (k(i, j) = d(gen));
      k.row(i) /= row;
    }
    CouplingMatrix c(k);
    for (double s : {0.01, 1.0, 37.0}) {
      Eigen::MatrixXd ref = (s * c.generator()).exp();
      CHECK((c.propagator(s) - ref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((expm(s * c.generator()) - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK((c.stationary().transpose() * c.matrix() - c.stationary().transpose()).norm() < 1e-12);
  }
  CouplingMatrix a = CouplingMatrix::two_state(0.3, 0.9);
  CHECK((a.propagator(2.5) - (2.5 * a.generator()).exp()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("coupling rejects rows that do not sum to one") {
  CHECK_THROWS_AS(CouplingMatrix::from_rows({{0.5, 0.6}, {1, 0}}), ConfigError);
  CHECK_THROWS_AS(CouplingMatrix::from_rows({{1.2, -0.2}, {0.5, 0.5}}), ConfigError);
  CHECK(CouplingMatrix::from_rows({{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}).doubly_stochastic());
  CHECK_FALSE(CouplingMatrix::from_rows({{0.2, 0.8}, {0.5, 0.5}}).doubly_stochastic());
}

TEST_CASE("pure coupling: oscillation decays by exp(-2t/eps) and the sum is conserved") {
  TorusGrid g(1, 32);
  const double eps = 0.1;
  auto f1 = sine(g), f2 = GridFunction(g.size(), 0.0);
  for (auto& v : f2) v = 0.3;
  auto p = problem(kZeroPair, eps, 32, {f1, f2}, 0.4);
  auto run = evolve(p, {0.0, 0.05, 0.1, 0.4});
  CHECK(run[0].components[0] == f1);
  CHECK(run[0].components[1] == f2);
  for (const auto& s : run) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double diff = s.components[0][k] - s.components[1][k];
      CHECK(diff == doctest::Approx((f1[k] - f2[k]) * std::exp(-2 * s.time / eps)).epsilon(1e-12).scale(1.0));
      CHECK(s.components[0][k] + s.components[1][k] == doctest::Approx(f1[k] + f2[k]).epsilon(1e-13));
    }
  }
}

TEST_CASE("equal components with equal data reproduce the single equation") {
  const char* two = R"({"dim":1,"components":[{"family":"quadratic"},{"family":"quadratic"}]})";
  const char* one = R"({"dim":1,"components":[{"family":"quadratic"}]})";
  TorusGrid g(1, 64);
  auto f = sine(g, 0.2);
  auto sys = evolve(problem(two, 0.1, 64, {f, f}, 0.2), {0.1, 0.2});
  auto single = evolve(problem(one, 0.1, 64, {f}, 0.2, CouplingMatrix::single()), {0.1, 0.2});
  for (int s = 0; s < 2; ++s) {
    CHECK(max_abs_diff(sys[s].components[0], sys[s].components[1]) < 1e-12);
    CHECK(max_abs_diff(sys[s].components[0], single[s].components[0]) < 1e-12);
  }
}

TEST_CASE("snapshot list does not change the trajectory") {
  TorusGrid g(1, 64);
  auto p = problem(kAPair, 0.1, 64, {sine(g), GridFunction(g.size(), 0.0)}, 0.3);
  auto a = evolve(p, {0.0, 0.1, 0.3});
  auto b = evolve(p, {0.037, 0.1, 0.2, 0.3});
  for (int c = 0; c < 2; ++c) {
    CHECK(max_abs_diff(a[1].components[c], b[1].components[c]) <= 1e-12);
    CHECK(max_abs_diff(a[2].components[c], b[3].components[c]) <= 1e-12);
  }
}

TEST_CASE("discrete comparison for ordered data") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(-1, 1), shift(0, 0.5);
  TorusGrid g(1, 32);
  CoupledEvolution lo(problem(kAPair, 0.1, 32, {GridFunction(32), GridFunction(32)}, 0.1));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GridFunction> f(2, GridFunction(32)), w(2, GridFunction(32));
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 32; ++k) {
        f[c][k] = 0.4 * d(gen);
        w[c][k] = f[c][k] + shift(gen);
      }
    StateField u(g, f), v(g, w);
    for (int s = 0; s < 20; ++s) {
      u = lo.step(u, lo.max_dt());
      v = lo.step(v, lo.max_dt());
    }
    std::size_t bad = 0;
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 32; ++k) bad += u.components[c][k] > v.components[c][k] + 1e-14;
    CHECK(bad == 0);
  }
}

TEST_CASE("steps beyond the CFL bound are rejected") {
  TorusGrid g(1, 32);
  CoupledEvolution e(problem(kAPair, 0.1, 32, {sine(g), GridFunction(32, 0.0)}, 0.1));
  CHECK_THROWS_AS(e.step(e.initial_state(), 1.5 * e.max_dt()), CflViolation);
  CHECK_NOTHROW(e.step(e.initial_state(), e.max_dt()));
}

TEST_CASE("barrier examples") {
  TorusGrid g(1, 64);
  const double eps = 0.1;
  auto f1 = sine(g);
  GridFunction f2(g.size(), 0.0);
  auto p = problem(kAPair, eps, 64, {f1, f2}, 1.0);
  auto b = build_barriers(p, {0.0, eps, 1.0});
  CHECK(b.lower[0].components[0] == f1);
  CHECK(b.upper[0].components[1] == f2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(b.upper[2].components[0][k] - b.lower[2].components[0][k] == doctest::Approx(2 * b.constant));
    const double fbar = 0.5 * (f1[k] + f2[k]);
    CHECK(b.upper[1].components[0][k] - (fbar + b.constant * eps) ==
          doctest::Approx((f1[k] - fbar) * std::exp(-2.0)).scale(1.0));
  }
}

TEST_CASE("sandwich holds for the a pair and fails for a halved constant") {
  TorusGrid g(1, 320);
  const double eps = 0.1;
  auto p = problem(kAPair, eps, 320, {sine(g), GridFunction(320, 0.0)}, 0.5);
  std::vector<double> times{0.0, 0.05, 0.1, 0.25, 0.5};
  auto run = evolve(p, times);
  auto ok = check_sandwich(run, build_barriers(p, times), 5 * g.spacing());
  CHECK(ok.ok());
  CHECK(ok.checked > 0);

  auto zero = problem(kZeroPair, eps, 64, {sine(TorusGrid(1, 64)), GridFunction(64, 0.0)}, 0.5);
  auto zrun = evolve(zero, times);
  CHECK(check_sandwich(zrun, build_barriers(zero, times, 0.0), 1e-10).ok());

  auto tight = build_barriers(p, times, 0.0);
  auto bad = check_sandwich(run, tight, 0.0);
  CHECK(bad.violations > 0);
}
