#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hjh/errors.hpp"
#include "hjh/families.hpp"
#include "hjh/grid.hpp"
#include "hjh/hamiltonian.hpp"
#include "hjh/numerical_hamiltonian.hpp"
#include "hjh/state.hpp"

using namespace hjh;
using std::numbers::pi;

namespace {

HamiltonianSpec quadratic(double v = 0.0) {
  Component c;
  c.potential = Coefficient::constant(v);
  return HamiltonianSpec(1, {c});
}

HamiltonianSpec norm1() {
  Component c;
  c.profile = Profile::norm;
  return HamiltonianSpec(1, {c});
}

HamiltonianSpec from_json(const char* text) { return make_hamiltonian(nlohmann::json::parse(text)); }

// brute-force extremum of H over the box [p-, p+], the Bardi-Osher definition
double brute_godunov(const HamiltonianSpec& s, const Vec& xi, const Vec& pm, const Vec& pp) {
  const int n = 400;
  auto grid_of = [&](int k) {
    std::vector<double> g;
    for (int a = 0; a <= n; ++a) g.push_back(pm[k] + (pp[k] - pm[k]) * a / n);
    return g;
  };
  if (s.dim() == 1) {
    double best = pm[0] <= pp[0] ? INFINITY : -INFINITY;
    for (double p : grid_of(0)) {
      const double v = s.eval(0, xi, {p, 0.0});
      best = pm[0] <= pp[0] ? std::min(best, v) : std::max(best, v);
    }
    return best;
  }
  auto g0 = grid_of(0), g1 = grid_of(1);
  double outer = pm[0] <= pp[0] ? INFINITY : -INFINITY;
  for (double p0 : g0) {
    double inner = pm[1] <= pp[1] ? INFINITY : -INFINITY;
    for (double p1 : g1) {
      const double v = s.eval(0, xi, {p0, p1});
      inner = pm[1] <= pp[1] ? std::min(inner, v) : std::max(inner, v);
    }
    outer = pm[0] <= pp[0] ? std::min(outer, inner) : std::max(outer, inner);
  }
  return outer;
}

}  // namespace

TEST_CASE("torus grid indexing wraps") {
  TorusGrid g(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.spacing() == doctest::Approx(0.125));
  const auto k = g.index(7, 3);
  CHECK(g.coords(k) == std::array<int, 2>{7, 3});
  CHECK(g.neighbor(k, 0, +1) == g.index(0, 3));
  CHECK(g.neighbor(g.index(2, 0), 1, -1) == g.index(2, 7));
  CHECK(g.point(g.index(4, 2))[1] == doctest::Approx(0.25));
  CHECK_THROWS(TorusGrid(3, 8));
}

TEST_CASE("periodic interpolation is exact on gridpoints and linear between") {
  TorusGrid g(1, 16);
  auto u = sample(g, [](const Vec& x) { return std::sin(2 * pi * x[0]); });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(interpolate_periodic(g, u, g.point(k)) == doctest::Approx(u[k]));
  const double mid = 0.5 * (u[3] + u[4]);
  CHECK(interpolate_periodic(g, u, {3.5 / 16.0, 0}) == doctest::Approx(mid));
  CHECK(interpolate_periodic(g, u, {3.5 / 16.0 + 2.0, 0}) == doctest::Approx(mid));
  CHECK(interpolate_periodic(g, u, {-12.5 / 16.0, 0}) == doctest::Approx(mid));
}

TEST_CASE("pairwise sum matches exact integer sums and ignores producer order") {
  std::vector<double> v(1000);
  for (int i = 0; i < 1000; ++i) v[i] = i + 1;
  CHECK(pairwise_sum(v) == 500500.0);
  std::vector<double> r(777);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto& x : r) x = d(gen);
  CHECK(pairwise_sum(r) == pairwise_sum(std::vector<double>(r)));
}

TEST_CASE("legendre transform examples") {
  const std::vector<Vec> q2{{2.0, 0.0}};
  CHECK(legendre_transform(quadratic(), 0, {0, 0}, q2, 4.0)[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(legendre_transform(quadratic(1.0), 0, {0, 0}, {{0.0, 0.0}}, 4.0)[0] == doctest::Approx(1.0));
  auto nl = legendre_transform(norm1(), 0, {0, 0}, {{0.5, 0.0}, {1.5, 0.0}}, 50.0, 2001, 10.0);
  CHECK(nl[0] == doctest::Approx(0.0));
  CHECK(std::isinf(nl[1]));
  CHECK_THROWS_AS(legendre_transform(quadratic(), 0, {0, 0}, {{20.0, 0.0}}, 2.0), BoundaryAttainment);
  CHECK_THROWS(legendre_transform(from_json(R"({"dim":1,"components":[{"family":"double_well"}]})"), 0, {0, 0}, q2, 4.0));
}

TEST_CASE("legendre duality against the closed-form lagrangian") {
  auto s = from_json(
      R"({"dim":1,"components":[{"family":"quadratic","speed":0.5,"potential":{"name":"cosine_well","axis":0,"center":0.3}}]})");
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int t = 0; t < 20; ++t) {
    const Vec xi{d(gen), 0}, q{d(gen), 0}, p{d(gen), 0};
    const double l = s.lagrangian(0, xi, q);
    CHECK(l == doctest::Approx(legendre_transform(s, 0, xi, {q}, 6.0, 4001)[0]).epsilon(1e-4));
    CHECK(s.eval(0, xi, p) >= p[0] * q[0] - l - 1e-12);
    const Vec pstar{q[0] / (2 * 0.5), 0};
    CHECK(s.eval(0, xi, pstar) == doctest::Approx(pstar[0] * q[0] - l));
  }
}

TEST_CASE("lax-friedrichs flux examples") {
  auto s = quadratic();
  CHECK(numerical_hamiltonian(s, 0, {0, 0}, {0.7, 0}, {0.7, 0}, 3.0) == s.eval(0, {0, 0}, {0.7, 0}));
  CHECK(numerical_hamiltonian(s, 0, {0, 0}, {0, 0}, {2, 0}, 4.0) == doctest::Approx(-3.0));
}

TEST_CASE("lax-friedrichs flux is monotone for theta above the gradient bound") {
  auto s = from_json(R"({"dim":2,"components":[{"family":"quadratic","speed":{"name":"explicit_speed"}}]})");
  const double r = 3.0;
  const double theta = s.flux_bound(r);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> d(-r + 0.2, r - 0.2);
  for (int t = 0; t < 500; ++t) {
    Vec xi{d(gen), d(gen)}, pm{d(gen), d(gen)}, pp{d(gen), d(gen)};
    const double base = numerical_hamiltonian(s, 0, xi, pm, pp, theta);
    for (int k = 0; k < 2; ++k) {
      Vec up = pp, um = pm;
      up[k] += 0.1;
      um[k] += 0.1;
      CHECK(numerical_hamiltonian(s, 0, xi, pm, up, theta) <= base + 1e-12);
      CHECK(numerical_hamiltonian(s, 0, xi, um, pp, theta) >= base - 1e-12);
    }
  }
}

TEST_CASE("godunov flux matches the brute-force box extremum") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> d(-2, 2);
  for (const char* js : {R"({"dim":1,"components":[{"family":"quadratic"}]})",
                         R"({"dim":1,"components":[{"family":"norm","speed":0.7}]})",
                         R"({"dim":1,"components":[{"family":"double_well"}]})",
                         R"({"dim":2,"components":[{"family":"quadratic"}]})",
                         R"({"dim":2,"components":[{"family":"double_well","potential":0.3}]})"}) {
    auto s = from_json(js);
    for (int t = 0; t < 60; ++t) {
      Vec pm{d(gen), s.dim() == 2 ? d(gen) : 0.0}, pp{d(gen), s.dim() == 2 ? d(gen) : 0.0};
      const double got = godunov_hamiltonian(s, 0, {0.1, 0.2}, pm, pp);
      // lattice step 0.01 in each direction bounds the brute-force error
      CHECK(std::abs(got - brute_godunov(s, {0.1, 0.2}, pm, pp)) <= 1e-2);
    }
    // consistency
    CHECK(godunov_hamiltonian(s, 0, {0.1, 0.2}, {0.4, 0.4}, {0.4, 0.4}) == doctest::Approx(s.eval(0, {0.1, 0.2}, {0.4, 0.4})));
  }
}

TEST_CASE("godunov flux is monotone") {
  auto s = from_json(R"({"dim":2,"components":[{"family":"double_well"}]})");
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int t = 0; t < 500; ++t) {
    Vec pm{d(gen), d(gen)}, pp{d(gen), d(gen)};
    const double base = godunov_hamiltonian(s, 0, {0, 0}, pm, pp);
    for (int k = 0; k < 2; ++k) {
      Vec up = pp, um = pm;
      up[k] += 0.1;
      um[k] += 0.1;
      CHECK(godunov_hamiltonian(s, 0, {0, 0}, pm, up) <= base + 1e-12);
      CHECK(godunov_hamiltonian(s, 0, {0, 0}, um, pp) >= base - 1e-12);
    }
  }
}

TEST_CASE("upwind gradients") {
  TorusGrid g(1, 4);
  StateField c(g, {GridFunction(4, 3.0)});
  auto [cm, cp] = upwind_gradients(c, 0, 2);
  CHECK(cm[0] == 0.0);
  CHECK(cp[0] == 0.0);

  StateField lin(g, {sample(g, [](const Vec& x) { return x[0]; })});
  auto [m1, p1] = upwind_gradients(lin, 0, 1);
  CHECK(m1[0] == doctest::Approx(1.0));
  CHECK(p1[0] == doctest::Approx(1.0));
  // u = 0.75 at the last point, 0 after the wrap: (0 - 0.75) / 0.25 = -(N - 1)
  auto [m3, p3] = upwind_gradients(lin, 0, 3);
  CHECK(m3[0] == doctest::Approx(1.0));
  CHECK(p3[0] == doctest::Approx(-3.0));
  auto [m0, p0] = upwind_gradients(lin, 0, 0);
  CHECK(m0[0] == doctest::Approx(-3.0));
  CHECK(p0[0] == doctest::Approx(1.0));

  TorusGrid fine(1, 256);
  StateField s(fine, {sample(fine, [](const Vec& x) { return std::sin(2 * pi * x[0]); })});
  auto [sm, sp] = upwind_gradients(s, 0, 0);
  const double h = fine.spacing();
  CHECK(std::abs(sm[0] - 2 * pi) <= 2 * pi * pi * h);
  CHECK(std::abs(sp[0] - 2 * pi) <= 2 * pi * pi * h);
}

TEST_CASE("registered coefficients are periodic") {
  for (const char* js : {
           R"({"dim":1,"components":[{"family":"norm","speed":{"name":"explicit_speed"}},{"family":"quadratic","potential":{"name":"rotation_well","index":1}}]})",
           R"({"dim":1,"components":[{"family":"quadratic","potential":{"name":"rotation_well","index":2}}]})",
           R"({"dim":2,"components":[{"family":"quadratic","potential":{"name":"stripe_well","modulation":0.5}}]})",
           R"({"dim":2,"components":[{"family":"double_well","potential":{"name":"cosine_well","axis":1,"center":0.2}}]})"}) {
    CHECK(periodicity_defect(from_json(js)) < 1e-10);
  }
}

TEST_CASE("explicit speed stays positive and coercivity probe") {
  auto a = coeff::explicit_speed();
  double lo = INFINITY;
  for (int k = 0; k < 1000; ++k) lo = std::min(lo, a({k / 1000.0, 0}));
  CHECK(lo > 0.0);
  CHECK(coercivity_probe(from_json(R"({"dim":2,"components":[{"family":"quadratic","potential":2}]})"), 4.0));
  CHECK(coercivity_probe(from_json(R"({"dim":1,"components":[{"family":"double_well"}]})"), 4.0));
}

TEST_CASE("unknown family is rejected") {
  CHECK_THROWS_AS(from_json(R"({"dim":1,"components":[{"family":"cubic"}]})"), ConfigError);
  CHECK_THROWS_AS(from_json(R"({"dim":3,"components":[{"family":"quadratic"}]})"), ConfigError);
}
