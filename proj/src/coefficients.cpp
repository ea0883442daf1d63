#include <algorithm>
#include <cmath>
#include <numbers>

#include "hjh/errors.hpp"
#include "hjh/families.hpp"

namespace hjh {
namespace coeff {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double t) { return t - std::floor(t); }

// Periodic distance on the unit circle.
double circle_distance(double a, double b) {
  const double d = std::abs(wrap01(a - b));
  return std::min(d, 1.0 - d);
}
}  // namespace

double smootherstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

Coefficient constant(double value) { return Coefficient::constant(value); }

Coefficient explicit_speed() {
  Coefficient c;
  c.name = "explicit_speed";
  c.fn = [](const Vec& xi) {
    const double s = std::sin(kTwoPi * xi[0]), co = std::cos(kTwoPi * xi[0]);
    const double num = 1.0 - (co / (8.0 * kPi * kPi) + s / (4.0 * kPi));
    const double den = 1.0 + (0.5 + 1.0 / (8.0 * kPi * kPi)) * co;
    return num / den;
  };
  return c;
}

Coefficient rotation_well(int which) {
  if (which != 1 && which != 2) throw ConfigError("rotation_well index must be 1 or 2");
  Coefficient c;
  c.name = which == 1 ? "rotation_well_1" : "rotation_well_2";
  const double k = 4.0 * kPi * kPi;
  if (which == 1) {
    c.fn = [k](const Vec& xi) {
      const double s = std::sin(kTwoPi * xi[0]), co = std::cos(kTwoPi * xi[0]);
      return k * s * s + co - s;
    };
  } else {
    c.fn = [k](const Vec& xi) {
      const double s = std::sin(kTwoPi * xi[0]), co = std::cos(kTwoPi * xi[0]);
      return k * co * co + s - co;
    };
  }
  return c;
}

Coefficient interval_well(double inner_lo, double inner_hi, double outer_lo, double outer_hi,
                          double inside, double outside, int axis) {
  if (!(0.0 <= outer_lo && outer_lo < inner_lo && inner_lo <= inner_hi && inner_hi < outer_hi && outer_hi <= 1.0))
    throw ConfigError("interval_well needs 0 <= outer_lo < inner_lo <= inner_hi < outer_hi <= 1");
  if (axis != 0 && axis != 1) throw ConfigError("interval_well axis must be 0 or 1");
  Coefficient c;
  c.name = "interval_well";
  c.fn = [=](const Vec& xi) {
    const double t = wrap01(xi[axis]);
    double w;  // 1 inside, 0 outside
    if (t >= inner_lo && t <= inner_hi) {
      w = 1.0;
    } else if (t <= outer_lo || t >= outer_hi) {
      w = 0.0;
    } else if (t < inner_lo) {
      w = smootherstep((t - outer_lo) / (inner_lo - outer_lo));
    } else {
      w = smootherstep((outer_hi - t) / (outer_hi - inner_hi));
    }
    return outside + (inside - outside) * w;
  };
  return c;
}

Coefficient cosine_well(int axis, double center, double amplitude) {
  if (axis != 0 && axis != 1) throw ConfigError("cosine_well axis must be 0 or 1");
  Coefficient c;
  c.name = "cosine_well";
  c.fn = [=](const Vec& xi) { return amplitude * (1.0 - std::cos(kTwoPi * (xi[axis] - center))); };
  return c;
}

Coefficient stripe_well(double modulation) {
  if (std::abs(modulation) >= 1.0) throw ConfigError("stripe_well modulation must satisfy |b| < 1");
  Coefficient c;
  c.name = "stripe_well";
  c.fn = [modulation](const Vec& xi) {
    return (1.0 + std::cos(kTwoPi * xi[1])) * (1.0 + modulation * std::cos(kTwoPi * xi[0]));
  };
  return c;
}

Coefficient disk_well(Vec center, double inner_radius, double outer_radius, double inside, double outside) {
  if (!(0.0 <= inner_radius && inner_radius < outer_radius && outer_radius < 0.5))
    throw ConfigError("disk_well needs 0 <= inner_radius < outer_radius < 1/2");
  Coefficient c;
  c.name = "disk_well";
  c.fn = [=](const Vec& xi) {
    const double r = std::hypot(circle_distance(xi[0], center[0]), circle_distance(xi[1], center[1]));
    const double w = r <= inner_radius ? 1.0 : smootherstep((outer_radius - r) / (outer_radius - inner_radius));
    return outside + (inside - outside) * w;
  };
  return c;
}

Coefficient tabulated(int dim, std::vector<double> values, int points_per_axis) {
  TorusGrid grid(dim, points_per_axis);
  if (values.size() != grid.size()) throw ConfigError("tabulated coefficient has the wrong number of values");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("tabulated coefficient values must be finite");
  Coefficient c;
  c.name = "tabulated";
  c.fn = [grid, values = std::move(values)](const Vec& xi) { return interpolate_periodic(grid, values, xi); };
  return c;
}

}  // namespace coeff

namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

std::array<double, 2> pair(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
    throw ConfigError(std::string("key '") + key + "' must be a two-element array");
  return {j.at(key)[0].get<double>(), j.at(key)[1].get<double>()};
}

}  // namespace

std::vector<std::string> coefficient_names() {
  return {"constant", "explicit_speed", "rotation_well", "interval_well", "cosine_well",
          "stripe_well", "disk_well", "tabulated"};
}

Coefficient make_coefficient(const json& j) {
  if (j.is_number()) return coeff::constant(j.get<double>());
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
    throw ConfigError("coefficient must be a number or an object with a 'name'");
  const auto name = j.at("name").get<std::string>();
  if (name == "constant") {
    allow_keys(j, {"name", "value"}, "constant");
    return coeff::constant(number(j, "value"));
  }
  if (name == "explicit_speed") {
    allow_keys(j, {"name"}, name);
    return coeff::explicit_speed();
  }
  if (name == "rotation_well") {
    allow_keys(j, {"name", "index"}, name);
    return coeff::rotation_well(static_cast<int>(number(j, "index")));
  }
  if (name == "interval_well") {
    allow_keys(j, {"name", "inner", "outer", "inside", "outside", "axis"}, name);
    const auto in = pair(j, "inner");
    const auto out = pair(j, "outer");
    return coeff::interval_well(in[0], in[1], out[0], out[1], number(j, "inside"), number(j, "outside"),
                                static_cast<int>(number_or(j, "axis", 0)));
  }
  if (name == "cosine_well") {
    allow_keys(j, {"name", "axis", "center", "amplitude"}, name);
    return coeff::cosine_well(static_cast<int>(number_or(j, "axis", 0)), number_or(j, "center", 0.0),
                              number_or(j, "amplitude", 1.0));
  }
  if (name == "stripe_well") {
    allow_keys(j, {"name", "modulation"}, name);
    return coeff::stripe_well(number_or(j, "modulation", 0.0));
  }
  if (name == "disk_well") {
    allow_keys(j, {"name", "center", "inner_radius", "outer_radius", "inside", "outside"}, name);
    const auto c = pair(j, "center");
    return coeff::disk_well({c[0], c[1]}, number(j, "inner_radius"), number(j, "outer_radius"),
                            number(j, "inside"), number(j, "outside"));
  }
  if (name == "tabulated") {
    allow_keys(j, {"name", "values"}, name);
    const json& v = j.at("values");
    if (!v.is_array() || v.empty()) throw ConfigError("tabulated 'values' must be a nonempty array");
    if (v[0].is_array()) {
      const int n = static_cast<int>(v.size());
      std::vector<double> flat;
      for (const auto& row : v) {
        if (!row.is_array() || static_cast<int>(row.size()) != n) throw ConfigError("tabulated rows must form a square");
        for (const auto& x : row) flat.push_back(x.get<double>());
      }
      return coeff::tabulated(2, std::move(flat), n);
    }
    std::vector<double> flat = v.get<std::vector<double>>();
    const int n = static_cast<int>(flat.size());
    return coeff::tabulated(1, std::move(flat), n);
  }
  throw ConfigError("unknown coefficient '" + name + "'");
}

std::vector<std::string> family_names() { return {"quadratic", "norm", "double_well", "tabulated_potential", "zero"}; }

Component make_component(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw ConfigError("component must be an object with a 'family'");
  const auto family = j.at("family").get<std::string>();
  allow_keys(j, {"family", "speed", "potential", "values"}, "component");
  Component c;
  if (family == "quadratic") {
    c.profile = Profile::quadratic;
  } else if (family == "norm") {
    c.profile = Profile::norm;
  } else if (family == "double_well") {
    c.profile = Profile::double_well;
  } else if (family == "zero") {
    c.profile = Profile::norm;
    c.speed = coeff::constant(0.0);
    if (j.contains("speed") || j.contains("potential")) throw ConfigError("family 'zero' takes no coefficients");
    return c;
  } else if (family == "tabulated_potential") {
    c.profile = Profile::quadratic;
    if (!j.contains("values")) throw ConfigError("tabulated_potential needs 'values'");
    c.potential = make_coefficient(json{{"name", "tabulated"}, {"values", j.at("values")}});
    if (j.contains("speed")) c.speed = make_coefficient(j.at("speed"));
    if (j.contains("potential")) throw ConfigError("tabulated_potential takes 'values', not 'potential'");
    return c;
  } else {
    throw ConfigError("unknown Hamiltonian family '" + family + "'");
  }
  if (j.contains("values")) throw ConfigError("'values' only applies to tabulated_potential");
  if (j.contains("speed")) c.speed = make_coefficient(j.at("speed"));
  if (j.contains("potential")) c.potential = make_coefficient(j.at("potential"));
  return c;
}

HamiltonianSpec make_hamiltonian(const json& j) {
  if (!j.is_object()) throw ConfigError("hamiltonian must be an object");
  allow_keys(j, {"dim", "components"}, "hamiltonian");
  const int dim = static_cast<int>(number_or(j, "dim", 1));
  if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty())
    throw ConfigError("hamiltonian needs a nonempty 'components' array");
  std::vector<Component> comps;
  for (const auto& c : j.at("components")) comps.push_back(make_component(c));
  return HamiltonianSpec(dim, std::move(comps));
}

}  // namespace hjh
