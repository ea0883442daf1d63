#include "hjh/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hjh/errors.hpp"
#include "hjh/families.hpp"
#include "hjh/flat.hpp"

namespace hjh {

using nlohmann::json;

namespace {

constexpr const char* kKinds[] = {"cell", "table", "evolve", "rate", "flat", "dirichlet", "mc", "dpp"};

// Reads an object key by key and rejects whatever was not read.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& raw(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  double num(const char* key) {
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(where_ + ": '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where_ + ": '" + key + "' must be finite");
    return x;
  }
  double num(const char* key, double fallback) { return has(key) ? num(key) : fallback; }

  double positive(const char* key, double fallback) {
    const double x = num(key, fallback);
    if (!(x > 0.0)) throw ConfigError(where_ + ": '" + key + "' must be positive");
    return x;
  }

  int integer(const char* key, int fallback, int min = 1) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + ": '" + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < min || x > 1'000'000'000) throw ConfigError(where_ + ": '" + key + "' out of range");
    return static_cast<int>(x);
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(where_ + ": '" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::string str(const char* key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(where_ + ": '" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string str(const char* key, const std::string& fallback) { return has(key) ? str(key) : fallback; }

  std::vector<double> nums(const char* key) {
    const auto& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where_ + ": '" + key + "' must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>()))
        throw ConfigError(where_ + ": '" + key + "' must hold finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<double> nums(const char* key, std::vector<double> fallback) {
    return has(key) ? nums(key) : fallback;
  }

  Vec vec(const char* key, int dim) { return as_vec(raw(key), dim, where_ + ": '" + key + "'"); }

  std::vector<Vec> vecs(const char* key, int dim) {
    const auto& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where_ + ": '" + key + "' must be a nonempty array");
    std::vector<Vec> out;
    for (const auto& x : v) out.push_back(as_vec(x, dim, where_ + ": '" + key + "'"));
    return out;
  }

  const std::string& where() const { return where_; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }

  static Vec as_vec(const json& v, int dim, const std::string& what) {
    if (dim == 1 && v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      throw ConfigError(what + " must be a " + std::to_string(dim) + "-vector");
    Vec out{0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      if (!v[a].is_number()) throw ConfigError(what + " must hold numbers");
      out[a] = v[a].get<double>();
    }
    return out;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::vector<double> decreasing(std::vector<double> v, const std::string& what) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0)) throw ConfigError(what + " must be positive");
    if (k && !(v[k] < v[k - 1])) throw ConfigError(what + " must be strictly decreasing");
  }
  return v;
}

std::vector<double> increasing(std::vector<double> v, double lo, double hi, const std::string& what) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < lo || v[k] > hi) throw ConfigError(what + " out of range");
    if (k && !(v[k] > v[k - 1])) throw ConfigError(what + " must be strictly increasing");
  }
  return v;
}

struct Model {
  json hamiltonian, coupling;
  int dim, m;
};

Model read_model(Reader& r) {
  Model md;
  md.hamiltonian = r.raw("hamiltonian");
  md.coupling = r.has("coupling") ? r.raw("coupling") : json();
  const auto spec = hamiltonian_of(md.hamiltonian);
  const auto k = coupling_of(md.coupling);
  if (k.m() != spec.m()) throw ConfigError(r.where() + ": coupling and hamiltonian disagree on the component count");
  md.dim = spec.dim();
  md.m = spec.m();
  return md;
}

json read_initial(Reader& r, const Model& md) {
  const auto& init = r.raw("initial");
  if (static_cast<int>(data_of(init).size()) != md.m)
    throw ConfigError(r.where() + ": need one initial datum per component");
  return init;
}

Expectation read_expectation(const json& j, int dim, const std::string& where) {
  Reader r(j, where);
  Expectation e;
  if (r.has("P")) e.P = r.vec("P", dim);
  e.value = r.num("value");
  e.tol = r.positive("tol", 0.05);
  r.done();
  return e;
}

std::vector<Expectation> read_expectations(Reader& r, int dim) {
  std::vector<Expectation> out;
  if (!r.has("expect")) return out;
  const auto& v = r.raw("expect");
  if (!v.is_array()) throw ConfigError(r.where() + ": 'expect' must be an array");
  for (const auto& e : v) out.push_back(read_expectation(e, dim, r.where() + ".expect"));
  return out;
}

std::optional<CorrectorCheck> read_corrector(Reader& r, int dim) {
  if (!r.has("corrector")) return std::nullopt;
  Reader c(r.raw("corrector"), r.where() + ".corrector");
  CorrectorCheck out;
  out.P = c.vec("P", dim);
  out.tol = c.positive("tol", 0.05);
  c.done();
  if (dim != 1 || std::abs(std::abs(out.P[0]) - 1.0) > 0.0)
    throw ConfigError("corrector check is defined for the 1D pair at P = +1 or -1");
  return out;
}

PLattice read_lattice(const json& j, int dim, const std::string& where) {
  Reader r(j, where);
  PLattice lat;
  if (dim == 1) {
    lat = PLattice::line(r.num("lo"), r.num("hi"), r.integer("count", 0));
  } else {
    const auto lo = r.vec("lo", 2), hi = r.vec("hi", 2);
    const auto& c = r.raw("count");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer())
      throw ConfigError(where + ": 'count' must be two integers");
    lat = PLattice::box({lo[0], lo[1]}, {hi[0], hi[1]}, {c[0].get<int>(), c[1].get<int>()});
  }
  r.done();
  lat.validate();
  return lat;
}

TableSpec read_table(const json& j, int dim, const std::string& where) {
  Reader r(j, where);
  TableSpec t;
  t.N = r.integer("N", t.N, 4);
  t.lattice = read_lattice(r.raw("lattice"), dim, where + ".lattice");
  t.deltas = decreasing(r.nums("deltas", t.deltas), where + ".deltas");
  t.tol = r.positive("tol", t.tol);
  r.done();
  return t;
}

CellParams read_cell(Reader& r) {
  CellParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.N = r.integer("N", p.N, 4);
  p.P = r.vecs("P", md.dim);
  p.deltas = decreasing(r.nums("deltas", p.deltas), "deltas");
  p.tol = r.positive("tol", p.tol);
  p.flux = flux_from_string(r.str("flux", "godunov"));
  p.max_iterations = r.integer("max_iterations", static_cast<int>(p.max_iterations), 1);
  p.expect = read_expectations(r, md.dim);
  if (r.has("lower_bound")) p.lower_bound = read_expectation(r.raw("lower_bound"), md.dim, "lower_bound");
  p.strict_gap = r.boolean("strict_gap", false);
  p.corrector = read_corrector(r, md.dim);
  return p;
}

TableParams read_table_params(Reader& r) {
  TableParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.table = read_table(r.raw("table"), md.dim, "table");
  p.expect = read_expectations(r, md.dim);
  p.corrector = read_corrector(r, md.dim);
  p.max_comparison = r.boolean("max_comparison", false);
  p.collapse = r.boolean("collapse", false);
  return p;
}

EvolveParams read_evolve(Reader& r) {
  EvolveParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.initial = read_initial(r, md);
  p.epsilons = decreasing(r.nums("epsilons"), "epsilons");
  p.eps_cells = r.integer("eps_cells", p.eps_cells, 2);
  p.horizon = r.positive("horizon", p.horizon);
  p.times = increasing(r.nums("times"), 0.0, p.horizon, "times");
  p.barriers = r.boolean("barriers", false);
  p.slack_h = r.positive("slack_h", p.slack_h);
  if (r.has("common_limit")) {
    Reader c(r.raw("common_limit"), "common_limit");
    CommonLimitCheck cl;
    cl.probe_time = c.positive("probe_time", cl.probe_time);
    cl.fit_times = increasing(c.nums("fit_times", cl.fit_times), 0.0, p.horizon, "common_limit.fit_times");
    if (cl.fit_times.front() <= 0.0 || cl.fit_times.size() < 2)
      throw ConfigError("common_limit.fit_times needs at least two positive times");
    cl.tol = c.positive("tol", cl.tol);
    c.done();
    if (cl.probe_time > p.horizon) throw ConfigError("common_limit.probe_time beyond the horizon");
    p.common_limit = cl;
  }
  return p;
}

RateParams read_rate(Reader& r) {
  RateParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.initial = read_initial(r, md);
  p.epsilons = decreasing(r.nums("epsilons", p.epsilons), "epsilons");
  p.horizon = r.positive("horizon", p.horizon);
  p.eps_cells = r.integer("eps_cells", p.eps_cells, 2);
  p.probe_time = r.positive("probe_time", p.probe_time);
  if (p.probe_time > p.horizon) throw ConfigError("probe_time beyond the horizon");
  p.effective_flux = flux_from_string(r.str("effective_flux", "lax_friedrichs"));
  p.table = read_table(r.raw("table"), md.dim, "table");
  if (r.has("expect")) {
    Reader e(r.raw("expect"), "expect");
    p.expect.min_slope = e.num("min_slope", p.expect.min_slope);
    p.expect.layer_spread = e.positive("layer_spread", p.expect.layer_spread);
    p.expect.monotone = e.boolean("monotone", p.expect.monotone);
    p.expect.sandwich_eps = e.positive("sandwich_eps", p.expect.sandwich_eps);
    p.expect.probe_gap = e.positive("probe_gap", p.expect.probe_gap);
    e.done();
  }
  p.layer_only = r.boolean("layer_only", false);
  return p;
}

FlatParams read_flat(Reader& r) {
  FlatParams p;
  p.experiment = r.str("experiment");
  const auto names = flat_experiment_names();
  if (std::find(names.begin(), names.end(), p.experiment) == names.end())
    throw ConfigError("unknown flat experiment '" + p.experiment + "'");
  p.eps0 = r.positive("eps0", p.eps0);
  p.N = r.integer("N", 0, 8);
  if (r.has("tol")) p.tol = r.positive("tol", 1.0);
  return p;
}

DirichletParams read_dirichlet(Reader& r) {
  DirichletParams p;
  const auto md = read_model(r);
  if (md.dim != 1) throw ConfigError("dirichlet experiments are one-dimensional");
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.epsilons = decreasing(r.nums("epsilons", p.epsilons), "epsilons");
  p.lo = r.num("lo", p.lo);
  p.hi = r.num("hi", p.hi);
  if (!(p.lo < p.hi)) throw ConfigError("need lo < hi");
  p.eps_cells = r.integer("eps_cells", p.eps_cells, 2);
  const auto& b = r.raw("boundary");
  if (!b.is_array() || static_cast<int>(b.size()) != md.m)
    throw ConfigError("'boundary' needs one [left, right] pair per component");
  for (const auto& s : b) {
    const auto v = Reader::as_vec(s, 2, "boundary");
    p.boundary.push_back({v[0], v[1]});
  }
  p.tol = r.positive("tol", p.tol);
  p.table = read_table(r.raw("table"), 1, "table");
  p.side = r.str("side", p.side);
  if (p.side != "left" && p.side != "right") throw ConfigError("'side' must be left or right");
  p.gap_tol = r.positive("gap_tol", p.gap_tol);
  return p;
}

McParams read_mc(Reader& r) {
  McParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.initial = read_initial(r, md);
  p.epsilon = r.positive("epsilon", p.epsilon);
  p.x = r.vec("x", md.dim);
  p.times = increasing(r.nums("times", p.times), 0.0, INFINITY, "times");
  p.start = r.integer("start", 0, 0);
  if (p.start >= md.m) throw ConfigError("'start' out of range");
  p.paths = static_cast<std::size_t>(r.integer("paths", static_cast<int>(p.paths), 2));
  p.closed_form = r.boolean("closed_form", false);
  if (p.closed_form && md.m != 2) throw ConfigError("closed_form needs two components");
  if (r.has("jump_horizon")) p.jump_horizon = r.positive("jump_horizon", 1.0);
  if (r.has("effective_P")) p.effective_P = r.vecs("effective_P", md.dim);
  p.effective_horizon = r.positive("effective_horizon", p.effective_horizon);
  p.effective_paths = static_cast<std::size_t>(r.integer("effective_paths", static_cast<int>(p.effective_paths), 2));
  if (r.has("effective_expect")) {
    p.effective_expect = r.nums("effective_expect");
    if (p.effective_expect.size() != p.effective_P.size())
      throw ConfigError("'effective_expect' needs one value per effective_P");
  }
  p.effective_rel_tol = r.positive("effective_rel_tol", p.effective_rel_tol);
  return p;
}

DppParams read_dpp(Reader& r) {
  DppParams p;
  const auto md = read_model(r);
  p.hamiltonian = md.hamiltonian;
  p.coupling = md.coupling;
  p.initial = read_initial(r, md);
  p.epsilon = r.positive("epsilon", p.epsilon);
  p.x = r.vec("x", md.dim);
  p.t = r.positive("t", p.t);
  p.h_split = increasing(r.nums("h_split"), 0.0, p.t, "h_split");
  p.start = r.integer("start", 0, 0);
  if (p.start >= md.m) throw ConfigError("'start' out of range");
  p.paths = static_cast<std::size_t>(r.integer("paths", static_cast<int>(p.paths), 2));
  p.N = r.integer("N", p.N, 8);
  p.snapshots = r.integer("snapshots", p.snapshots, 2);
  p.slack_h = r.positive("slack_h", p.slack_h);
  return p;
}

}  // namespace

const char* to_string(ExperimentKind k) { return kKinds[static_cast<int>(k)]; }

ExperimentKind kind_from_string(const std::string& s) {
  for (int k = 0; k < 8; ++k)
    if (s == kKinds[k]) return static_cast<ExperimentKind>(k);
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::vector<std::string> kind_names() { return {std::begin(kKinds), std::end(kKinds)}; }

ExperimentConfig parse_config(const json& j) {
  Reader top(j, "config");
  ExperimentConfig c;
  c.kind = kind_from_string(top.str("kind"));
  c.name = top.str("name", "custom");
  if (top.has("seed")) {
    const auto& s = top.raw("seed");
    if (!s.is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  Reader r(top.raw("params"), "params");
  switch (c.kind) {
    case ExperimentKind::cell: c.params = read_cell(r); break;
    case ExperimentKind::table: c.params = read_table_params(r); break;
    case ExperimentKind::evolve: c.params = read_evolve(r); break;
    case ExperimentKind::rate: c.params = read_rate(r); break;
    case ExperimentKind::flat: c.params = read_flat(r); break;
    case ExperimentKind::dirichlet: c.params = read_dirichlet(r); break;
    case ExperimentKind::mc: c.params = read_mc(r); break;
    case ExperimentKind::dpp: c.params = read_dpp(r); break;
  }
  r.done();
  top.done();
  c.source = j;
  c.source["seed"] = c.seed;
  c.source["name"] = c.name;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

HamiltonianSpec hamiltonian_of(const json& j) {
  try {
    return make_hamiltonian(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed hamiltonian: ") + e.what());
  }
}

CouplingMatrix coupling_of(const json& j) {
  if (j.is_null()) return CouplingMatrix::two_state();
  if (!j.is_array() || j.empty()) throw ConfigError("'coupling' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw ConfigError("'coupling' rows must be arrays");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw ConfigError("'coupling' entries must be numbers");
      r.push_back(x.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return CouplingMatrix::from_rows(rows);
}

std::vector<std::string> datum_names() { return {"zero", "constant", "sine", "cosine"}; }

ScalarField datum_of(const json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return [](const Vec&) { return 0.0; };
  Reader r(j, "initial datum");
  const auto name = r.str("name");
  ScalarField f;
  if (name == "zero") {
    f = [](const Vec&) { return 0.0; };
  } else if (name == "constant") {
    const double v = r.num("value");
    f = [v](const Vec&) { return v; };
  } else if (name == "sine" || name == "cosine") {
    const double a = r.num("amplitude", 1.0), shift = r.num("shift", 0.0);
    const int axis = r.integer("axis", 0, 0);
    if (axis > 1) throw ConfigError("initial datum axis must be 0 or 1");
    const bool sine = name == "sine";
    f = [a, shift, axis, sine](const Vec& x) {
      const double s = 2.0 * M_PI * (x[axis] - shift);
      return a * (sine ? std::sin(s) : std::cos(s));
    };
  } else {
    throw ConfigError("unknown initial datum '" + name + "'");
  }
  r.done();
  return f;
}

std::vector<ScalarField> data_of(const json& list) {
  if (!list.is_array() || list.empty()) throw ConfigError("'initial' must be a nonempty array of data");
  std::vector<ScalarField> out;
  for (const auto& d : list) out.push_back(datum_of(d));
  return out;
}

}  // namespace hjh
