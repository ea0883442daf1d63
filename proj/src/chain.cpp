#include "hjh/chain.hpp"

#include <cmath>
#include <vector>

#include "hjh/errors.hpp"
#include "hjh/grid.hpp"

namespace hjh {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Moments {
  double mean, se;
};

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = pairwise_sum(x) / n;
  std::vector<double> d(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) d[k] = (x[k] - mean) * (x[k] - mean);
  const double var = x.size() > 1 ? pairwise_sum(d) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) : key_(mix(seed ^ mix(path + 0x632BE59BD9B4E019ull))) {}

std::uint64_t PathRng::next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

double PathRng::uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

double PathRng::exponential(double rate) { return -std::log(uniform()) / rate; }

double SwitchingChainSpec::max_rate() const {
  double r = 0.0;
  for (int i = 0; i < m(); ++i) r = std::max(r, rate(i));
  return r;
}

void SwitchingChainSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("chain epsilon must be positive");
  if (m() == 2)
    for (int i = 0; i < 2; ++i)
      if (!(rate(i) > 0.0)) throw ConfigError("two-state chain needs positive rates");
}

ChainCursor::ChainCursor(const SwitchingChainSpec& chain, int start, std::uint64_t path)
    : chain_(&chain), rng_(chain.seed, path), state_(start) {
  if (start < 0 || start >= chain.m()) throw ConfigError("start state out of range");
  draw(0.0);
}

void ChainCursor::advance() {
  state_ = next_state_;
  draw(next_jump_);
}

void ChainCursor::draw(double from) {
  const int m = chain_->m();
  if (m == 1) {
    next_jump_ = INFINITY;
    next_state_ = state_;
    return;
  }
  if (m == 2) {
    next_jump_ = from + rng_.exponential(chain_->rate(state_));
    next_state_ = 1 - state_;
    return;
  }
  // Uniformized: events at rate 1/eps, each moving to j with probability K_ij (self-loops included).
  const auto& K = chain_->coupling;
  const double lambda = 1.0 / chain_->epsilon;
  double t = from;
  for (;;) {
    t += rng_.exponential(lambda);
    const double u = rng_.uniform();
    double acc = 0.0;
    int j = m - 1;
    for (int k = 0; k < m; ++k) {
      acc += K(state_, k);
      if (u <= acc) {
        j = k;
        break;
      }
    }
    if (j != state_) {
      next_jump_ = t;
      next_state_ = j;
      return;
    }
  }
}

int ChainSample::state_at(double t) const {
  std::size_t k = 0;
  while (k < jump_times.size() && jump_times[k] <= t) ++k;
  return states[k];
}

ChainSample sample_chain(const SwitchingChainSpec& chain, int start, double horizon, double dt, std::uint64_t path) {
  chain.validate();
  if (!(horizon >= 0.0) || !(dt > 0.0)) throw ConfigError("chain sampling needs horizon >= 0 and dt > 0");
  if (dt > 0.1 / chain.max_rate() * (1.0 + 1e-12))
    throw ConfigError("dt too coarse for the switching rates: need dt <= 0.1 eps / max c_i");
  ChainSample s;
  ChainCursor cur(chain, start, path);
  s.states.push_back(cur.state());
  while (cur.next_jump() < horizon) {
    s.jump_times.push_back(cur.next_jump());
    cur.advance();
    s.states.push_back(cur.state());
  }
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  s.lattice.reserve(steps + 1);
  std::size_t k = 0;
  for (long n = 0; n <= steps; ++n) {
    const double t = std::min(n * dt, horizon);
    while (k < s.jump_times.size() && s.jump_times[k] <= t) ++k;
    s.lattice.push_back(s.states[k]);
  }
  return s;
}

JumpStatistics jump_statistics(const SwitchingChainSpec& chain, int start, double horizon, std::size_t paths) {
  chain.validate();
  if (paths < 2) throw ConfigError("need at least two paths");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  std::vector<double> none(paths), jumps(paths), occ(paths);
  const auto n = static_cast<long>(paths);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    ChainCursor cur(chain, start, static_cast<std::uint64_t>(p));
    double t = 0.0, first = 0.0;
    int count = 0;
    while (true) {
      const double end = std::min(cur.next_jump(), horizon);
      if (cur.state() == 0) first += end - t;
      t = end;
      if (cur.next_jump() >= horizon) break;
      ++count;
      cur.advance();
    }
    none[p] = count == 0 ? 1.0 : 0.0;
    jumps[p] = count;
    occ[p] = first / horizon;
  }
  JumpStatistics st;
  st.paths = paths;
  const auto a = moments(none), b = moments(jumps), c = moments(occ);
  st.no_jump_frequency = a.mean;
  st.no_jump_se = a.se;
  st.no_jump_expected = std::exp(-chain.rate(start) * horizon);
  st.mean_jumps = b.mean;
  st.jumps_se = b.se;
  bool equal = true;
  for (int i = 1; i < chain.m(); ++i) equal = equal && std::abs(chain.rate(i) - chain.rate(0)) < 1e-14 * chain.rate(0);
  st.jumps_expected = equal ? chain.rate(0) * horizon : NAN;
  st.occupation_first = c.mean;
  st.occupation_se = c.se;
  return st;
}

}  // namespace hjh
