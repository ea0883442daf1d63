#pragma once

#include <cstdint>
#include <vector>

#include "hjh/coupling.hpp"

namespace hjh {

// Counter-based stream: draw k of path p depends only on (seed, p, k).
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path);
  std::uint64_t next_u64();
  double uniform();  // in (0, 1]
  double exponential(double rate);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Switching process on {0..m-1}: leaves i at rate (1 - K_ii)/eps and lands on j with
// probability K_ij / (1 - K_ii). For m = 2 this is rate c_i / eps.
struct SwitchingChainSpec {
  CouplingMatrix coupling;
  double epsilon;
  std::uint64_t seed = 0;

  int m() const noexcept { return coupling.m(); }
  double rate(int i) const { return (1.0 - coupling(i, i)) / epsilon; }
  double max_rate() const;
  void validate() const;
};

struct ChainSample {
  std::vector<double> jump_times;  // strictly increasing, all < horizon
  std::vector<int> states;         // states[0] is the start; states[k+1] after jump k
  std::vector<int> lattice;        // state at n dt for n = 0..steps

  int state_at(double t) const;
};

// Exact jump times: exponential holding clocks for m = 2, the uniformized jump chain of K otherwise.
// Throws ConfigError unless dt <= 0.1 / max_rate.
ChainSample sample_chain(const SwitchingChainSpec& chain, int start, double horizon, double dt, std::uint64_t path);

// Walks one path: `state` holds on [.., next_jump), then becomes `next_state`.
class ChainCursor {
 public:
  ChainCursor(const SwitchingChainSpec& chain, int start, std::uint64_t path);
  int state() const noexcept { return state_; }
  double next_jump() const noexcept { return next_jump_; }
  int next_state() const noexcept { return next_state_; }
  void advance();

 private:
  void draw(double from);
  const SwitchingChainSpec* chain_;
  PathRng rng_;
  int state_;
  double next_jump_ = 0.0;
  int next_state_ = 0;
};

struct JumpStatistics {
  double no_jump_frequency = 0.0, no_jump_se = 0.0, no_jump_expected = 0.0;
  double mean_jumps = 0.0, jumps_se = 0.0, jumps_expected = 0.0;  // expected only for equal rates
  double occupation_first = 0.0, occupation_se = 0.0;            // time fraction in state 0
  std::size_t paths = 0;
};

JumpStatistics jump_statistics(const SwitchingChainSpec& chain, int start, double horizon, std::size_t paths);

}  // namespace hjh
