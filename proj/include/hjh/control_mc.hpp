#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hjh/chain.hpp"
#include "hjh/evolution.hpp"
#include "hjh/hamiltonian.hpp"

namespace hjh {

// Velocity eta'(s) chosen in chain state i at position x and elapsed time s.
using VelocityPolicy = std::function<Vec(int state, const Vec& x, double s)>;

VelocityPolicy zero_policy();
VelocityPolicy constant_policy(Vec velocity);

// Feedback from a solve of the eps-system: eta' = -dH_i/dp (x/eps, Du_i(x, t - s)).
// Snapshots must sit on a uniform time lattice starting at 0 (as returned by evolve with such times).
class PdeFeedback {
 public:
  PdeFeedback(HamiltonianSpec spec, double epsilon, std::vector<StateField> snapshots);

  // u_i(x, tau) by periodic interpolation in x and linear interpolation in tau.
  double value(int i, const Vec& x, double tau) const;
  Vec gradient(int i, const Vec& x, double tau) const;
  // Policy for a path whose total horizon is t.
  VelocityPolicy policy(double t) const;
  const std::vector<StateField>& snapshots() const noexcept { return snaps_; }

 private:
  std::size_t slot(double tau) const;
  HamiltonianSpec spec_;
  double epsilon_;
  std::vector<StateField> snaps_;
  double dtau_;
};

struct McOptions {
  std::size_t paths = 10'000;
  double dt = 0.0;      // 0: min(0.1 eps / max c_i, h / q_max) with h = 1/64, q_max = 4
  std::uint64_t first_path = 0;
};

struct McEstimate {
  double mean = NAN;
  double std_error = NAN;
  std::size_t paths = 0;
  std::size_t discarded = 0;
  double discard_rate() const { return paths ? static_cast<double>(discarded) / paths : 0.0; }
  std::vector<double> samples;  // per kept path, in path order
  std::vector<std::size_t> kept;  // path index of each sample
};

double default_mc_dt(const SwitchingChainSpec& chain);

// E[ int_0^t L_nu(eta/eps, -eta') ds + f_nu(t)(eta(t)) ] under the policy, starting in `start` at x.
McEstimate mc_value_cauchy(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double t,
                           int start, const std::vector<ScalarField>& f, const VelocityPolicy& policy,
                           const McOptions& options = {});

// Exit decision on reaching the boundary of [lo, hi] (1D) in the given state.
using ExitRule = std::function<bool(int state, const Vec& x)>;

struct DirichletPolicy {
  VelocityPolicy velocity;
  ExitRule exit;
  std::string name;
};

using SpeedRule = std::function<double(int state, const Vec& x)>;
// Largest admissible speed: a_i(x/eps) for norm profiles, `fallback` otherwise.
SpeedRule max_speed(const HamiltonianSpec& spec, double epsilon, double fallback = 1.0);

// Move toward `target` and leave when in an allowed state; wait there otherwise.
DirichletPolicy go_and_exit_policy(double target, SpeedRule speed, std::vector<int> exit_states);
DirichletPolicy never_exit_policy();

struct DirichletMcOptions {
  std::size_t paths = 10'000;
  double dt = 0.0;
  double horizon_cap = 20.0;  // the discount e^{-s} makes the tail beyond the cap negligible
};

// E[ int_0^tau e^{-s} L_nu(eta/eps, -eta') ds + e^{-tau} g_nu(tau)(eta(tau)) ] on the interval [lo, hi];
// tau = inf (no terminal term) when the path never exits before the cap.
McEstimate mc_value_dirichlet(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, double x, int start,
                              double lo, double hi, const std::vector<std::array<double, 2>>& g,
                              const DirichletPolicy& policy, const DirichletMcOptions& options = {});

struct DppReport {
  double t = 0.0, h_split = 0.0;
  McEstimate one_shot;
  McEstimate nested;
  double difference = 0.0;     // nested - one_shot, paired over common paths
  double difference_se = 0.0;
  double pde_value = NAN;      // u_start(x, t) from the feedback solve
  double tolerance = 0.0;
  bool pass = false;
};

// One-shot estimate over [0, t] versus running to h_split and plugging in u_nu(h)(eta(h), t - h);
// both use the same paths. Passes when |difference| <= 3 s.e. + scheme_slack.
DppReport check_dpp(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double t,
                    double h_split, int start, const std::vector<ScalarField>& f, const PdeFeedback& pde,
                    double scheme_slack, const McOptions& options = {});

struct EffectiveMcEstimate {
  double h_bar = NAN;
  double std_error = NAN;
  std::string best_policy;
};

// -(1/t) inf over open-loop constant velocities (and, for norm profiles, the max-speed policy along P)
// of E[ int_0^t (L_nu(eta, -eta') - P.eta') ds ] with the chain at unit scale.
EffectiveMcEstimate mc_effective_estimate(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P,
                                          double horizon, std::size_t paths = 2000, std::uint64_t seed = 0,
                                          int lattice = 41);

struct McRow {
  Vec x{0.0, 0.0};
  std::string mode;  // a time ("0.5") or a Dirichlet policy name
  McEstimate estimate;
};

// Columns x[,y],t_or_mode,estimate,std_error,paths,discard_rate.
void write_mc_csv(std::ostream& os, const std::vector<McRow>& rows, int dim);

}  // namespace hjh
