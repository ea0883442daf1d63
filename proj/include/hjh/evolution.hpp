#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hjh/coupling.hpp"
#include "hjh/numerical_hamiltonian.hpp"
#include "hjh/state.hpp"

namespace hjh {

// u_i,t + H_i(x/eps, Du_i) + (1/eps)(u_i - sum_j c_ij u_j) = 0 on the torus.
struct EpsSystemProblem {
  HamiltonianSpec spec;
  CouplingMatrix coupling;
  double epsilon;
  TorusGrid grid;
  std::vector<GridFunction> initial;
  double horizon;

  void validate() const;
  // pi . f, the chain-averaged datum.
  GridFunction averaged_initial() const;
};

struct EvolutionOptions {
  FluxKind flux = FluxKind::godunov;
  double r_grad = 4.0;
  double theta = 0.0;  // 0: derived from the Hamiltonian and r_grad
};

class CoupledEvolution {
 public:
  explicit CoupledEvolution(EpsSystemProblem problem, EvolutionOptions options = {});

  const EpsSystemProblem& problem() const noexcept { return problem_; }
  double theta() const noexcept { return theta_; }
  // h / (2 n theta)
  double max_dt() const noexcept { return max_dt_; }

  StateField initial_state() const;
  StateField step(const StateField& state, double dt) const;
  std::vector<StateField> evolve(const std::vector<double>& sample_times) const;

  // Largest one-sided difference quotient met so far by evolve (for the R_grad report).
  double observed_gradient() const noexcept { return observed_gradient_; }

 private:
  void hamiltonian_substep(const StateField& in, StateField& out, double dt) const;
  void coupling_substep(StateField& s, const Eigen::MatrixXd& propagator) const;

  EpsSystemProblem problem_;
  EvolutionOptions options_;
  std::vector<SampledComponent> coeffs_;
  double theta_;
  double max_dt_;
  mutable double observed_gradient_ = 0.0;
};

StateField step(const EpsSystemProblem& problem, const StateField& state, double dt, const EvolutionOptions& options = {});
std::vector<StateField> evolve(const EpsSystemProblem& problem, const std::vector<double>& sample_times,
                               const EvolutionOptions& options = {});

// Rows (t, x[, y], component, value).
void write_snapshots_csv(std::ostream& os, const std::vector<StateField>& snapshots);

struct BarrierPair {
  std::vector<StateField> lower;
  std::vector<StateField> upper;
  double constant = 0.0;
  double gradient_radius = 0.0;  // r = sum_i Lip(f_i)
};

double barrier_constant(const HamiltonianSpec& spec, const TorusGrid& grid, double epsilon, double radius);

// w(t) = (f_bar +/- C t) j + exp((t/eps)(K - I)) (f - f_bar j) at each sample time.
BarrierPair build_barriers(const EpsSystemProblem& problem, const std::vector<double>& times);
BarrierPair build_barriers(const EpsSystemProblem& problem, const std::vector<double>& times, double constant);

struct SandwichReport {
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
  std::size_t violations = 0;
  std::size_t checked = 0;
  double slack = 0.0;
  bool ok() const noexcept { return violations == 0; }
};

SandwichReport check_sandwich(const std::vector<StateField>& run, const BarrierPair& barriers, double slack);

}  // namespace hjh
