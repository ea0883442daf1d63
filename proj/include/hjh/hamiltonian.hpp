#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hjh/grid.hpp"

namespace hjh {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// H(xi, p) = a(xi) F(|p|^2) - V(xi) with
//   quadratic:   F(s) = s
//   norm:        F(s) = sqrt(s)
//   double_well: F(s) = (s - 1)^2
enum class Profile { quadratic, norm, double_well };

const char* to_string(Profile p);

inline double profile_value(Profile p, double s) {
  switch (p) {
    case Profile::quadratic: return s;
    case Profile::norm: return std::sqrt(s);
    case Profile::double_well: return (s - 1.0) * (s - 1.0);
  }
  return s;
}

struct Coefficient {
  std::string name;
  ScalarField fn;
  bool is_constant = false;
  double constant_value = 0.0;

  static Coefficient constant(double value);
  double operator()(const Vec& xi) const { return is_constant ? constant_value : fn(xi); }
};

struct Component {
  Profile profile = Profile::quadratic;
  Coefficient speed = Coefficient::constant(1.0);
  Coefficient potential = Coefficient::constant(0.0);

  double eval(const Vec& xi, const Vec& p, int dim) const;
  std::string describe() const;
};

class HamiltonianSpec {
 public:
  HamiltonianSpec(int dim, std::vector<Component> components);

  int dim() const noexcept { return dim_; }
  int m() const noexcept { return static_cast<int>(components_.size()); }
  const Component& component(int i) const { return components_.at(i); }
  const std::vector<Component>& components() const noexcept { return components_; }

  double eval(int i, const Vec& xi, const Vec& p) const { return components_[i].eval(xi, p, dim_); }

  bool convex_in_p(int i) const;
  // Global Lipschitz constant in p; +inf when H grows superlinearly.
  double lip_p(int i) const;
  bool separable(int i) const;  // |p|^2 - V(xi)
  bool homogeneous_degree_one(int i) const;
  bool even_in_p(int) const { return true; }

  // Sampled ranges of the coefficients over the cell.
  double speed_min(int i) const { return stats_.at(i).a_min; }
  double speed_max(int i) const { return stats_.at(i).a_max; }
  double potential_min(int i) const { return stats_.at(i).v_min; }
  double potential_max(int i) const { return stats_.at(i).v_max; }

  // Per-axis bound of |dH_i/dp_k| over |p| <= r_grad, maximized over i.
  double flux_bound(double r_grad) const;
  double flux_bound(int i, double r_grad) const;

  // Convex dual for the closed-form families; kInfiniteCost outside the domain.
  double lagrangian(int i, const Vec& xi, const Vec& q) const;
  // A maximizer of p.q - H(xi, p): q = dH/dp at p.
  Vec velocity(int i, const Vec& xi, const Vec& p) const;

  std::string describe() const;

 private:
  struct Stats {
    double a_min, a_max, v_min, v_max;
  };
  int dim_;
  std::vector<Component> components_;
  std::vector<Stats> stats_;
};

// max over a p-lattice of radius p_radius of (p.q - H_i(xi,p)); values above cap become kInfiniteCost.
std::vector<double> legendre_transform(const HamiltonianSpec& spec, int i, const Vec& xi,
                                       const std::vector<Vec>& q_samples, double p_radius,
                                       int lattice_points = 2001, double cap = 1e6);

// Largest |H_i(xi + e_k, p) - H_i(xi, p)| over a pseudo-random sample.
double periodicity_defect(const HamiltonianSpec& spec, int samples = 100, double p_range = 4.0);
// True when H_i(xi, p) > H_i(xi, 0) at |p| = r_max along sampled directions.
bool coercivity_probe(const HamiltonianSpec& spec, double r_max, int samples = 64);

// Coefficients sampled once on a grid, for the solver kernels.
struct SampledComponent {
  Profile profile;
  GridFunction speed;
  GridFunction potential;
};
std::vector<SampledComponent> sample_components(const HamiltonianSpec& spec, const TorusGrid& grid,
                                                double scale = 1.0);

}  // namespace hjh
