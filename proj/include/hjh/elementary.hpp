#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hjh/effective_table.hpp"

namespace hjh {

struct ElementaryMetadata {
  bool convex = false;                         // every H_i convex in p
  bool homogeneous = false;                    // every H_i positively homogeneous of degree one
  const EffectiveTable* single = nullptr;      // table of the common H when H_1 = H_2 = H
  const EffectiveTable* max_table = nullptr;   // table of K = max_i H_i on the same lattice
  double collapse_tol = 1e-12;
  double homogeneity_tol = 0.05;
  double max_tol = 0.05;
  double convexity_factor = 2.0;  // midpoint slack in units of the triple's largest err_bar
  double coercivity_slack = 0.0;
};

ElementaryMetadata metadata_for(const HamiltonianSpec& spec);

struct CheckResult {
  std::string name;
  bool applicable = false;
  bool pass = true;
  double worst = 0.0;  // largest violation found (<= 0 when passing)
  std::size_t count = 0;
};

struct ElementaryReport {
  std::vector<CheckResult> checks;
  bool pass() const;
  const CheckResult& find(const std::string& name) const;
};

// Coercivity along rays, midpoint convexity, H1 = H2 collapse, degree-one scaling, H <= K.
ElementaryReport run_elementary_checks(const EffectiveTable& table, const ElementaryMetadata& meta);

// max_i H_i when all components share profile and speed: a F(|p|^2) - min_i V_i.
HamiltonianSpec max_hamiltonian(const HamiltonianSpec& spec);

nlohmann::json to_json(const ElementaryReport& r);

}  // namespace hjh
