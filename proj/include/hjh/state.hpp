#pragma once

#include <utility>
#include <vector>

#include "hjh/grid.hpp"

namespace hjh {

struct StateField {
  TorusGrid grid;
  std::vector<GridFunction> components;
  double time = 0.0;

  StateField(TorusGrid g, std::vector<GridFunction> c, double t = 0.0);

  int m() const noexcept { return static_cast<int>(components.size()); }
  void validate() const;
};

// One-sided periodic difference quotients per axis at gridpoint k of component i.
std::pair<Vec, Vec> upwind_gradients(const StateField& field, int i, std::size_t k);

}  // namespace hjh
