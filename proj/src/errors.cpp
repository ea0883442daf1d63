#include "hjh/errors.hpp"

#include <sstream>

namespace hjh {

namespace {
std::string cfl_message(double requested, double allowed) {
  std::ostringstream os;
  os << "time step " << requested << " violates the CFL bound; required dt <= " << allowed;
  return os.str();
}
}  // namespace

CflViolation::CflViolation(double requested, double allowed)
    : std::runtime_error(cfl_message(requested, allowed)), requested_(requested), allowed_(allowed) {}

NonConvergence::NonConvergence(const std::string& what, std::vector<double> residual_history)
    : std::runtime_error(what), history_(std::move(residual_history)) {}

}  // namespace hjh
