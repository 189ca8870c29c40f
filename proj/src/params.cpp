#include "deltarec/params.hpp"

#include <cmath>
#include <string>

#include "deltarec/errors.hpp"

namespace deltarec {

void ProblemParams::validate() const {
  if (!std::isfinite(c) || !(c > 0.0)) {
    throw ValidationError("c must be a positive finite number, got " + std::to_string(c));
  }
  if (!std::isfinite(delta) || delta == 0.0) {
    throw ValidationError("delta must be finite and nonzero, got " + std::to_string(delta));
  }
}

bool ProblemParams::delta_is_integer() const noexcept {
  return std::isfinite(delta) && std::nearbyint(delta) == delta;
}

double threshold_lattice(int delta) {
  if (delta < 1) {
    throw ValidationError("lattice threshold needs an integer delta >= 1");
  }
  const double d = static_cast<double>(delta);
  return std::pow(d / (d + 1.0), d + 1.0);
}

bool continuous_members_possible(const ProblemParams& p) noexcept {
  return p.delta > 0.0 && p.c_delta() <= continuous_threshold() * (1.0 + kThresholdSlack);
}

bool lattice_members_possible(const ProblemParams& p) {
  const int d = lattice_delta(p);
  return p.c_delta() <= threshold_lattice(d) * (1.0 + kThresholdSlack);
}

int lattice_delta(const ProblemParams& p) {
  if (!(p.delta >= 1.0) || !p.delta_is_integer()) {
    throw ValidationError(
        "lattice problems need delta to be a positive integer (support Z+); got " +
        std::to_string(p.delta));
  }
  return static_cast<int>(p.delta);
}

}  // namespace deltarec
