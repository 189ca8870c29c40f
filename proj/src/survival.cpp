#include "deltarec/survival.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltarec/errors.hpp"

namespace deltarec {

void DiscreteSurvival::validate() const {
  if (points.empty() || points.size() != survival.size()) {
    throw ValidationError("discrete survival needs matching, non-empty points and survival arrays");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !std::isfinite(survival[i])) {
      throw ValidationError("non-finite entry in discrete survival table", static_cast<double>(i));
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw ValidationError("support points must be strictly increasing", points[i]);
    }
    if (survival[i] < 0.0 || survival[i] >= 1.0) {
      throw ValidationError("survival values must lie in [0,1)", points[i]);
    }
    if (i > 0 && survival[i - 1] > 0.0 && !(survival[i] < survival[i - 1])) {
      throw ValidationError("survival must be strictly decreasing while positive", points[i]);
    }
  }
  if (!truncated && survival.back() != 0.0) {
    throw ValidationError("a complete finite-support table must end with G = 0");
  }
  if (!(tail_beyond >= 0.0) || !std::isfinite(tail_beyond)) {
    throw ValidationError("tail integral beyond the last atom must be finite and nonnegative");
  }
}

std::vector<std::size_t> ContinuousSolution::step_boundaries() const {
  std::vector<std::size_t> out;
  if (points_per_delay == 0) return out;
  for (std::size_t i = 0; i < values.size(); i += points_per_delay) out.push_back(i);
  return out;
}

void ContinuousSolution::validate() const {
  if (values.size() < 2 || prefix.size() != values.size()) {
    throw ValidationError("grid solution needs at least two knots and a matching prefix array");
  }
  if (!(grid_step > 0.0) || points_per_delay == 0) {
    throw ValidationError("grid solution needs a positive grid step");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("non-finite value in grid solution", knot(i));
    }
  }
}

double Component::value(double s) const {
  switch (kind) {
    case ComponentKind::exponential:
      return std::exp(-rate * s);
    case ComponentKind::exp_linear:
      return (slope * s + 1.0) * std::exp(-rate * s);
    case ComponentKind::geometric: {
      const double k = std::floor(s);
      return std::pow(ratio, k + 1.0);
    }
    case ComponentKind::geom_linear: {
      const double k = std::floor(s);
      return (slope * k + 1.0) * std::pow(ratio, k + 1.0);
    }
  }
  return 0.0;
}

double Component::tail(double s) const {
  switch (kind) {
    case ComponentKind::exponential:
      return std::exp(-rate * s) / rate;
    case ComponentKind::exp_linear:
      return std::exp(-rate * s) * ((slope * s + 1.0) / rate + slope / (rate * rate));
    case ComponentKind::geometric: {
      const double k = std::floor(s);
      const double q = ratio;
      return (k + 1.0 - s) * std::pow(q, k + 1.0) + std::pow(q, k + 2.0) / (1.0 - q);
    }
    case ComponentKind::geom_linear: {
      const double k = std::floor(s);
      const double q = ratio;
      const double m = k + 1.0;
      // Σ_{j≥m} (slope·j + 1) q^{j+1}
      const double rest = std::pow(q, m + 1.0) *
                          ((slope * m + 1.0) / (1.0 - q) + slope * q / ((1.0 - q) * (1.0 - q)));
      return (k + 1.0 - s) * (slope * k + 1.0) * std::pow(q, k + 1.0) + rest;
    }
  }
  return 0.0;
}

bool ClosedFormSurvival::lattice() const {
  return !components.empty() && components.front().lattice();
}

void ClosedFormSurvival::validate() const {
  if (components.empty()) throw ValidationError("closed-form survival has no components");
  const bool lat = components.front().lattice();
  double g0 = 0.0;
  for (const Component& comp : components) {
    if (comp.lattice() != lat) {
      throw ValidationError("cannot combine lattice and continuous components (support mismatch)");
    }
    if (!std::isfinite(comp.weight) || comp.weight < 0.0) {
      throw ValidationError("component weights must be finite and nonnegative");
    }
    if (comp.lattice()) {
      if (!(comp.ratio > 0.0 && comp.ratio < 1.0)) {
        throw ValidationError("geometric ratio must lie in (0,1)");
      }
      // (slope·k + 1) ratio^{k+1} is nonincreasing iff slope ≤ (1 − ratio)/ratio.
      if (comp.slope < 0.0 || comp.slope > (1.0 - comp.ratio) / comp.ratio * (1.0 + 1e-12)) {
        throw ValidationError("negative-binomial slope outside [0, (1-q)/q]: G not decreasing");
      }
    } else {
      if (!(comp.rate > 0.0) || !std::isfinite(comp.rate)) {
        throw ValidationError("exponential rate must be positive");
      }
      if (comp.slope < 0.0 || comp.slope > comp.rate * (1.0 + 1e-12)) {
        throw ValidationError("gamma-mixture slope outside [0, rate]: G not decreasing");
      }
    }
    g0 += comp.weight * comp.value(0.0);
  }
  if (g0 > 1.0 + 1e-12) {
    throw ValidationError("closed-form survival exceeds 1 at its origin");
  }
}

InitialFunction InitialFunction::polynomial(std::vector<double> coeffs, double delta) {
  if (coeffs.empty()) throw ValidationError("polynomial initial function needs coefficients");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("continuous initial functions need delta > 0");
  }
  InitialFunction f;
  f.kind_ = Kind::polynomial;
  f.delta_ = delta;
  f.coeffs_ = std::move(coeffs);
  return f;
}

InitialFunction InitialFunction::table(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() < 2 || xs.size() != values.size()) {
    throw ValidationError("table initial function needs at least two (x, value) rows");
  }
  if (xs.front() != 0.0) throw ValidationError("table initial function must start at x = 0");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw ValidationError("table abscissae must be strictly increasing", xs[i]);
    }
  }
  InitialFunction f;
  f.kind_ = Kind::table;
  f.delta_ = xs.back();
  f.xs_ = std::move(xs);
  f.values_ = std::move(values);
  return f;
}

InitialFunction InitialFunction::lattice(std::vector<double> values) {
  if (values.size() < 2) {
    throw ValidationError("lattice initial function needs values on {0,...,delta}, delta >= 1");
  }
  InitialFunction f;
  f.kind_ = Kind::lattice;
  f.delta_ = static_cast<double>(values.size() - 1);
  f.values_ = std::move(values);
  return f;
}

double InitialFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * t + coeffs_[k];
      return acc;
    }
    case Kind::table: {
      if (t <= xs_.front()) return values_.front();
      if (t >= xs_.back()) return values_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double w = (t - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return values_[i] + w * (values_[i + 1] - values_[i]);
    }
    case Kind::lattice:
      break;
  }
  throw ValidationError("lattice initial functions are evaluated with at(i)");
}

double InitialFunction::at(int i) const {
  if (kind_ != Kind::lattice) throw ValidationError("at(i) needs a lattice initial function");
  if (i < 0 || static_cast<std::size_t>(i) >= values_.size()) {
    throw OutOfRangeError("lattice initial function index out of range");
  }
  return values_[static_cast<std::size_t>(i)];
}

double InitialFunction::integral(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) {
        acc = acc * t + coeffs_[k] / static_cast<double>(k + 1);
      }
      return acc * t;
    }
    case Kind::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < xs_.size() && xs_[i] < t; ++i) {
        const double right = std::min(t, xs_[i + 1]);
        const double d = right - xs_[i];
        acc += 0.5 * d * (values_[i] + (*this)(right));
      }
      return acc;
    }
    case Kind::lattice:
      break;
  }
  throw ValidationError("integral() needs a continuous initial function");
}

double InitialFunction::double_integral(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) {
        const double kk = static_cast<double>(k);
        acc = acc * t + coeffs_[k] / ((kk + 1.0) * (kk + 2.0));
      }
      return acc * t * t;
    }
    case Kind::table: {
      double acc = 0.0;
      double inner = 0.0;  // ∫_0^{x_i} φ
      for (std::size_t i = 0; i + 1 < xs_.size() && xs_[i] < t; ++i) {
        const double right = std::min(t, xs_[i + 1]);
        const double d = right - xs_[i];
        const double slope = (values_[i + 1] - values_[i]) / (xs_[i + 1] - xs_[i]);
        acc += inner * d + values_[i] * d * d / 2.0 + slope * d * d * d / 6.0;
        inner += values_[i] * d + slope * d * d / 2.0;
      }
      return acc;
    }
    case Kind::lattice:
      break;
  }
  throw ValidationError("double_integral() needs a continuous initial function");
}

void InitialFunction::validate_continuous() const {
  if (kind_ == Kind::lattice) {
    throw ValidationError("expected a continuous initial function, got a lattice table");
  }
  constexpr double kTol = 1e-12;
  if (std::fabs((*this)(0.0) - 1.0) > kTol) {
    throw ValidationError("phi(0) must equal 1 (phi not in Phi)", 0.0);
  }
  if (!((*this)(delta_) > 0.0)) {
    throw ValidationError("phi(delta) must be positive (phi not in Phi)", delta_);
  }
  if (kind_ == Kind::table) {
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (!(values_[i] < values_[i - 1])) {
        throw ValidationError("phi must be strictly decreasing (phi not in Phi)", xs_[i]);
      }
    }
    return;
  }
  constexpr int kSamples = 4096;
  double prev = (*this)(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double t = delta_ * static_cast<double>(i) / kSamples;
    const double v = (*this)(t);
    if (!std::isfinite(v) || !(v < prev)) {
      throw ValidationError("phi must be strictly decreasing (phi not in Phi)", t);
    }
    prev = v;
  }
}

void InitialFunction::validate_lattice() const {
  if (kind_ != Kind::lattice) {
    throw ValidationError("expected a lattice initial function");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0 && values_[i] < 1.0)) {
      throw ValidationError("lattice phi values must lie in (0,1) (phi not in Phi_d)",
                            static_cast<double>(i));
    }
    if (i > 0 && !(values_[i] < values_[i - 1])) {
      throw ValidationError("lattice phi must be strictly decreasing (phi not in Phi_d)",
                            static_cast<double>(i));
    }
  }
}

}  // namespace deltarec
