#pragma once

// Survival-function representations G = 1 − F used throughout the library.
//
//  * DiscreteSurvival   — atoms a_0 < a_1 < … with G(a_n); right-continuous steps.
//  * ContinuousSolution — uniform grid on [origin, horizon] with trapezoid prefix
//                         integrals; what the method-of-steps solver produces.
//  * ClosedFormSurvival — finite combination of exponential / gamma-type and
//                         geometric / negative-binomial-type terms with exact
//                         tail integrals.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deltarec/params.hpp"

namespace deltarec {

struct DiscreteSurvival {
  std::vector<double> points;    ///< strictly increasing atoms
  std::vector<double> survival;  ///< G(points[i])
  /// The table is a finite prefix of an infinite-support solution.
  bool truncated = false;
  /// ∫_{points.back()}^∞ G(t) dt (includes the flat step after the last atom).
  double tail_beyond = 0.0;

  /// Throws ValidationError on any broken invariant.
  void validate() const;
  double alpha() const { return points.front(); }
};

struct ContinuousSolution {
  ProblemParams params;
  double origin = 0.0;  ///< left end of the grid; G = 1 below it
  double grid_step = 0.0;
  std::size_t points_per_delay = 0;
  std::vector<double> values;  ///< y at origin + i·grid_step
  std::vector<double> prefix;  ///< ∫_origin^{t_i} y
  double tail_beyond = 0.0;    ///< ∫_horizon^∞ y (best estimate)
  double tail_bound = 0.0;     ///< certified upper bound on tail_beyond
  double quadrature_error = 0.0;  ///< estimated trapezoid truncation error

  std::size_t size() const noexcept { return values.size(); }
  double knot(std::size_t i) const noexcept { return origin + grid_step * static_cast<double>(i); }
  double horizon() const noexcept { return knot(values.size() - 1); }
  /// Knot indices of origin + kδ, k = 0, 1, …
  std::vector<std::size_t> step_boundaries() const;
  void validate() const;
};

enum class ComponentKind {
  exponential,  ///< e^{−rate·s}
  exp_linear,   ///< (slope·s + 1)·e^{−rate·s}
  geometric,    ///< ratio^{⌊s⌋+1}
  geom_linear,  ///< (slope·⌊s⌋ + 1)·ratio^{⌊s⌋+1}
};

struct Component {
  ComponentKind kind = ComponentKind::exponential;
  double weight = 1.0;
  double rate = 1.0;   ///< continuous kinds
  double ratio = 0.5;  ///< lattice kinds, in (0,1)
  double slope = 0.0;

  bool lattice() const noexcept {
    return kind == ComponentKind::geometric || kind == ComponentKind::geom_linear;
  }
  /// g(s) for s ≥ 0.
  double value(double s) const;
  /// ∫_s^∞ g for s ≥ 0.
  double tail(double s) const;
};

/// G(x) = 1 for x < origin, Σ weight_i·g_i(x − origin) otherwise. Any mass
/// 1 − G(origin) not carried by the components is an atom at the origin.
struct ClosedFormSurvival {
  double origin = 0.0;
  std::vector<Component> components;
  std::string label;

  bool lattice() const;
  void validate() const;
};

using Survival = std::variant<DiscreteSurvival, ContinuousSolution, ClosedFormSurvival>;

/// Initial segment φ on [0,δ] (continuous) or {0,…,δ} (lattice).
class InitialFunction {
 public:
  enum class Kind { polynomial, table, lattice };

  /// φ(t) = Σ coeffs[k]·t^k on [0,δ].
  static InitialFunction polynomial(std::vector<double> coeffs, double delta);
  /// Piecewise-linear through (xs[i], values[i]); xs[0] = 0 and xs.back() = δ.
  static InitialFunction table(std::vector<double> xs, std::vector<double> values);
  /// φ(i) = values[i], i = 0, …, δ with δ = values.size() − 1.
  static InitialFunction lattice(std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }

  /// φ(t), t ∈ [0,δ]; continuous kinds only.
  double operator()(double t) const;
  /// φ(i); lattice kind only.
  double at(int i) const;

  /// ∫_0^t φ, exact for the polynomial and piecewise-linear kinds.
  double integral(double t) const;
  /// ∫_0^t ∫_0^s φ(u) du ds, exact for the polynomial and piecewise-linear kinds.
  double double_integral(double t) const;

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Membership in Φ: φ(0) = 1, strictly decreasing, φ(δ) > 0.
  void validate_continuous() const;
  /// Membership in Φ_d: values in (0,1), strictly decreasing.
  void validate_lattice() const;

 private:
  Kind kind_ = Kind::polynomial;
  double delta_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<double> xs_;
  std::vector<double> values_;
};

}  // namespace deltarec
