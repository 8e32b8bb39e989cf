#pragma once

// Per-cell sharp bounds on the distribution of each potential outcome.
//
// For a covariate cell with propensity p1 and sensitivity [c_lo, c_hi], each
// arm x gets four envelope cdfs:
//   lo_marginal / hi_marginal  bounds on F_{Y_x | W = w}
//   lo_cross    / hi_cross     bounds on F_{Y_x | X = 1 - x, W = w}
// Every envelope is G(F_obs) for a piecewise-linear map G with a single kink,
// so it lives on the observed arm support. The kink sits at the threshold
// quantiles q_lo / q_hi, and the switching latent scores that attain the
// envelopes change value there.

#include <atomic>
#include <optional>
#include <span>
#include <string>

#include "sensbounds/models.hpp"
#include "sensbounds/step_cdf.hpp"

namespace sensbounds {

enum class Arm { control = 0, treated = 1 };
enum class Side { lo, hi };
enum class Conditioning { marginal, cross };

inline Arm other(Arm a) { return a == Arm::treated ? Arm::control : Arm::treated; }
inline Side flip(Side s) { return s == Side::lo ? Side::hi : Side::lo; }
const char* to_string(Arm a);
const char* to_string(Side s);

/// One covariate value: its weight P(W = w), propensity P(X = 1 | W = w) and
/// the observed outcome law in each arm.
struct Cell {
  std::string id;
  double weight = 0.0;
  double p1 = 0.0;
  StepCdf treated;
  StepCdf control;

  const StepCdf& observed(Arm a) const { return a == Arm::treated ? treated : control; }
  /// P(X = x | W = w).
  double propensity(Arm a) const { return a == Arm::treated ? p1 : 1.0 - p1; }
};

/// Switching thresholds and mass-point constants for one arm. Only defined
/// when c_lo < p1 < c_hi.
struct Thresholds {
  double tau_lo = 0.0;  ///< probability level where the lower envelope switches branch
  double tau_hi = 0.0;  ///< 1 - tau_lo
  double q_lo = 0.0;    ///< observed arm quantile at tau_lo
  double q_hi = 0.0;    ///< observed arm quantile at tau_hi
  /// Mass-point constants. For the treated arm they are the witness score at
  /// the threshold; for the control arm they are P(X = 0 | Y_0 = q), so the
  /// witness score there is 1 - a.
  double a_lo = 0.0;
  double a_hi = 0.0;
};

struct ArmEnvelopes {
  StepCdf lo_marginal;
  StepCdf hi_marginal;
  StepCdf lo_cross;
  StepCdf hi_cross;
  std::optional<Thresholds> thresholds;

  const StepCdf& get(Side side, Conditioning cond) const;
};

struct CellEnvelopes {
  CellSensitivity sensitivity;
  double p1 = 0.0;
  /// True when the sensitivity interval does not strictly contain p1; all
  /// envelopes then equal the observed arm cdfs and thresholds are undefined.
  bool collapsed = false;
  ArmEnvelopes control;
  ArmEnvelopes treated;

  const ArmEnvelopes& arm(Arm a) const { return a == Arm::treated ? treated : control; }
};

CellEnvelopes compute_envelopes(const Cell& cell, const CellSensitivity& s);

/// Bound on the tau-quantile of Y_x (marginal) or of Y_x | X = 1 - x (cross).
/// `side` names the quantile bound: Side::hi is the left inverse of the lower
/// cdf envelope and Side::lo the left inverse of the upper one.
double envelope_quantile(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side,
                         Conditioning cond, double tau);

/// The same quantity through the closed form Q_obs(G^{-1}(tau)).
double envelope_quantile_closed_form(const Cell& cell, const CellEnvelopes& env, Arm arm,
                                     Side side, Conditioning cond, double tau);

/// Number of times envelope_quantile saw the closed form disagree with the
/// left inverse (possible only at exact branch ties); the left inverse wins.
std::size_t envelope_quantile_discrepancies();

/// Three-branch latent propensity score P(X = 1 | Y_x = y, W = w) attaining
/// an envelope. Side::hi attains hi_marginal, Side::lo attains lo_marginal.
struct SwitchingScore {
  double threshold = 0.0;
  double below = 0.0;
  double at = 0.0;
  double above = 0.0;
  bool constant = false;

  double operator()(double y) const {
    if (constant) return at;
    return y < threshold ? below : (y == threshold ? at : above);
  }
};

SwitchingScore switching_score(const Cell& cell, const CellSensitivity& s, Arm arm, Side side);

/// F_{Y_x}(y) bound: weight-averaged per-cell marginal envelopes.
StepCdf aggregate_marginal(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                           Arm arm, Side side);

/// Bound on F_{Y_0 | X = 1}: cross control envelopes averaged with weights
/// P(W = w | X = 1).
StepCdf aggregate_treated_control_outcome(std::span<const Cell> cells,
                                          std::span<const CellEnvelopes> envs, Side side);

/// Observed F_{Y | X = 1}.
StepCdf observed_treated_outcome(std::span<const Cell> cells);

/// Cell weights P(W = w | X = 1).
std::vector<double> treated_weights(std::span<const Cell> cells);

}  // namespace sensbounds
