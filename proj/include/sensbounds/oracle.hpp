#pragma once

// Brute-force ground truth on tiny cells.
//
// A latent score assigns each observed support point y of arm x a value
// r(y) = P(X = x | Y_x = y) in the sensitivity range. Each score implies the
// potential-outcome law f_{Y_x|W}(y) = pi f_obs(y) / r(y), which must
// normalize to 1, and the cross law f_{Y_x|X=1-x,W}(y) = f_{Y_x|W}(y)(1 - r(y)) / (1 - pi).
// The enumeration puts every support point but one on a finite grid and
// solves the remaining point's score from the normalization constraint, so
// every reported value is attained by an exactly feasible score.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sensbounds/envelopes.hpp"
#include "sensbounds/params.hpp"

namespace sensbounds::oracle {

/// Largest arm support the enumeration accepts.
inline constexpr std::size_t kMaxSupport = 6;

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double slack = 0.0) const { return lo - slack <= v && v <= hi + slack; }
};

/// Candidate score values {c_lo + k (c_hi - c_lo) / n : k = 0..n}.
class LatentScoreGrid {
 public:
  LatentScoreGrid(const CellSensitivity& s, int resolution);

  int resolution() const { return n_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
};

/// One feasible latent score and the laws it implies, all on the observed
/// arm support.
struct ImpliedLaw {
  std::span<const double> support;
  std::span<const double> score;     ///< P(X = 1 | Y_x = y)
  std::span<const double> marginal;  ///< f_{Y_x | W}
  std::span<const double> cross;     ///< f_{Y_x | X = 1 - x, W}
};

/// Calls `visit` for every enumerated feasible score of one arm. Serial;
/// the range functions below split the same enumeration across threads.
void for_each_feasible(const Cell& cell, const CellSensitivity& s, Arm arm, int resolution,
                       const std::function<void(const ImpliedLaw&)>& visit);

/// Attained range of F_{Y_x | W}(y).
Range attainable_cdf_range(const Cell& cell, const CellSensitivity& s, Arm arm, double y,
                           int resolution);

/// Attained ranges of F_{Y_x | W} (marginal) or F_{Y_x | X = 1 - x, W}
/// (cross) at every observed support point of the arm, from one enumeration.
std::vector<Range> attainable_cdf_band(const Cell& cell, const CellSensitivity& s, Arm arm,
                                       Conditioning cond, int resolution);

enum class CellQuantity { mean, quantile, cross_mean, cross_quantile, cate };

struct CellParameter {
  CellQuantity quantity = CellQuantity::mean;
  Arm arm = Arm::treated;
  double tau = 0.5;
};

/// Attained range of a one-cell parameter. The two arms' scores are
/// unrelated under marginal c-dependence, so the CATE range is assembled
/// from the per-arm mean ranges.
Range attainable_param_range(const Cell& cell, const CellSensitivity& s, const CellParameter& p,
                             int resolution);

/// Exact [min, max] of P(Y_1 - Y_0 <= z) over couplings of f1 and f0. Both
/// supports of size 2 use the one-parameter family; otherwise up to 9 joint
/// cells are handled by visiting every vertex of the transportation polytope.
Range coupling_range(const StepCdf& f1, const StepCdf& f0, double z);

struct WitnessReport {
  bool applicable = true;  ///< false for non-strict sensitivity (constant score)
  bool reweighting = true; ///< (a) implied cdf reproduces the envelope
  bool counterfactual = true; ///< (b) implied cross pmf is a pmf
  bool score_range = true; ///< (c) scores within [c_lo, c_hi]
  bool mean_score = true;  ///< (d) E[score] under the implied law equals p1
  std::string failure;     ///< first violated check, empty on success

  bool passed() const { return reweighting && counterfactual && score_range && mean_score; }
};

/// Checks the switching score attaining the `side` marginal envelope.
WitnessReport verify_witness(const Cell& cell, const CellSensitivity& s, Arm arm, Side side);

/// Same checks for an arbitrary score (e.g. a tampered witness).
WitnessReport verify_score(const Cell& cell, const CellSensitivity& s, Arm arm, Side side,
                           const SwitchingScore& score);

}  // namespace sensbounds::oracle
