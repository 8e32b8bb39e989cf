#pragma once

// Sharp identified intervals for treatment-effect parameters.
//
// Copula-free parameters are monotone in first-order stochastic dominance,
// so their bounds come from evaluating the parameter at envelope cdfs; which
// envelope enters which endpoint is fixed by the orientation table below.
// The joint cdf, the distribution of treatment effects and its quantiles also
// range over copulas and use Frechet-Hoeffding and Makarov bounds on top of
// the conditional envelopes.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensbounds/envelopes.hpp"

namespace sensbounds {

enum class Estimand { ate, wate, cate, att, qte, cqte, qtt, qcate, aww, joint_cdf, dte, qdte };

std::string_view tag(Estimand e);
std::optional<Estimand> parse_estimand(std::string_view name);

/// Dependence of a parameter on F_{Y_1 | .} and F_{Y_0 | .} in the
/// first-order-dominance sense (increasing: a stochastically larger Y_x raises
/// the parameter).
enum class Direction { increasing, decreasing, none };

struct Orientation {
  Direction treated = Direction::none;
  Direction control = Direction::none;
  bool copula_dependent = false;
};

Orientation orientation(Estimand e);

struct BoundInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::string estimand;
  std::string sensitivity;
  std::vector<std::string> flags;

  double width() const { return hi - lo; }
  bool contains(double v, double slack = 0.0) const { return lo - slack <= v && v <= hi + slack; }
  bool contains(const BoundInterval& inner, double slack = 0.0) const {
    return lo - slack <= inner.lo && inner.hi <= hi + slack;
  }
};

/// One admissible set of conditional potential-outcome laws for a cell.
struct PotentialLaws {
  StepCdf treated;        ///< F_{Y_1 | W = w}
  StepCdf control;        ///< F_{Y_0 | W = w}
  StepCdf treated_cross;  ///< F_{Y_1 | X = 0, W = w}
  StepCdf control_cross;  ///< F_{Y_0 | X = 1, W = w}
};

/// Laws at the envelopes of the given sides (Side::hi is the upper cdf).
PotentialLaws laws_at(const CellEnvelopes& env, Side treated_side, Side control_side);

/// eps * lower + (1 - eps) * upper envelope, per arm.
PotentialLaws mixed_laws(const CellEnvelopes& env, double eps_treated, double eps_control);

/// Weight function omega(w), aligned with the cells.
using WeightFunction = std::vector<double>;

// Parameter values at a given set of laws (one PotentialLaws per cell).
namespace functional {
double cate(const PotentialLaws& laws);
double wate(std::span<const Cell> cells, std::span<const PotentialLaws> laws,
            std::span<const double> omega);
double att(std::span<const Cell> cells, std::span<const PotentialLaws> laws);
double cqte(const PotentialLaws& laws, double tau);
double qte(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau);
double qtt(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau);
double qcate(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau);
double aww(std::span<const Cell> cells, std::span<const PotentialLaws> laws,
           std::span<const double> omega);
}  // namespace functional

/// Lower Makarov bound on P(Y_1 - Y_0 <= z) for fixed marginals.
double makarov_lower(const StepCdf& f1, const StepCdf& f0, double z);
/// Upper Makarov bound on P(Y_1 - Y_0 <= z) for fixed marginals.
double makarov_upper(const StepCdf& f1, const StepCdf& f0, double z);

/// Mean of an envelope through the truncated-mean closed form.
double envelope_mean_closed_form(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side);
/// The continuous-outcome simplification of the same formula; equals the
/// mean only when the observed arm has no mass exactly at the threshold.
double envelope_mean_continuous(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side);

BoundInterval cate_bounds(const Cell& cell, const CellEnvelopes& env);
BoundInterval ate_wate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                              std::span<const double> omega);
BoundInterval ate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs);
BoundInterval att_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs);
BoundInterval cqte_bounds(const Cell& cell, const CellEnvelopes& env, double tau);
BoundInterval qte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double tau);
BoundInterval qtt_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double tau);
BoundInterval qcate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                           double tau);
BoundInterval aww_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         std::span<const double> omega);
BoundInterval joint_cdf_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                               double y1, double y0);
BoundInterval dte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double z);
BoundInterval qdte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                          double tau);

/// Candidate points for the DTE step functions: sorted pairwise differences
/// of treated and control support values across cells.
std::vector<double> dte_jump_points(std::span<const Cell> cells);

/// A fully specified parameter request.
struct EstimandRequest {
  Estimand estimand = Estimand::ate;
  double tau = 0.5;
  double z = 0.0;
  double y1 = 0.0;
  double y0 = 0.0;
  std::string cell;     ///< cate / cqte: which cell
  WeightFunction omega; ///< wate / aww: aligned with cells; empty means all ones

  /// Parameter part of a report row, e.g. "tau=0.5".
  std::string describe() const;
};

BoundInterval evaluate(const EstimandRequest& req, std::span<const Cell> cells,
                       std::span<const CellEnvelopes> envs);

}  // namespace sensbounds
