#include "sensbounds/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "sensbounds/errors.hpp"

namespace sensbounds {

namespace {

constexpr double kOrderSlack = 1e-12;

struct EstimandInfo {
  Estimand estimand;
  std::string_view tag;
  Orientation orientation;
};

// Orientation follows from each parameter's definition: means and quantiles
// of Y_1 increase with Y_1; cdf-type parameters of Y_1 (joint cdf, DTE)
// decrease with it.
constexpr std::array<EstimandInfo, 12> kEstimands{{
    {Estimand::ate, "ate", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::wate, "wate", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::cate, "cate", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::att, "att", {Direction::none, Direction::decreasing, false}},
    {Estimand::qte, "qte", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::cqte, "cqte", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::qtt, "qtt", {Direction::none, Direction::decreasing, false}},
    {Estimand::qcate, "qcate", {Direction::increasing, Direction::decreasing, false}},
    {Estimand::aww, "aww", {Direction::increasing, Direction::increasing, false}},
    {Estimand::joint_cdf, "joint_cdf", {Direction::decreasing, Direction::decreasing, true}},
    {Estimand::dte, "dte", {Direction::decreasing, Direction::increasing, true}},
    {Estimand::qdte, "qdte", {Direction::increasing, Direction::decreasing, true}},
}};

const EstimandInfo& info(Estimand e) {
  for (const auto& i : kEstimands)
    if (i.estimand == e) return i;
  throw InputError("estimand not in the orientation table");
}

// Envelope side giving the smallest parameter value for a given direction.
Side minimizing_side(Direction d) { return d == Direction::decreasing ? Side::lo : Side::hi; }

std::string describe_sensitivity(std::span<const CellEnvelopes> envs) {
  std::ostringstream out;
  out.precision(12);
  if (envs.size() == 1) {
    out << "c=[" << envs[0].sensitivity.c_lo << "," << envs[0].sensitivity.c_hi << "]";
  } else {
    out << "cells=" << envs.size();
  }
  return out.str();
}

BoundInterval make_interval(Estimand e, double lo, double hi,
                            std::span<const CellEnvelopes> envs) {
  if (!(lo <= hi + kOrderSlack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << tag(e) << ": lower endpoint " << lo << " exceeds upper endpoint " << hi;
    throw InvariantError(msg.str());
  }
  BoundInterval out{lo, std::max(lo, hi), std::string(tag(e)), describe_sensitivity(envs), {}};
  if (std::all_of(envs.begin(), envs.end(), [](const auto& env) { return env.collapsed; }))
    out.flags.emplace_back("collapsed-sensitivity");
  return out;
}

std::vector<PotentialLaws> all_laws(std::span<const CellEnvelopes> envs, Side treated,
                                    Side control) {
  std::vector<PotentialLaws> out;
  out.reserve(envs.size());
  for (const auto& env : envs) out.push_back(laws_at(env, treated, control));
  return out;
}

// Evaluates a copula-free parameter at the two envelope corners picked by its
// orientation.
template <typename Functional>
std::pair<double, double> monotone_endpoints(Estimand e, std::span<const CellEnvelopes> envs,
                                             Functional&& theta) {
  const Orientation o = orientation(e);
  const Side t_lo = minimizing_side(o.treated);
  const Side c_lo = minimizing_side(o.control);
  const double lo = theta(all_laws(envs, t_lo, c_lo));
  const double hi = theta(all_laws(envs, flip(t_lo), flip(c_lo)));
  return {lo, hi};
}

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0, 1)");
}

void require_aligned(std::span<const Cell> cells, std::span<const CellEnvelopes> envs) {
  if (cells.empty()) throw InputError("no cells");
  if (cells.size() != envs.size()) throw InputError("cells and envelopes are misaligned");
}

void require_omega(std::span<const Cell> cells, std::span<const double> omega, double max) {
  if (omega.size() != cells.size()) throw InputError("weight function is not aligned with cells");
  for (double w : omega) {
    if (!(w >= 0.0)) throw InputError("weight function must be nonnegative");
    if (w > max) throw InputError("weight function must lie in [0, 1]");
  }
}

}  // namespace

std::string_view tag(Estimand e) { return info(e).tag; }

std::optional<Estimand> parse_estimand(std::string_view name) {
  for (const auto& i : kEstimands)
    if (i.tag == name) return i.estimand;
  return std::nullopt;
}

Orientation orientation(Estimand e) { return info(e).orientation; }

PotentialLaws laws_at(const CellEnvelopes& env, Side treated_side, Side control_side) {
  return {env.treated.get(treated_side, Conditioning::marginal),
          env.control.get(control_side, Conditioning::marginal),
          env.treated.get(treated_side, Conditioning::cross),
          env.control.get(control_side, Conditioning::cross)};
}

PotentialLaws mixed_laws(const CellEnvelopes& env, double eps_treated, double eps_control) {
  return {mix(env.treated.lo_marginal, env.treated.hi_marginal, eps_treated),
          mix(env.control.lo_marginal, env.control.hi_marginal, eps_control),
          mix(env.treated.lo_cross, env.treated.hi_cross, eps_treated),
          mix(env.control.lo_cross, env.control.hi_cross, eps_control)};
}

namespace functional {

double cate(const PotentialLaws& laws) { return laws.treated.mean() - laws.control.mean(); }

double wate(std::span<const Cell> cells, std::span<const PotentialLaws> laws,
            std::span<const double> omega) {
  double acc = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) acc += cells[i].weight * omega[i] * cate(laws[i]);
  return acc;
}

double att(std::span<const Cell> cells, std::span<const PotentialLaws> laws) {
  const auto tw = treated_weights(cells);
  double observed = 0.0;
  double counterfactual = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    observed += tw[i] * cells[i].treated.mean();
    counterfactual += tw[i] * laws[i].control_cross.mean();
  }
  return observed - counterfactual;
}

double cqte(const PotentialLaws& laws, double tau) {
  return laws.treated.quantile(tau) - laws.control.quantile(tau);
}

double qte(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau) {
  std::vector<StepCdf> f1;
  std::vector<StepCdf> f0;
  std::vector<double> w;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    f1.push_back(laws[i].treated);
    f0.push_back(laws[i].control);
    w.push_back(cells[i].weight);
  }
  return StepCdf::weighted_average(f1, w).quantile(tau) -
         StepCdf::weighted_average(f0, w).quantile(tau);
}

double qtt(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau) {
  std::vector<StepCdf> f0;
  for (const auto& l : laws) f0.push_back(l.control_cross);
  return observed_treated_outcome(cells).quantile(tau) -
         StepCdf::weighted_average(f0, treated_weights(cells)).quantile(tau);
}

double qcate(std::span<const Cell> cells, std::span<const PotentialLaws> laws, double tau) {
  std::vector<double> values;
  std::vector<double> w;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    values.push_back(cate(laws[i]));
    w.push_back(cells[i].weight);
  }
  return StepCdf::from_masses(std::move(values), std::move(w)).quantile(tau);
}

double aww(std::span<const Cell> cells, std::span<const PotentialLaws> laws,
           std::span<const double> omega) {
  double acc = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    acc += cells[i].weight *
           (omega[i] * laws[i].treated.mean() + (1.0 - omega[i]) * laws[i].control.mean());
  return acc;
}

}  // namespace functional

// With step cdfs the supremum over y of F1(y) - F0(y - z) is approached at
// candidate points y in supp(F1) or y - z in supp(F0). At each candidate both
// one-sided versions are scored; the lower bound pairs F1(y) with F0((y-z)-),
// which is what the exact coupling extremes of discrete marginals require.
double makarov_lower(const StepCdf& f1, const StepCdf& f0, double z) {
  double best = 0.0;
  for (double y : f1.support()) {
    const double right = f1.eval(y);
    best = std::max({best, right - eval_snapped(f0, y - z), right - left_limit_snapped(f0, y - z)});
  }
  for (double y0 : f0.support()) {
    const double right = eval_snapped(f1, y0 + z);
    best = std::max({best, right - f0.eval(y0), right - f0.left_limit(y0)});
  }
  return std::clamp(best, 0.0, 1.0);
}

double makarov_upper(const StepCdf& f1, const StepCdf& f0, double z) {
  double worst = 0.0;
  for (double y : f1.support()) {
    worst = std::min({worst, f1.eval(y) - eval_snapped(f0, y - z),
                      f1.left_limit(y) - left_limit_snapped(f0, y - z)});
  }
  for (double y0 : f0.support()) {
    worst = std::min({worst, eval_snapped(f1, y0 + z) - f0.eval(y0),
                      left_limit_snapped(f1, y0 + z) - f0.left_limit(y0)});
  }
  return std::clamp(1.0 + worst, 0.0, 1.0);
}

namespace {

// Slopes of the envelope map below and above the threshold, plus threshold
// level and quantile.
struct EnvelopePieces {
  double below_slope;
  double above_slope;
  double tau;
  double q;
};

EnvelopePieces pieces(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side) {
  const Thresholds& t = *env.arm(arm).thresholds;
  const double pi = cell.propensity(arm);
  const double r_lo = arm == Arm::treated ? env.sensitivity.c_lo : 1.0 - env.sensitivity.c_hi;
  const double r_hi = arm == Arm::treated ? env.sensitivity.c_hi : 1.0 - env.sensitivity.c_lo;
  if (side == Side::hi) return {pi / r_lo, pi / r_hi, t.tau_hi, t.q_hi};
  return {pi / r_hi, pi / r_lo, t.tau_lo, t.q_lo};
}

}  // namespace

double envelope_mean_closed_form(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side) {
  const StepCdf& f = cell.observed(arm);
  if (env.collapsed) return f.mean();
  const EnvelopePieces p = pieces(cell, env, arm, side);
  const TruncatedMeans tm = f.truncated_means(p.tau);
  const double excess = tm.cutoff * (tm.mass_at_or_below - p.tau);
  const double lower = tm.lower_mean * tm.mass_at_or_below - excess;
  const double upper = (tm.upper_empty ? 0.0 : tm.upper_mean * (1.0 - tm.mass_at_or_below)) + excess;
  return p.below_slope * lower + p.above_slope * upper;
}

double envelope_mean_continuous(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side) {
  const StepCdf& f = cell.observed(arm);
  if (env.collapsed) return f.mean();
  const EnvelopePieces p = pieces(cell, env, arm, side);
  const TruncatedMeans tm = f.truncated_means(p.tau);
  return p.below_slope * p.tau * tm.lower_mean + p.above_slope * (1.0 - p.tau) * tm.upper_mean;
}

BoundInterval cate_bounds(const Cell& cell, const CellEnvelopes& env) {
  const CellEnvelopes one[] = {env};
  auto [lo, hi] = monotone_endpoints(Estimand::cate, one, [](const std::vector<PotentialLaws>& l) {
    return functional::cate(l[0]);
  });
  // Cross-check the envelope means against the truncated-mean closed form.
  const double scale = std::max({1.0, std::abs(cell.treated.min_value()),
                                 std::abs(cell.treated.max_value()),
                                 std::abs(cell.control.min_value()),
                                 std::abs(cell.control.max_value())});
  const double closed_lo = envelope_mean_closed_form(cell, env, Arm::treated, Side::hi) -
                           envelope_mean_closed_form(cell, env, Arm::control, Side::lo);
  const double closed_hi = envelope_mean_closed_form(cell, env, Arm::treated, Side::lo) -
                           envelope_mean_closed_form(cell, env, Arm::control, Side::hi);
  if (std::abs(closed_lo - lo) > 1e-10 * scale || std::abs(closed_hi - hi) > 1e-10 * scale)
    throw InvariantError("cate: envelope means disagree with the truncated-mean closed form");
  return make_interval(Estimand::cate, lo, hi, one);
}

BoundInterval ate_wate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                              std::span<const double> omega) {
  require_aligned(cells, envs);
  require_omega(cells, omega, std::numeric_limits<double>::infinity());
  auto [lo, hi] = monotone_endpoints(Estimand::wate, envs, [&](const auto& l) {
    return functional::wate(cells, l, omega);
  });
  return make_interval(Estimand::wate, lo, hi, envs);
}

BoundInterval ate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs) {
  const std::vector<double> ones(cells.size(), 1.0);
  auto out = ate_wate_bounds(cells, envs, ones);
  out.estimand = tag(Estimand::ate);
  return out;
}

BoundInterval att_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs) {
  require_aligned(cells, envs);
  auto [lo, hi] = monotone_endpoints(Estimand::att, envs,
                                     [&](const auto& l) { return functional::att(cells, l); });
  return make_interval(Estimand::att, lo, hi, envs);
}

BoundInterval cqte_bounds(const Cell& cell, const CellEnvelopes& env, double tau) {
  require_tau(tau);
  const CellEnvelopes one[] = {env};
  // Routed through envelope_quantile so the closed-form inverse is
  // cross-checked on every call.
  auto q = [&](Arm arm, Side side) {
    return envelope_quantile(cell, env, arm, side, Conditioning::marginal, tau);
  };
  const double lo = q(Arm::treated, Side::lo) - q(Arm::control, Side::hi);
  const double hi = q(Arm::treated, Side::hi) - q(Arm::control, Side::lo);
  return make_interval(Estimand::cqte, lo, hi, one);
}

BoundInterval qte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double tau) {
  require_tau(tau);
  require_aligned(cells, envs);
  auto [lo, hi] = monotone_endpoints(Estimand::qte, envs,
                                     [&](const auto& l) { return functional::qte(cells, l, tau); });
  return make_interval(Estimand::qte, lo, hi, envs);
}

BoundInterval qtt_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double tau) {
  require_tau(tau);
  require_aligned(cells, envs);
  auto [lo, hi] = monotone_endpoints(Estimand::qtt, envs,
                                     [&](const auto& l) { return functional::qtt(cells, l, tau); });
  return make_interval(Estimand::qtt, lo, hi, envs);
}

BoundInterval qcate_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                           double tau) {
  require_tau(tau);
  require_aligned(cells, envs);
  auto [lo, hi] = monotone_endpoints(Estimand::qcate, envs, [&](const auto& l) {
    return functional::qcate(cells, l, tau);
  });
  return make_interval(Estimand::qcate, lo, hi, envs);
}

BoundInterval aww_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         std::span<const double> omega) {
  require_aligned(cells, envs);
  require_omega(cells, omega, 1.0);
  auto [lo, hi] = monotone_endpoints(Estimand::aww, envs, [&](const auto& l) {
    return functional::aww(cells, l, omega);
  });
  return make_interval(Estimand::aww, lo, hi, envs);
}

BoundInterval joint_cdf_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                               double y1, double y0) {
  require_aligned(cells, envs);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const PotentialLaws low = laws_at(envs[i], Side::lo, Side::lo);
    const PotentialLaws up = laws_at(envs[i], Side::hi, Side::hi);
    const double w1 = c.weight * c.p1;
    const double w0 = c.weight * (1.0 - c.p1);
    lo += w1 * std::max(c.treated.eval(y1) + low.control_cross.eval(y0) - 1.0, 0.0) +
          w0 * std::max(low.treated_cross.eval(y1) + c.control.eval(y0) - 1.0, 0.0);
    hi += w1 * std::min(c.treated.eval(y1), up.control_cross.eval(y0)) +
          w0 * std::min(up.treated_cross.eval(y1), c.control.eval(y0));
  }
  return make_interval(Estimand::joint_cdf, std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0),
                       envs);
}

namespace {

struct DteCurves {
  double lo;
  double hi;
};

DteCurves dte_values(std::span<const Cell> cells, std::span<const CellEnvelopes> envs, double z) {
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const PotentialLaws for_lo = laws_at(envs[i], Side::lo, Side::hi);
    const PotentialLaws for_hi = laws_at(envs[i], Side::hi, Side::lo);
    const double w1 = c.weight * c.p1;
    const double w0 = c.weight * (1.0 - c.p1);
    lo += w1 * makarov_lower(c.treated, for_lo.control_cross, z) +
          w0 * makarov_lower(for_lo.treated_cross, c.control, z);
    hi += w1 * makarov_upper(c.treated, for_hi.control_cross, z) +
          w0 * makarov_upper(for_hi.treated_cross, c.control, z);
  }
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

}  // namespace

BoundInterval dte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                         double z) {
  require_aligned(cells, envs);
  const DteCurves v = dte_values(cells, envs, z);
  return make_interval(Estimand::dte, v.lo, v.hi, envs);
}

std::vector<double> dte_jump_points(std::span<const Cell> cells) {
  std::vector<StepCdf> t;
  std::vector<StepCdf> c;
  for (const auto& cell : cells) {
    t.push_back(cell.treated);
    c.push_back(cell.control);
  }
  const auto s1 = merged_support(t);
  const auto s0 = merged_support(c);
  std::vector<double> diffs;
  diffs.reserve(s1.size() * s0.size());
  for (double a : s1)
    for (double b : s0) diffs.push_back(a - b);
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());
  return diffs;
}

BoundInterval qdte_bounds(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                          double tau) {
  require_tau(tau);
  require_aligned(cells, envs);
  const auto z = dte_jump_points(cells);
  // Both curves are nondecreasing right-continuous steps jumping only at z;
  // the left inverse is the first candidate reaching tau.
  auto first_reaching = [&](bool upper_curve) {
    auto it = std::partition_point(z.begin(), z.end(), [&](double zz) {
      const DteCurves v = dte_values(cells, envs, zz);
      return (upper_curve ? v.hi : v.lo) < tau;
    });
    return it == z.end() ? z.back() : *it;
  };
  return make_interval(Estimand::qdte, first_reaching(true), first_reaching(false), envs);
}

std::string EstimandRequest::describe() const {
  std::ostringstream out;
  out.precision(12);
  switch (estimand) {
    case Estimand::qte:
    case Estimand::qtt:
    case Estimand::qcate:
    case Estimand::qdte:
      out << "tau=" << tau;
      break;
    case Estimand::cqte:
      out << "cell=" << cell << ";tau=" << tau;
      break;
    case Estimand::cate:
      out << "cell=" << cell;
      break;
    case Estimand::dte:
      out << "z=" << z;
      break;
    case Estimand::joint_cdf:
      out << "y1=" << y1 << ";y0=" << y0;
      break;
    case Estimand::wate:
    case Estimand::aww:
      out << "omega=";
      if (omega.empty()) {
        out << "1";
      } else {
        for (std::size_t i = 0; i < omega.size(); ++i) out << (i ? "|" : "") << omega[i];
      }
      break;
    default:
      break;
  }
  return out.str();
}

BoundInterval evaluate(const EstimandRequest& req, std::span<const Cell> cells,
                       std::span<const CellEnvelopes> envs) {
  require_aligned(cells, envs);
  auto find_cell = [&]() -> std::size_t {
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].id == req.cell) return i;
    if (req.cell.empty() && cells.size() == 1) return 0;
    throw InputError("unknown cell '" + req.cell + "'");
  };
  const WeightFunction omega =
      req.omega.empty() ? WeightFunction(cells.size(), 1.0) : req.omega;
  switch (req.estimand) {
    case Estimand::ate:
      return ate_bounds(cells, envs);
    case Estimand::wate:
      return ate_wate_bounds(cells, envs, omega);
    case Estimand::cate: {
      const auto i = find_cell();
      return cate_bounds(cells[i], envs[i]);
    }
    case Estimand::att:
      return att_bounds(cells, envs);
    case Estimand::qte:
      return qte_bounds(cells, envs, req.tau);
    case Estimand::cqte: {
      const auto i = find_cell();
      return cqte_bounds(cells[i], envs[i], req.tau);
    }
    case Estimand::qtt:
      return qtt_bounds(cells, envs, req.tau);
    case Estimand::qcate:
      return qcate_bounds(cells, envs, req.tau);
    case Estimand::aww:
      return aww_bounds(cells, envs, omega);
    case Estimand::joint_cdf:
      return joint_cdf_bounds(cells, envs, req.y1, req.y0);
    case Estimand::dte:
      return dte_bounds(cells, envs, req.z);
    case Estimand::qdte:
      return qdte_bounds(cells, envs, req.tau);
  }
  throw InputError("unsupported estimand");
}

}  // namespace sensbounds
