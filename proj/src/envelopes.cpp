#include "sensbounds/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sensbounds/errors.hpp"

namespace sensbounds {

const char* to_string(Arm a) { return a == Arm::treated ? "treated" : "control"; }
const char* to_string(Side s) { return s == Side::lo ? "lo" : "hi"; }

const StepCdf& ArmEnvelopes::get(Side side, Conditioning cond) const {
  if (cond == Conditioning::marginal) return side == Side::lo ? lo_marginal : hi_marginal;
  return side == Side::lo ? lo_cross : hi_cross;
}

namespace {

std::atomic<std::size_t> g_quantile_discrepancies{0};

// G(u) = min{a u, 1 - b (1 - u)} (upper envelope) or the max (lower envelope).
struct KinkMap {
  double a = 1.0;
  double b = 1.0;
  bool upper = true;

  double operator()(double u) const {
    const double first = a * u;
    const double second = 1.0 - b * (1.0 - u);
    return std::clamp(upper ? std::min(first, second) : std::max(first, second), 0.0, 1.0);
  }
  double inverse(double tau) const {
    const double first = tau / a;
    const double second = 1.0 - (1.0 - tau) / b;
    return upper ? std::max(first, second) : std::min(first, second);
  }
};

// Bounds on r(y) = P(X = x | Y_x = y): [lo, hi] = [c_lo, c_hi] for the treated
// arm and [1 - c_hi, 1 - c_lo] for the control arm. pi = P(X = x | W = w).
struct ArmScoreBounds {
  double pi;
  double lo;
  double hi;
};

ArmScoreBounds arm_bounds(double p1, const CellSensitivity& s, Arm arm) {
  if (arm == Arm::treated) return {p1, s.c_lo, s.c_hi};
  return {1.0 - p1, 1.0 - s.c_hi, 1.0 - s.c_lo};
}

KinkMap kink_map(const ArmScoreBounds& r, Side side, Conditioning cond) {
  const double pi = r.pi;
  if (cond == Conditioning::marginal) {
    return side == Side::hi ? KinkMap{pi / r.lo, pi / r.hi, true}
                            : KinkMap{pi / r.hi, pi / r.lo, false};
  }
  const double steep = pi * (1.0 - r.lo) / ((1.0 - pi) * r.lo);
  const double flat = pi * (1.0 - r.hi) / ((1.0 - pi) * r.hi);
  return side == Side::hi ? KinkMap{steep, flat, true} : KinkMap{flat, steep, false};
}

StepCdf apply(const KinkMap& g, const StepCdf& f) {
  std::vector<double> support(f.support().begin(), f.support().end());
  std::vector<double> cum(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) cum[i] = g(f.cum()[i]);
  return StepCdf::from_cumulative(std::move(support), std::move(cum));
}

ArmEnvelopes collapsed_arm(const StepCdf& observed) {
  return ArmEnvelopes{observed, observed, observed, observed, std::nullopt};
}

ArmEnvelopes strict_arm(const StepCdf& f, const ArmScoreBounds& r) {
  const KinkMap hi_m = kink_map(r, Side::hi, Conditioning::marginal);
  const KinkMap lo_m = kink_map(r, Side::lo, Conditioning::marginal);
  ArmEnvelopes out{apply(lo_m, f), apply(hi_m, f),
                   apply(kink_map(r, Side::lo, Conditioning::cross), f),
                   apply(kink_map(r, Side::hi, Conditioning::cross), f), std::nullopt};

  Thresholds t;
  t.tau_lo = (r.pi - r.lo) * r.hi / (r.pi * (r.hi - r.lo));
  t.tau_hi = 1.0 - t.tau_lo;
  t.q_lo = f.quantile(t.tau_lo);
  t.q_hi = f.quantile(t.tau_hi);

  // Jump of the envelope at its threshold, taken from the two branches: the
  // right-hand branch at q and the left-hand branch just below q.
  auto constant = [&](const KinkMap& g, double q) {
    const double jump = (1.0 - g.b * (1.0 - f.eval(q))) - g.a * f.left_limit(q);
    if (jump <= 0.0) return r.pi;
    return r.pi * f.mass_at(q) / jump;
  };
  t.a_lo = constant(lo_m, t.q_lo);
  t.a_hi = constant(hi_m, t.q_hi);
  out.thresholds = t;
  return out;
}

void require_nonempty(const Cell& cell) {
  if (cell.treated.size() == 0 || cell.control.size() == 0)
    throw InputError("cell '" + cell.id + "' has an empty arm");
}

}  // namespace

CellEnvelopes compute_envelopes(const Cell& cell, const CellSensitivity& s) {
  require_nonempty(cell);
  require_valid_sensitivity(cell.p1, s);
  CellEnvelopes env{s, cell.p1, !is_strict(cell.p1, s), collapsed_arm(cell.control),
                    collapsed_arm(cell.treated)};
  if (env.collapsed) return env;
  env.treated = strict_arm(cell.treated, arm_bounds(cell.p1, s, Arm::treated));
  env.control = strict_arm(cell.control, arm_bounds(cell.p1, s, Arm::control));
  return env;
}

double envelope_quantile_closed_form(const Cell& cell, const CellEnvelopes& env, Arm arm,
                                     Side side, Conditioning cond, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("envelope_quantile: tau must lie in (0, 1)");
  const StepCdf& f = cell.observed(arm);
  if (env.collapsed) return f.quantile(tau);
  const KinkMap g = kink_map(arm_bounds(cell.p1, env.sensitivity, arm), flip(side), cond);
  const double u = g.inverse(tau);
  if (u <= 0.0) return f.min_value();
  if (u >= 1.0) return f.max_value();
  return f.quantile(u);
}

double envelope_quantile(const Cell& cell, const CellEnvelopes& env, Arm arm, Side side,
                         Conditioning cond, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("envelope_quantile: tau must lie in (0, 1)");
  const double q = env.arm(arm).get(flip(side), cond).quantile(tau);
  if (envelope_quantile_closed_form(cell, env, arm, side, cond, tau) != q)
    g_quantile_discrepancies.fetch_add(1, std::memory_order_relaxed);
  return q;
}

std::size_t envelope_quantile_discrepancies() {
  return g_quantile_discrepancies.load(std::memory_order_relaxed);
}

SwitchingScore switching_score(const Cell& cell, const CellSensitivity& s, Arm arm, Side side) {
  require_valid_sensitivity(cell.p1, s);
  if (!is_strict(cell.p1, s)) return SwitchingScore{0.0, cell.p1, cell.p1, cell.p1, true};
  const CellEnvelopes env = compute_envelopes(cell, s);
  const Thresholds& t = *env.arm(arm).thresholds;
  const ArmScoreBounds r = arm_bounds(cell.p1, s, arm);
  // Values of P(X = x | Y_x), then mapped to P(X = 1 | Y_x).
  SwitchingScore score = side == Side::hi ? SwitchingScore{t.q_hi, r.lo, t.a_hi, r.hi, false}
                                          : SwitchingScore{t.q_lo, r.hi, t.a_lo, r.lo, false};
  if (arm == Arm::control) {
    score.below = 1.0 - score.below;
    score.at = 1.0 - score.at;
    score.above = 1.0 - score.above;
  }
  return score;
}

namespace {

void require_aligned(std::span<const Cell> cells, std::span<const CellEnvelopes> envs) {
  if (cells.empty()) throw InputError("no cells");
  if (cells.size() != envs.size()) throw InputError("cells and envelopes are misaligned");
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].p1 != envs[i].p1) throw InputError("cells and envelopes are misaligned");
}

}  // namespace

StepCdf aggregate_marginal(std::span<const Cell> cells, std::span<const CellEnvelopes> envs,
                           Arm arm, Side side) {
  require_aligned(cells, envs);
  std::vector<StepCdf> parts;
  std::vector<double> weights;
  parts.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    parts.push_back(envs[i].arm(arm).get(side, Conditioning::marginal));
    weights.push_back(cells[i].weight);
  }
  return StepCdf::weighted_average(parts, weights);
}

std::vector<double> treated_weights(std::span<const Cell> cells) {
  double total = 0.0;
  for (const auto& c : cells) total += c.weight * c.p1;
  if (!(total > 0.0)) throw InputError("no treated mass");
  std::vector<double> w;
  w.reserve(cells.size());
  for (const auto& c : cells) w.push_back(c.weight * c.p1 / total);
  return w;
}

StepCdf aggregate_treated_control_outcome(std::span<const Cell> cells,
                                          std::span<const CellEnvelopes> envs, Side side) {
  require_aligned(cells, envs);
  std::vector<StepCdf> parts;
  for (const auto& e : envs) parts.push_back(e.control.get(side, Conditioning::cross));
  return StepCdf::weighted_average(parts, treated_weights(cells));
}

StepCdf observed_treated_outcome(std::span<const Cell> cells) {
  if (cells.empty()) throw InputError("no cells");
  std::vector<StepCdf> parts;
  for (const auto& c : cells) parts.push_back(c.treated);
  return StepCdf::weighted_average(parts, treated_weights(cells));
}

}  // namespace sensbounds
