#include "sensbounds/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sensbounds/errors.hpp"

namespace sensbounds::oracle {

namespace {

constexpr double kScoreSlack = 1e-12;
constexpr double kWitnessTolerance = 1e-10;

// Observed arm data with scores expressed as r(y) = P(X = x | Y_x = y).
struct ArmInstance {
  std::vector<double> support;
  std::vector<double> mass;
  double pi = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  bool treated = true;
  std::vector<double> r_grid;
};

ArmInstance make_instance(const Cell& cell, const CellSensitivity& s, Arm arm, int resolution) {
  require_valid_sensitivity(cell.p1, s);
  const StepCdf& f = cell.observed(arm);
  if (f.size() == 0) throw InputError("oracle: empty arm");
  if (f.size() > kMaxSupport) throw InputError("oracle: arm support too large to enumerate");
  ArmInstance inst;
  inst.support.assign(f.support().begin(), f.support().end());
  inst.mass.assign(f.masses().begin(), f.masses().end());
  inst.treated = arm == Arm::treated;
  inst.pi = cell.propensity(arm);
  inst.r_lo = inst.treated ? s.c_lo : 1.0 - s.c_hi;
  inst.r_hi = inst.treated ? s.c_hi : 1.0 - s.c_lo;
  const LatentScoreGrid grid(s, resolution);
  for (double c : grid.values()) inst.r_grid.push_back(inst.treated ? c : 1.0 - c);
  return inst;
}

// Scratch buffers for one worker.
struct Workspace {
  std::vector<double> score;
  std::vector<double> marginal;
  std::vector<double> cross;
  std::vector<double> p1_score;
  std::vector<std::size_t> digit;
};

// Visits every feasible score with support point `free` solved from the
// normalization and the first other point fixed at grid index `first`
// (ignored when there is no other point).
template <typename Visit>
void scan_task(const ArmInstance& inst, std::size_t free, std::size_t first, Workspace& ws,
               Visit&& visit) {
  const std::size_t m = inst.support.size();
  const std::size_t g = inst.r_grid.size();
  ws.score.assign(m, 0.0);
  ws.marginal.assign(m, 0.0);
  ws.cross.assign(m, 0.0);
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < m; ++j)
    if (j != free) others.push_back(j);
  ws.digit.assign(others.size(), 0);
  if (!others.empty()) ws.digit[0] = first;

  while (true) {
    double rest = 1.0;
    for (std::size_t k = 0; k < others.size(); ++k) {
      const std::size_t j = others[k];
      const double r = inst.r_grid[ws.digit[k]];
      ws.marginal[j] = inst.pi * inst.mass[j] / r;
      rest -= ws.marginal[j];
      ws.score[j] = r;
    }
    if (rest > 0.0) {
      const double r_free = inst.pi * inst.mass[free] / rest;
      if (r_free >= inst.r_lo - kScoreSlack && r_free <= inst.r_hi + kScoreSlack) {
        ws.marginal[free] = rest;
        ws.score[free] = std::clamp(r_free, inst.r_lo, inst.r_hi);
        for (std::size_t j = 0; j < m; ++j) {
          ws.cross[j] = ws.marginal[j] * (1.0 - ws.score[j]) / (1.0 - inst.pi);
        }
        // Report P(X = 1 | Y_x) rather than P(X = x | Y_x).
        ws.p1_score = ws.score;
        if (!inst.treated)
          for (double& v : ws.p1_score) v = 1.0 - v;
        visit(ImpliedLaw{inst.support, ws.p1_score, ws.marginal, ws.cross});
      }
    }
    // Odometer over all digits except the first, which the task fixes.
    std::size_t k = 1;
    while (k < ws.digit.size() && ++ws.digit[k] == g) {
      ws.digit[k] = 0;
      ++k;
    }
    if (k >= ws.digit.size()) break;
  }
}

std::size_t task_count(const ArmInstance& inst) {
  const std::size_t m = inst.support.size();
  return m == 1 ? 1 : m * inst.r_grid.size();
}

template <typename Visit>
void run_task(const ArmInstance& inst, std::size_t task, Workspace& ws, Visit&& visit) {
  const std::size_t g = inst.r_grid.size();
  if (inst.support.size() == 1) {
    scan_task(inst, 0, 0, ws, visit);
  } else {
    scan_task(inst, task / g, task % g, ws, visit);
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min/max of `quantities(law)` (one value per slot) over all feasible scores,
// with the enumeration split across threads. The reduction is order-free.
template <typename Quantities>
std::vector<Range> parallel_ranges(const ArmInstance& inst, std::size_t slots,
                                   Quantities&& quantities) {
  const std::size_t tasks = task_count(inst);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(tasks, std::thread::hardware_concurrency()));
  std::vector<std::vector<Range>> partial(workers, std::vector<Range>(slots, Range{kInf, -kInf}));
  std::atomic<std::size_t> next{0};
  auto work = [&](std::size_t w) {
    Workspace ws;
    std::vector<double> values(slots);
    auto& acc = partial[w];
    for (std::size_t t = next++; t < tasks; t = next++) {
      run_task(inst, t, ws, [&](const ImpliedLaw& law) {
        quantities(law, values);
        for (std::size_t i = 0; i < slots; ++i) {
          acc[i].lo = std::min(acc[i].lo, values[i]);
          acc[i].hi = std::max(acc[i].hi, values[i]);
        }
      });
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();

  std::vector<Range> out(slots, Range{kInf, -kInf});
  for (const auto& p : partial)
    for (std::size_t i = 0; i < slots; ++i) {
      out[i].lo = std::min(out[i].lo, p[i].lo);
      out[i].hi = std::max(out[i].hi, p[i].hi);
    }
  for (const auto& r : out)
    if (r.lo > r.hi) throw InvariantError("oracle: no feasible latent score found");
  return out;
}

double pmf_mean(std::span<const double> support, std::span<const double> pmf) {
  double acc = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) acc += support[i] * pmf[i];
  return acc;
}

double pmf_quantile(std::span<const double> support, std::span<const double> pmf, double tau) {
  double cum = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    cum += pmf[i];
    if (cum >= tau - 1e-12) return support[i];
  }
  return support.back();
}

}  // namespace

LatentScoreGrid::LatentScoreGrid(const CellSensitivity& s, int resolution) : n_(resolution) {
  if (resolution < 2) throw InputError("oracle: resolution must be at least 2");
  if (!(s.c_lo <= s.c_hi)) throw InputError("oracle: c_lo exceeds c_hi");
  values_.reserve(static_cast<std::size_t>(n_) + 1);
  for (int k = 0; k <= n_; ++k) values_.push_back(s.c_lo + k * (s.c_hi - s.c_lo) / n_);
  values_.back() = s.c_hi;
}

void for_each_feasible(const Cell& cell, const CellSensitivity& s, Arm arm, int resolution,
                       const std::function<void(const ImpliedLaw&)>& visit) {
  const ArmInstance inst = make_instance(cell, s, arm, resolution);
  Workspace ws;
  for (std::size_t t = 0; t < task_count(inst); ++t) run_task(inst, t, ws, visit);
}

Range attainable_cdf_range(const Cell& cell, const CellSensitivity& s, Arm arm, double y,
                           int resolution) {
  const ArmInstance inst = make_instance(cell, s, arm, resolution);
  return parallel_ranges(inst, 1, [y](const ImpliedLaw& law, std::vector<double>& out) {
    double cum = 0.0;
    for (std::size_t i = 0; i < law.support.size() && law.support[i] <= y; ++i)
      cum += law.marginal[i];
    out[0] = cum;
  })[0];
}

std::vector<Range> attainable_cdf_band(const Cell& cell, const CellSensitivity& s, Arm arm,
                                       Conditioning cond, int resolution) {
  const ArmInstance inst = make_instance(cell, s, arm, resolution);
  const bool marginal = cond == Conditioning::marginal;
  return parallel_ranges(inst, inst.support.size(),
                         [marginal](const ImpliedLaw& law, std::vector<double>& out) {
                           const auto pmf = marginal ? law.marginal : law.cross;
                           double cum = 0.0;
                           for (std::size_t i = 0; i < pmf.size(); ++i) {
                             cum += pmf[i];
                             out[i] = cum;
                           }
                         });
}

Range attainable_param_range(const Cell& cell, const CellSensitivity& s, const CellParameter& p,
                             int resolution) {
  if (p.quantity == CellQuantity::cate) {
    const Range r1 =
        attainable_param_range(cell, s, {CellQuantity::mean, Arm::treated, p.tau}, resolution);
    const Range r0 =
        attainable_param_range(cell, s, {CellQuantity::mean, Arm::control, p.tau}, resolution);
    return {r1.lo - r0.hi, r1.hi - r0.lo};
  }
  if ((p.quantity == CellQuantity::quantile || p.quantity == CellQuantity::cross_quantile) &&
      !(p.tau > 0.0 && p.tau < 1.0))
    throw InputError("oracle: tau must lie in (0, 1)");
  const ArmInstance inst = make_instance(cell, s, p.arm, resolution);
  return parallel_ranges(inst, 1, [&p](const ImpliedLaw& law, std::vector<double>& out) {
    switch (p.quantity) {
      case CellQuantity::mean:
        out[0] = pmf_mean(law.support, law.marginal);
        break;
      case CellQuantity::quantile:
        out[0] = pmf_quantile(law.support, law.marginal, p.tau);
        break;
      case CellQuantity::cross_mean:
        out[0] = pmf_mean(law.support, law.cross);
        break;
      case CellQuantity::cross_quantile:
        out[0] = pmf_quantile(law.support, law.cross, p.tau);
        break;
      case CellQuantity::cate:
        break;
    }
  })[0];
}

namespace {

bool effect_at_most(double a, double b, double z) {
  return a - b <= z + kTieTolerance * std::max(1.0, std::abs(a - z));
}

// Unique basic solution of the transportation system on a spanning tree of
// cells, or false when the cells contain a cycle or the solution is negative.
bool tree_solution(std::span<const double> row, std::span<const double> col,
                   std::span<const std::pair<std::size_t, std::size_t>> cells,
                   std::vector<double>& flow) {
  const std::size_t m = row.size();
  const std::size_t n = col.size();
  std::vector<double> row_left(row.begin(), row.end());
  std::vector<double> col_left(col.begin(), col.end());
  std::vector<int> row_deg(m, 0), col_deg(n, 0);
  for (auto [i, j] : cells) {
    ++row_deg[i];
    ++col_deg[j];
  }
  std::vector<bool> done(cells.size(), false);
  flow.assign(cells.size(), 0.0);
  for (std::size_t step = 0; step < cells.size(); ++step) {
    bool progressed = false;
    for (std::size_t c = 0; c < cells.size() && !progressed; ++c) {
      if (done[c]) continue;
      auto [i, j] = cells[c];
      double v;
      if (row_deg[i] == 1) {
        v = row_left[i];
      } else if (col_deg[j] == 1) {
        v = col_left[j];
      } else {
        continue;
      }
      flow[c] = v;
      row_left[i] -= v;
      col_left[j] -= v;
      --row_deg[i];
      --col_deg[j];
      done[c] = true;
      progressed = true;
    }
    if (!progressed) return false;  // a cycle
  }
  for (double r : row_left)
    if (std::abs(r) > 1e-12) return false;
  for (double c : col_left)
    if (std::abs(c) > 1e-12) return false;
  for (double& f : flow) {
    if (f < -1e-12) return false;
    f = std::max(f, 0.0);
  }
  return true;
}

}  // namespace

Range coupling_range(const StepCdf& f1, const StepCdf& f0, double z) {
  const auto a = f1.support();
  const auto b = f0.support();
  const auto pa = f1.masses();
  const auto pb = f0.masses();
  if (a.empty() || b.empty()) throw InputError("coupling_range: empty marginal");
  if (a.size() * b.size() > 9) throw InputError("coupling_range: joint support too large");

  if (a.size() == 2 && b.size() == 2) {
    const double alpha = pa[0];
    const double beta = pb[0];
    auto value = [&](double p11) {
      const double p[2][2] = {{p11, alpha - p11}, {beta - p11, 1.0 - alpha - beta + p11}};
      double acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (effect_at_most(a[i], b[j], z)) acc += p[i][j];
      return acc;
    };
    const double v1 = value(std::max(0.0, alpha + beta - 1.0));
    const double v2 = value(std::min(alpha, beta));
    return {std::clamp(std::min(v1, v2), 0.0, 1.0), std::clamp(std::max(v1, v2), 0.0, 1.0)};
  }

  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) all.emplace_back(i, j);
  const std::size_t basis = a.size() + b.size() - 1;
  Range out{kInf, -kInf};
  std::vector<bool> pick(all.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(basis), true);
  std::vector<double> flow;
  do {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t k = 0; k < all.size(); ++k)
      if (pick[k]) cells.push_back(all[k]);
    if (!tree_solution(pa, pb, cells, flow)) continue;
    double v = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (effect_at_most(a[cells[k].first], b[cells[k].second], z)) v += flow[k];
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  if (out.lo > out.hi) throw InvariantError("coupling_range: no vertex found");
  return {std::clamp(out.lo, 0.0, 1.0), std::clamp(out.hi, 0.0, 1.0)};
}

WitnessReport verify_score(const Cell& cell, const CellSensitivity& s, Arm arm, Side side,
                           const SwitchingScore& score) {
  WitnessReport rep;
  auto fail = [&rep](bool& flag, const char* what) {
    flag = false;
    if (rep.failure.empty()) rep.failure = what;
  };
  if (!validate_sensitivity(cell.p1, s)) {
    rep.applicable = false;
    fail(rep.score_range, "invalid sensitivity");
    return rep;
  }
  if (!is_strict(cell.p1, s)) {
    rep.applicable = false;
    if (!score.constant || score.at != cell.p1) fail(rep.score_range, "non-constant score");
    return rep;
  }
  const CellEnvelopes env = compute_envelopes(cell, s);
  const StepCdf& f = cell.observed(arm);
  const StepCdf& target = env.arm(arm).get(side, Conditioning::marginal);
  const bool treated = arm == Arm::treated;
  const double pi = cell.propensity(arm);

  double cum = 0.0;
  double cross_total = 0.0;
  double mean_score = 0.0;
  bool cross_negative = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double y = f.support()[i];
    const double p = score(y);  // P(X = 1 | Y_x = y)
    if (p < s.c_lo - kScoreSlack || p > s.c_hi + kScoreSlack) fail(rep.score_range, "score range");
    const double own = treated ? p : 1.0 - p;
    if (!(own > 0.0)) {
      fail(rep.reweighting, "reweighting");
      continue;
    }
    const double implied = pi * f.masses()[i] / own;
    cum += implied;
    if (std::abs(cum - target.eval(y)) > kWitnessTolerance) fail(rep.reweighting, "reweighting");
    const double cross = implied * (1.0 - own) / (1.0 - pi);
    if (cross < -kWitnessTolerance) cross_negative = true;
    cross_total += cross;
    mean_score += implied * p;
  }
  if (cross_negative || std::abs(cross_total - 1.0) > kWitnessTolerance)
    fail(rep.counterfactual, "counterfactual pmf");
  if (std::abs(mean_score - cell.p1) > kWitnessTolerance) fail(rep.mean_score, "mean score");
  return rep;
}

WitnessReport verify_witness(const Cell& cell, const CellSensitivity& s, Arm arm, Side side) {
  if (!validate_sensitivity(cell.p1, s)) {
    WitnessReport rep;
    rep.applicable = false;
    rep.score_range = false;
    rep.failure = "invalid sensitivity";
    return rep;
  }
  return verify_score(cell, s, arm, side, switching_score(cell, s, arm, side));
}

}  // namespace sensbounds::oracle
