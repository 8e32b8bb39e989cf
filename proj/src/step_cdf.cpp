#include "sensbounds/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sensbounds/errors.hpp"

namespace sensbounds {

namespace {

bool same_point(double a, double b) {
  return std::abs(a - b) <= kSupportMergeTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
}

}  // namespace

StepCdf StepCdf::from_masses(std::vector<double> values, std::vector<double> masses) {
  if (values.size() != masses.size()) throw InputError("StepCdf: values and masses differ in length");
  if (values.empty()) throw InputError("StepCdf: empty support");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < values.size(); ++i) {
    require_finite(values[i], "StepCdf support value");
    require_finite(masses[i], "StepCdf mass");
    if (masses[i] < 0.0) throw InputError("StepCdf: negative mass");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> support;
  std::vector<double> point_mass;
  for (std::size_t idx : order) {
    if (masses[idx] == 0.0) continue;
    if (!support.empty() && same_point(support.back(), values[idx])) {
      point_mass.back() += masses[idx];
    } else {
      support.push_back(values[idx]);
      point_mass.push_back(masses[idx]);
    }
  }
  if (support.empty()) throw InputError("StepCdf: all masses are zero");

  std::vector<double> cum(support.size());
  double running = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    running += point_mass[i];
    cum[i] = running;
  }
  if (std::abs(running - 1.0) > kNormalizationTolerance)
    throw InputError("StepCdf: masses sum to " + std::to_string(running) + ", not 1");

  StepCdf out;
  out.support_ = std::move(support);
  out.cum_ = std::move(cum);
  out.cum_.back() = 1.0;
  for (double& c : out.cum_) c = std::min(c, 1.0);
  out.mass_.resize(out.cum_.size());
  for (std::size_t i = 0; i < out.cum_.size(); ++i)
    out.mass_[i] = (i == 0) ? out.cum_[0] : out.cum_[i] - out.cum_[i - 1];
  return out;
}

StepCdf StepCdf::from_cumulative(std::vector<double> support, std::vector<double> cum) {
  if (support.size() != cum.size()) throw InputError("StepCdf: support and cum differ in length");
  if (support.empty()) throw InputError("StepCdf: empty support");
  for (std::size_t i = 0; i < support.size(); ++i) {
    require_finite(support[i], "StepCdf support value");
    require_finite(cum[i], "StepCdf cumulative probability");
    if (cum[i] < -kSupportMergeTolerance || cum[i] > 1.0 + kNormalizationTolerance)
      throw InputError("StepCdf: cumulative probability outside [0, 1]");
    if (i > 0) {
      if (support[i] < support[i - 1] && !same_point(support[i], support[i - 1]))
        throw InputError("StepCdf: support is not increasing");
      if (cum[i] < cum[i - 1] - kSupportMergeTolerance)
        throw InputError("StepCdf: cumulative probabilities decrease");
    }
  }
  if (std::abs(cum.back() - 1.0) > kNormalizationTolerance)
    throw InputError("StepCdf: final cumulative probability " + std::to_string(cum.back()) +
                     " is not 1");

  StepCdf out;
  double prev = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    double c = std::clamp(cum[i], prev, 1.0);
    if (i + 1 == support.size()) c = 1.0;
    if (!out.support_.empty() && same_point(out.support_.back(), support[i])) {
      out.cum_.back() = c;
    } else if (c > prev) {
      out.support_.push_back(support[i]);
      out.cum_.push_back(c);
    } else {
      continue;
    }
    prev = c;
  }
  // A trailing run of zero-mass points can leave the last kept value below 1
  // only through the clamp above; snap it.
  out.cum_.back() = 1.0;
  out.mass_.resize(out.cum_.size());
  for (std::size_t i = 0; i < out.cum_.size(); ++i)
    out.mass_[i] = (i == 0) ? out.cum_[0] : out.cum_[i] - out.cum_[i - 1];
  return out;
}

StepCdf StepCdf::point_mass(double value) { return from_masses({value}, {1.0}); }

StepCdf StepCdf::empirical(std::span<const double> sample) {
  if (sample.empty()) throw InputError("StepCdf: empirical distribution of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> values;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    require_finite(v, "sample value");
    if (!values.empty() && values.back() == v) {
      ++counts.back();
    } else {
      values.push_back(v);
      counts.push_back(1);
    }
  }
  const double n = static_cast<double>(sample.size());
  std::vector<double> masses(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) masses[i] = static_cast<double>(counts[i]) / n;
  return from_masses(std::move(values), std::move(masses));
}

std::vector<double> merged_support(std::span<const StepCdf> cdfs) {
  std::vector<double> all;
  for (const auto& f : cdfs) all.insert(all.end(), f.support().begin(), f.support().end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all)
    if (out.empty() || !same_point(out.back(), v)) out.push_back(v);
  return out;
}

StepCdf StepCdf::weighted_average(std::span<const StepCdf> cdfs, std::span<const double> weights) {
  if (cdfs.size() != weights.size()) throw InputError("weighted_average: size mismatch");
  if (cdfs.empty()) throw InputError("weighted_average: no distributions");
  double total = 0.0;
  std::vector<StepCdf> used;
  std::vector<double> used_w;
  for (std::size_t i = 0; i < cdfs.size(); ++i) {
    require_finite(weights[i], "weight");
    if (weights[i] < 0.0) throw InputError("weighted_average: negative weight");
    total += weights[i];
    if (weights[i] > 0.0) {
      used.push_back(cdfs[i]);
      used_w.push_back(weights[i]);
    }
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance)
    throw InputError("weighted_average: weights sum to " + std::to_string(total));
  auto support = merged_support(used);
  std::vector<double> cum(support.size(), 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < used.size(); ++i) acc += used_w[i] * used[i].eval(support[k]);
    cum[k] = acc;
  }
  return from_cumulative(std::move(support), std::move(cum));
}

std::ptrdiff_t StepCdf::index_at_or_below(double y) const {
  auto it = std::upper_bound(support_.begin(), support_.end(), y);
  return static_cast<std::ptrdiff_t>(it - support_.begin()) - 1;
}

double StepCdf::eval(double y) const {
  auto i = index_at_or_below(y);
  return i < 0 ? 0.0 : cum_[static_cast<std::size_t>(i)];
}

double StepCdf::left_limit(double y) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), y);
  auto i = static_cast<std::ptrdiff_t>(it - support_.begin()) - 1;
  return i < 0 ? 0.0 : cum_[static_cast<std::size_t>(i)];
}

double StepCdf::mass_at(double y) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), y);
  if (it == support_.end() || *it != y) return 0.0;
  return mass_[static_cast<std::size_t>(it - support_.begin())];
}

double StepCdf::quantile(double tau) const {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("quantile: tau must lie in (0, 1)");
  auto it = std::lower_bound(cum_.begin(), cum_.end(), tau);
  if (it == cum_.end()) return support_.back();
  return support_[static_cast<std::size_t>(it - cum_.begin())];
}

double StepCdf::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) acc += support_[i] * mass_[i];
  return acc;
}

double StepCdf::partial_quantile_integral(double a) const {
  if (!(a > 0.0 && a < 1.0)) throw InputError("partial_quantile_integral: a must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(
      std::lower_bound(cum_.begin(), cum_.end(), a) - cum_.begin());
  const std::size_t last = std::min(k, support_.size() - 1);
  double lower = 0.0;
  for (std::size_t i = 0; i <= last; ++i) lower += support_[i] * mass_[i];
  return lower - support_[last] * (cum_[last] - a);
}

TruncatedMeans StepCdf::truncated_means(double a) const {
  if (!(a > 0.0 && a < 1.0)) throw InputError("truncated_means: a must lie in (0, 1)");
  const auto k = std::min(static_cast<std::size_t>(
                              std::lower_bound(cum_.begin(), cum_.end(), a) - cum_.begin()),
                          support_.size() - 1);
  TruncatedMeans out;
  out.cutoff = support_[k];
  out.mass_at_or_below = cum_[k];
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) (i <= k ? lower : upper) += support_[i] * mass_[i];
  out.lower_mean = lower / cum_[k];
  const double upper_mass = 1.0 - cum_[k];
  if (k + 1 == support_.size() || upper_mass <= 0.0) {
    out.upper_empty = true;
    out.upper_mean = 0.0;
  } else {
    out.upper_mean = upper / upper_mass;
  }
  return out;
}

StepCdf mix(const StepCdf& f, const StepCdf& g, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("mix: weight must lie in [0, 1]");
  const StepCdf both[] = {f, g};
  auto support = merged_support(both);
  std::vector<double> cum(support.size());
  for (std::size_t k = 0; k < support.size(); ++k)
    cum[k] = eps * f.eval(support[k]) + (1.0 - eps) * g.eval(support[k]);
  return StepCdf::from_cumulative(std::move(support), std::move(cum));
}

namespace {

// Nearest support point to t when it is within the tie tolerance.
const double* snap(const StepCdf& f, double t) {
  auto s = f.support();
  auto it = std::lower_bound(s.begin(), s.end(), t);
  const double* best = nullptr;
  double best_gap = 0.0;
  auto consider = [&](auto pos) {
    if (pos < s.begin() || pos >= s.end()) return;
    double gap = std::abs(*pos - t);
    if (gap <= kTieTolerance * std::max(1.0, std::abs(*pos)) && (!best || gap < best_gap)) {
      best = &*pos;
      best_gap = gap;
    }
  };
  consider(it);
  if (it != s.begin()) consider(it - 1);
  return best;
}

}  // namespace

double eval_snapped(const StepCdf& f, double t) {
  const double* p = snap(f, t);
  return f.eval(p ? *p : t);
}

double left_limit_snapped(const StepCdf& f, double t) {
  const double* p = snap(f, t);
  return f.left_limit(p ? *p : t);
}

}  // namespace sensbounds
