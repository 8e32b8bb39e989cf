#pragma once

// Finitely supported, right-continuous distribution functions.
//
// Every distribution in the library (observed arm laws, envelope bounds,
// aggregated marginals) is a StepCdf: a strictly increasing support and the
// cumulative probability at each support point. All operations are exact
// for this representation; nothing is discretised or smoothed.

#include <span>
#include <vector>

namespace sensbounds {

/// Relative tolerance under which two outcome values are the same point.
inline constexpr double kSupportMergeTolerance = 1e-12;
/// Absolute tolerance for a cumulative sum to be normalised to 1.
inline constexpr double kNormalizationTolerance = 1e-9;
/// Relative tolerance for matching shifted outcome values (y - z) against a
/// support point.
inline constexpr double kTieTolerance = 1e-9;

struct TruncatedMeans {
  double lower_mean = 0.0;        ///< E[Y | Y <= cutoff]
  double upper_mean = 0.0;        ///< E[Y | Y > cutoff], 0 when upper_empty
  double mass_at_or_below = 0.0;  ///< F(cutoff)
  double cutoff = 0.0;            ///< Q(a)
  bool upper_empty = false;
};

class StepCdf {
 public:
  /// Builds from point masses. Values need not be sorted; equal values (up to
  /// kSupportMergeTolerance) are merged and zero masses dropped. Masses must
  /// be nonnegative and sum to 1 within kNormalizationTolerance.
  static StepCdf from_masses(std::vector<double> values, std::vector<double> masses);

  /// Builds from a strictly increasing support and its cumulative
  /// probabilities. The last entry is snapped to 1 when within tolerance.
  static StepCdf from_cumulative(std::vector<double> support, std::vector<double> cum);

  static StepCdf point_mass(double value);

  /// Empirical distribution of a sample.
  static StepCdf empirical(std::span<const double> sample);

  /// Pointwise weighted average sum_i w_i F_i. Weights must be nonnegative
  /// and sum to 1 within tolerance.
  static StepCdf weighted_average(std::span<const StepCdf> cdfs, std::span<const double> weights);

  std::span<const double> support() const { return support_; }
  std::span<const double> cum() const { return cum_; }
  std::span<const double> masses() const { return mass_; }
  std::size_t size() const { return support_.size(); }

  /// F(y) = P(Y <= y).
  double operator()(double y) const { return eval(y); }
  double eval(double y) const;
  /// lim_{t -> y-} F(t).
  double left_limit(double y) const;
  /// P(Y = y).
  double mass_at(double y) const;

  /// Left inverse inf{y : F(y) >= tau}, tau in (0,1).
  double quantile(double tau) const;

  double mean() const;

  /// Integral of the quantile function over (0, a), a in (0,1).
  double partial_quantile_integral(double a) const;

  /// Split of the distribution at Q(a).
  TruncatedMeans truncated_means(double a) const;

  double min_value() const { return support_.front(); }
  double max_value() const { return support_.back(); }

  friend bool operator==(const StepCdf&, const StepCdf&) = default;

 private:
  StepCdf() = default;
  // Index of the largest support point <= y, or -1.
  std::ptrdiff_t index_at_or_below(double y) const;

  std::vector<double> support_;
  std::vector<double> cum_;
  std::vector<double> mass_;
};

/// Pointwise convex combination eps * f + (1 - eps) * g on the merged support.
StepCdf mix(const StepCdf& f, const StepCdf& g, double eps);

/// Sorted union of the supports of several step cdfs (merging near-equal
/// values).
std::vector<double> merged_support(std::span<const StepCdf> cdfs);

/// Evaluates F at t, treating t as the nearest support point when within
/// kTieTolerance (relative). Used where t is the result of arithmetic on
/// outcome values.
double eval_snapped(const StepCdf& f, double t);
double left_limit_snapped(const StepCdf& f, double t);

}  // namespace sensbounds
