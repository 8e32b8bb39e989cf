#pragma once

// Sensitivity models for the latent propensity score P(X = 1 | Y_x, W = w).
//
// The working parameterisation is a per-cell interval [c_lo, c_hi] for that
// score (marginal c-dependence). Odds-ratio models (MSM and its generalised
// two-sided form) and symmetric conditional c-dependence are converted into
// it exactly.

#include <optional>
#include <string>

namespace sensbounds {

/// Clamp applied to conditional c-dependence bounds so they stay in (0, 1).
inline constexpr double kSensitivityClamp = 1e-9;

struct CellSensitivity {
  double c_lo = 0.0;
  double c_hi = 0.0;
  friend bool operator==(const CellSensitivity&, const CellSensitivity&) = default;
};

/// Two-sided odds-ratio bounds; lambda_lo in (0, 1], lambda_hi in [1, inf).
struct GmsmBounds {
  double lambda_lo = 1.0;
  double lambda_hi = 1.0;
  friend bool operator==(const GmsmBounds&, const GmsmBounds&) = default;
};

/// Single-parameter MSM: [1 / lambda, lambda].
GmsmBounds msm(double lambda);

CellSensitivity cdep_from_gmsm(double p1, const GmsmBounds& g);
GmsmBounds gmsm_from_cdep(double p1, const CellSensitivity& s);

struct ClampedSensitivity {
  CellSensitivity sensitivity;
  bool clamped = false;
};

/// Symmetric bounds p1 -/+ c, clamped to [kSensitivityClamp, 1 - kSensitivityClamp].
ClampedSensitivity cdep_from_conditional_c(double p1, double c);

struct SensitivityCheck {
  bool ok = true;
  std::string violation;  ///< empty when ok
  explicit operator bool() const { return ok; }
};

/// Checks 0 < c_lo <= p1 <= c_hi < 1.
SensitivityCheck validate_sensitivity(double p1, const CellSensitivity& s);

/// Throws InputError carrying the violation when validate_sensitivity fails.
void require_valid_sensitivity(double p1, const CellSensitivity& s);

bool is_collapsed(double p1, const CellSensitivity& s);

/// True when c_lo < p1 < c_hi, the regime where switching thresholds exist.
bool is_strict(double p1, const CellSensitivity& s);

/// [a, b] contains [c, d] as sensitivity sets.
bool contains(const CellSensitivity& outer, const CellSensitivity& inner);

}  // namespace sensbounds
