#include "sensbounds/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sensbounds/errors.hpp"

namespace sensbounds {

namespace {

void require_open_probability(double p1) {
  if (!(p1 > 0.0 && p1 < 1.0)) throw InputError("propensity p1 must lie in (0, 1)");
}

void require_valid_gmsm(const GmsmBounds& g) {
  if (!(g.lambda_lo > 0.0 && g.lambda_lo <= 1.0))
    throw InputError("lambda_lo must lie in (0, 1]");
  if (!(g.lambda_hi >= 1.0 && std::isfinite(g.lambda_hi)))
    throw InputError("lambda_hi must lie in [1, inf)");
}

double odds_to_score(double p1, double lambda) {
  if (lambda == 1.0) return p1;
  const double p0 = 1.0 - p1;
  return p1 * lambda / (p0 + p1 * lambda);
}

double score_to_odds(double p1, double c) { return (c / (1.0 - c)) * ((1.0 - p1) / p1); }

}  // namespace

GmsmBounds msm(double lambda) {
  if (!(lambda >= 1.0 && std::isfinite(lambda))) throw InputError("MSM lambda must lie in [1, inf)");
  return {1.0 / lambda, lambda};
}

CellSensitivity cdep_from_gmsm(double p1, const GmsmBounds& g) {
  require_open_probability(p1);
  require_valid_gmsm(g);
  return {odds_to_score(p1, g.lambda_lo), odds_to_score(p1, g.lambda_hi)};
}

GmsmBounds gmsm_from_cdep(double p1, const CellSensitivity& s) {
  require_valid_sensitivity(p1, s);
  GmsmBounds g{score_to_odds(p1, s.c_lo), score_to_odds(p1, s.c_hi)};
  // c_lo == p1 maps to exactly 1 mathematically; keep the endpoint in range.
  g.lambda_lo = std::min(g.lambda_lo, 1.0);
  g.lambda_hi = std::max(g.lambda_hi, 1.0);
  return g;
}

ClampedSensitivity cdep_from_conditional_c(double p1, double c) {
  require_open_probability(p1);
  if (!(c >= 0.0)) throw InputError("conditional c must be nonnegative");
  ClampedSensitivity out;
  double lo = p1 - c;
  double hi = p1 + c;
  if (lo < kSensitivityClamp) {
    lo = kSensitivityClamp;
    out.clamped = true;
  }
  if (hi > 1.0 - kSensitivityClamp) {
    hi = 1.0 - kSensitivityClamp;
    out.clamped = true;
  }
  out.sensitivity = {std::min(lo, p1), std::max(hi, p1)};
  return out;
}

SensitivityCheck validate_sensitivity(double p1, const CellSensitivity& s) {
  auto fail = [](std::string what) { return SensitivityCheck{false, std::move(what)}; };
  if (!std::isfinite(s.c_lo) || !std::isfinite(s.c_hi)) return fail("bounds must be finite");
  if (!(s.c_lo > 0.0)) return fail("c_lo <= 0");
  if (!(s.c_hi < 1.0)) return fail("c_hi >= 1");
  if (s.c_lo > p1) return fail("c_lo > p1");
  if (p1 > s.c_hi) return fail("p1 > c_hi");
  return {};
}

void require_valid_sensitivity(double p1, const CellSensitivity& s) {
  if (auto check = validate_sensitivity(p1, s); !check) {
    std::ostringstream msg;
    msg << "invalid sensitivity (c_lo=" << s.c_lo << ", c_hi=" << s.c_hi << ", p1=" << p1
        << "): " << check.violation;
    throw InputError(msg.str());
  }
}

bool is_collapsed(double p1, const CellSensitivity& s) { return s.c_lo == p1 && s.c_hi == p1; }

bool is_strict(double p1, const CellSensitivity& s) { return s.c_lo < p1 && p1 < s.c_hi; }

bool contains(const CellSensitivity& outer, const CellSensitivity& inner) {
  return outer.c_lo <= inner.c_lo && inner.c_hi <= outer.c_hi;
}

}  // namespace sensbounds
