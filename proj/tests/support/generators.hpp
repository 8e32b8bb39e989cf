#pragma once

// Random instance generators shared by the unit tests and the acceptance
// binary. All draws go through one seeded std::mt19937_64 so failures
// reproduce from the seed alone.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sensbounds/envelopes.hpp"
#include "sensbounds/models.hpp"
#include "sensbounds/step_cdf.hpp"

namespace sbtest {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Positive masses summing to 1.
inline std::vector<double> random_masses(Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  double total = 0.0;
  for (auto& v : m) total += (v = uniform(rng, 0.05, 1.0));
  for (auto& v : m) v /= total;
  return m;
}

/// Step cdf with 1..max_support points. Integer-valued supports (drawn from
/// [0, 2 * max_support]) make ties between arms and shifted values common.
inline sensbounds::StepCdf random_cdf(Rng& rng, std::size_t max_support, bool integer_valued) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_support)));
  std::vector<double> values;
  while (values.size() < n) {
    const double v = integer_valued ? uniform_int(rng, 0, 2 * static_cast<int>(max_support))
                                    : std::round(uniform(rng, -5.0, 5.0) * 1000.0) / 1000.0;
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  return sensbounds::StepCdf::from_masses(values, random_masses(rng, n));
}

/// Step cdf with exactly n points.
inline sensbounds::StepCdf random_cdf_exact(Rng& rng, std::size_t n, bool integer_valued) {
  std::vector<double> values;
  while (values.size() < n) {
    const double v = integer_valued ? uniform_int(rng, 0, 3 * static_cast<int>(n))
                                    : std::round(uniform(rng, -5.0, 5.0) * 1000.0) / 1000.0;
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  return sensbounds::StepCdf::from_masses(values, random_masses(rng, n));
}

inline sensbounds::Cell random_cell(Rng& rng, std::size_t max_support, bool integer_valued,
                                    std::string id = "w") {
  return sensbounds::Cell{std::move(id), 1.0, uniform(rng, 0.1, 0.9),
                          random_cdf(rng, max_support, integer_valued),
                          random_cdf(rng, max_support, integer_valued)};
}

/// c_lo < p1 < c_hi with both bounds inside (0, 1).
inline sensbounds::CellSensitivity random_strict_sensitivity(Rng& rng, double p1) {
  return {uniform(rng, 0.02, 0.98) * p1, p1 + uniform(rng, 0.02, 0.98) * (1.0 - p1)};
}

/// Valid sensitivity, occasionally touching p1 on one or both sides.
inline sensbounds::CellSensitivity random_sensitivity(Rng& rng, double p1) {
  auto s = random_strict_sensitivity(rng, p1);
  const int kind = uniform_int(rng, 0, 9);
  if (kind == 0) s.c_lo = p1;
  if (kind == 1) s.c_hi = p1;
  if (kind == 2) s = {p1, p1};
  return s;
}

/// Cells with weights summing to 1 and ids "c0", "c1", ...
inline std::vector<sensbounds::Cell> random_cells(Rng& rng, std::size_t count,
                                                  std::size_t max_support, bool integer_valued) {
  std::vector<sensbounds::Cell> cells;
  const auto w = random_masses(rng, count);
  for (std::size_t i = 0; i < count; ++i) {
    cells.push_back(random_cell(rng, max_support, integer_valued, "c" + std::to_string(i)));
    cells.back().weight = w[i];
  }
  return cells;
}

/// The reference cell: p1 = 0.5 and both arms Bernoulli(0.5).
inline sensbounds::Cell fixture_cell(std::string id = "a") {
  const auto bern = sensbounds::StepCdf::from_masses({0.0, 1.0}, {0.5, 0.5});
  return sensbounds::Cell{std::move(id), 1.0, 0.5, bern, bern};
}

inline std::vector<sensbounds::CellEnvelopes> envelopes_msm(std::span<const sensbounds::Cell> cells,
                                                            double lambda) {
  std::vector<sensbounds::CellEnvelopes> envs;
  for (const auto& c : cells)
    envs.push_back(sensbounds::compute_envelopes(
        c, sensbounds::cdep_from_gmsm(c.p1, sensbounds::msm(lambda))));
  return envs;
}

}  // namespace sbtest
