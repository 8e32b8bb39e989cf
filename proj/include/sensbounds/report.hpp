#pragma once

// Sensitivity sweeps, breakdown search and report emission.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sensbounds/problem.hpp"

namespace sensbounds {

struct ReportRow {
  std::string estimand;
  std::size_t request_index = 0;
  std::string params;
  std::size_t grid_index = 0;
  std::string point;
  GmsmBounds lambda;
  std::string c_digest;  ///< per-cell "id:c_lo/c_hi" joined by ';'
  BoundInterval interval;
};

struct BreakdownRow {
  std::string estimand;
  std::string params;
  double target = 0.0;
  double lambda_max = 0.0;
  std::optional<double> value;
};

struct Provenance {
  std::string version;
  /// (label, sha256) for every input file, in the order given.
  std::vector<std::pair<std::string, std::string>> inputs;
  std::string cells_digest;  ///< sha256 of the canonical cell summary
  std::string config;
  std::vector<std::string> dropped_cells;
  std::size_t quantile_discrepancies = 0;
};

struct Report {
  std::vector<ReportRow> rows;  ///< sorted by (estimand, request, grid point)
  std::vector<BreakdownRow> breakdowns;
  Provenance provenance;
};

std::string library_version();

/// Evaluates every estimand at every sensitivity point. Grid points run on
/// up to `threads` workers (0: hardware concurrency); the output does not
/// depend on the thread count.
Report run(const Problem& problem, unsigned threads = 0);

/// Smallest MSM lambda in [1, lambda_max] whose interval contains `target`,
/// to 1e-6, or nullopt when lambda_max does not reach it.
std::optional<double> breakdown(const Problem& problem, const EstimandRequest& request,
                                double target, double lambda_max);

/// Interval at a single MSM lambda.
BoundInterval evaluate_msm(const Problem& problem, const EstimandRequest& request, double lambda);

void write_csv(std::ostream& out, const Report& report);
void write_text(std::ostream& out, const Report& report);

/// Numbers as they appear in reports: 12 significant digits, no "-0".
std::string format_number(double v);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace sensbounds
