#pragma once

// Problem assembly: configuration, ingestion of micro-data or cell
// summaries, overlap enforcement and sensitivity grids.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sensbounds/envelopes.hpp"
#include "sensbounds/models.hpp"
#include "sensbounds/params.hpp"

namespace sensbounds {

struct DataColumns {
  std::string outcome = "y";
  std::string treatment = "x";
  /// Empty means every column other than outcome and treatment.
  std::vector<std::string> covariates;
};

enum class SensitivityModel { msm, gmsm, conditional_c, raw };

struct SensitivitySpec {
  SensitivityModel model = SensitivityModel::msm;
  std::vector<double> lambdas = {1.0};     ///< msm
  std::vector<GmsmBounds> pairs;           ///< gmsm
  std::vector<double> c_values;            ///< conditional_c
  std::map<std::string, CellSensitivity> raw;  ///< raw: a single point, keyed by cell id

  std::size_t size() const;
  /// Grid point label, e.g. "lambda=2".
  std::string label(std::size_t i) const;
};

/// Parses "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_grid(const std::string& text);

/// Per-cell sensitivity at one grid point.
struct ResolvedSensitivity {
  std::vector<CellSensitivity> cells;
  bool clamped = false;
  /// Odds-ratio range covered: the model's own values for msm/gmsm, the
  /// extremes over cells otherwise.
  GmsmBounds lambda;
  std::string label;
};

ResolvedSensitivity resolve(const SensitivitySpec& spec, std::size_t index,
                            std::span<const Cell> cells);

/// An estimand as written in a configuration; cell-indexed parts are
/// resolved once the cells are known.
struct EstimandSpec {
  Estimand estimand = Estimand::ate;
  double tau = 0.5;
  double z = 0.0;
  double y1 = 0.0;
  double y0 = 0.0;
  std::string cell;
  std::map<std::string, double> omega;  ///< by cell id; missing cells default to 1
  bool has_omega = false;
};

struct BreakdownSpec {
  EstimandSpec estimand;
  double target = 0.0;
  double lambda_max = 10.0;
};

struct Config {
  DataColumns columns;
  double overlap_epsilon = 0.0;
  bool drop_nonoverlap = false;
  SensitivitySpec sensitivity;
  std::vector<EstimandSpec> estimands;
  std::vector<BreakdownSpec> breakdowns;

  static Config parse(const std::string& json_text);
  static Config load(const std::filesystem::path& path);
  /// Canonical single-line JSON rendering (used in report provenance).
  std::string dump() const;
};

EstimandSpec parse_estimand_spec(const std::string& name);

struct Problem {
  std::vector<Cell> cells;  ///< sorted by id
  std::vector<EstimandRequest> estimands;
  std::vector<BreakdownSpec> breakdowns;
  SensitivitySpec sensitivity;
  double overlap_epsilon = 0.0;
  std::vector<std::string> dropped_cells;
};

/// Ingested cells before the overlap rule. Cells with an empty arm cannot
/// carry a cdf for it and are listed separately with their weight.
struct CellTable {
  std::vector<Cell> cells;
  std::map<std::string, double> empty_arm;  ///< cell id -> weight
};

/// Reads a micro-data CSV; cell id is the covariate values joined by '|'.
CellTable read_micro_data(std::istream& in, const DataColumns& columns);
CellTable read_micro_data(const std::filesystem::path& path, const DataColumns& columns);

/// Cell-summary CSV: header "cell,weight,p1,arm,value,mass", one row per
/// (cell, arm, support point); arm is 1 (treated) or 0 (control). Numbers
/// are written with 17 significant digits so a round trip is exact.
CellTable read_cell_summary(std::istream& in);
CellTable read_cell_summary(const std::filesystem::path& path);
void write_cell_summary(std::ostream& out, std::span<const Cell> cells);

/// Sorts cells by id, checks weights and applies the overlap rule: a cell
/// fails when an arm is empty or p1 lies outside [eps, 1 - eps]. Failing
/// cells raise OverlapError, or are dropped (and the rest reweighted) when
/// drop_nonoverlap is set.
Problem assemble(const Config& config, CellTable table);

/// Estimand request with omega aligned to the given cells.
EstimandRequest resolve_request(const EstimandSpec& spec, std::span<const Cell> cells);

}  // namespace sensbounds
