// Command-line front end: bounds sweeps, breakdown values, the oracle suite
// on small problems and sensitivity-model conversions.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sensbounds/errors.hpp"
#include "sensbounds/oracle.hpp"
#include "sensbounds/report.hpp"

namespace sb = sensbounds;

namespace {

enum ExitCode { kOk = 0, kInput = 2, kOverlap = 3, kInvariant = 4 };

struct InputOptions {
  std::string config;
  std::string data;
  std::string cells;
  std::string grid;
  std::vector<std::string> estimands;
  std::optional<double> tau;
  std::optional<double> z;
  std::optional<double> y1;
  std::optional<double> y0;
  std::string cell;
  std::optional<double> epsilon;
  bool drop = false;
};

void add_input_options(CLI::App* cmd, InputOptions& o, bool multi_estimand) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  auto* data = cmd->add_option("--data", o.data, "micro-data CSV (outcome, treatment, covariates)");
  auto* cells = cmd->add_option("--cells", o.cells, "cell-summary CSV");
  data->excludes(cells);
  cmd->add_option("--grid", o.grid, "MSM lambda grid start:stop:step (replaces the config grid)");
  if (multi_estimand) {
    cmd->add_option("--estimand", o.estimands, "estimand tag; repeatable, replaces config list");
  } else {
    cmd->add_option("--estimand", o.estimands, "estimand tag")->required()->expected(1);
  }
  cmd->add_option("--tau", o.tau, "quantile level for quantile estimands");
  cmd->add_option("--z", o.z, "threshold for dte");
  cmd->add_option("--y1", o.y1, "treated argument of joint_cdf");
  cmd->add_option("--y0", o.y0, "control argument of joint_cdf");
  cmd->add_option("--cell", o.cell, "cell id for cate / cqte");
  cmd->add_option("--epsilon-overlap", o.epsilon, "overlap threshold eps: require eps <= p1 <= 1 - eps");
  cmd->add_flag("--drop-nonoverlap", o.drop, "drop (and log) cells failing overlap instead of aborting");
}

sb::EstimandSpec spec_from_flags(const std::string& name, const InputOptions& o) {
  sb::EstimandSpec e = sb::parse_estimand_spec(name);
  if (o.tau) e.tau = *o.tau;
  if (o.z) e.z = *o.z;
  if (o.y1) e.y1 = *o.y1;
  if (o.y0) e.y0 = *o.y0;
  e.cell = o.cell;
  return e;
}

sb::Config effective_config(const InputOptions& o) {
  sb::Config c = o.config.empty() ? sb::Config{} : sb::Config::load(o.config);
  if (!o.grid.empty()) {
    c.sensitivity.model = sb::SensitivityModel::msm;
    c.sensitivity.lambdas = sb::parse_grid(o.grid);
  }
  if (!o.estimands.empty()) {
    c.estimands.clear();
    for (const auto& name : o.estimands) c.estimands.push_back(spec_from_flags(name, o));
  }
  if (o.epsilon) {
    if (!(*o.epsilon >= 0.0 && *o.epsilon < 0.5))
      throw sb::InputError("--epsilon-overlap must lie in [0, 0.5)");
    c.overlap_epsilon = *o.epsilon;
  }
  if (o.drop) c.drop_nonoverlap = true;
  return c;
}

struct Loaded {
  sb::Config config;
  sb::Problem problem;
  std::vector<std::pair<std::string, std::string>> inputs;
};

Loaded load(const InputOptions& o) {
  if (o.data.empty() && o.cells.empty()) throw sb::InputError("one of --data or --cells is required");
  Loaded out;
  out.config = effective_config(o);
  const std::filesystem::path path = o.data.empty() ? o.cells : o.data;
  sb::CellTable table = o.data.empty() ? sb::read_cell_summary(path)
                                       : sb::read_micro_data(path, out.config.columns);
  out.problem = sb::assemble(out.config, std::move(table));
  out.inputs.emplace_back(path.filename().string(), sb::sha256_file(path));
  if (!o.config.empty())
    out.inputs.emplace_back(std::filesystem::path(o.config).filename().string(),
                            sb::sha256_file(o.config));
  if (!out.problem.dropped_cells.empty()) {
    std::cerr << "dropped " << out.problem.dropped_cells.size()
              << " cell(s) failing overlap, remaining weights renormalized:";
    for (const auto& id : out.problem.dropped_cells) std::cerr << " '" << id << "'";
    std::cerr << '\n';
  }
  return out;
}

void write_to(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sb::InputError("cannot write '" + path + "'");
  out << text;
}

int cmd_bounds(const InputOptions& o, const std::string& out_path, const std::string& text_path,
               const std::string& cells_path, unsigned threads) {
  Loaded in = load(o);
  if (!cells_path.empty()) {
    std::ostringstream cells;
    sb::write_cell_summary(cells, in.problem.cells);
    write_to(cells_path, cells.str());
  }
  sb::Report report = sb::run(in.problem, threads);
  report.provenance.inputs = in.inputs;
  report.provenance.config = in.config.dump();
  std::ostringstream csv;
  sb::write_csv(csv, report);
  write_to(out_path, csv.str());
  if (!text_path.empty()) {
    std::ostringstream text;
    sb::write_text(text, report);
    write_to(text_path, text.str());
  }
  return kOk;
}

int cmd_breakdown(const InputOptions& o, double target, double lambda_max) {
  Loaded in = load(o);
  const sb::EstimandRequest req =
      sb::resolve_request(spec_from_flags(o.estimands.front(), o), in.problem.cells);
  const auto value = sb::breakdown(in.problem, req, target, lambda_max);
  std::cout << tag(req.estimand);
  if (const auto params = req.describe(); !params.empty()) std::cout << " (" << params << ")";
  std::cout << " target=" << sb::format_number(target) << " breakdown="
            << (value ? sb::format_number(*value) : "none") << '\n';
  return kOk;
}

// Compares the closed-form envelopes with brute-force enumeration on every
// cell small enough to enumerate, and checks the switching witnesses.
int cmd_oracle_check(const InputOptions& o, int resolution) {
  Loaded in = load(o);
  const auto& cells = in.problem.cells;
  bool sound = true;
  for (std::size_t g = 0; g < in.problem.sensitivity.size(); ++g) {
    const sb::ResolvedSensitivity rs = sb::resolve(in.problem.sensitivity, g, cells);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const sb::Cell& cell = cells[i];
      if (cell.treated.size() > sb::oracle::kMaxSupport ||
          cell.control.size() > sb::oracle::kMaxSupport) {
        std::cout << rs.label << " cell '" << cell.id << "': skipped (support too large)\n";
        continue;
      }
      const sb::CellEnvelopes env = sb::compute_envelopes(cell, rs.cells[i]);
      double gap = 0.0;
      double excess = 0.0;
      for (sb::Arm arm : {sb::Arm::treated, sb::Arm::control}) {
        for (sb::Conditioning cond : {sb::Conditioning::marginal, sb::Conditioning::cross}) {
          const auto band = sb::oracle::attainable_cdf_band(cell, rs.cells[i], arm, cond, resolution);
          const auto& f = cell.observed(arm);
          for (std::size_t k = 0; k < band.size(); ++k) {
            const double y = f.support()[k];
            const double lo = env.arm(arm).get(sb::Side::lo, cond).eval(y);
            const double hi = env.arm(arm).get(sb::Side::hi, cond).eval(y);
            gap = std::max({gap, band[k].lo - lo, hi - band[k].hi});
            excess = std::max({excess, lo - band[k].lo, band[k].hi - hi});
          }
        }
      }
      bool witnesses = true;
      for (sb::Arm arm : {sb::Arm::treated, sb::Arm::control})
        for (sb::Side side : {sb::Side::lo, sb::Side::hi})
          witnesses = witnesses &&
                      sb::oracle::verify_witness(cell, rs.cells[i], arm, side).passed();
      const bool ok = excess <= 1e-9 && witnesses;
      sound = sound && ok;
      std::cout << rs.label << " cell '" << cell.id << "': max gap " << sb::format_number(gap)
                << ", max excess " << sb::format_number(excess) << ", witnesses "
                << (witnesses ? "pass" : "FAIL") << (ok ? "" : "  VIOLATION") << '\n';
    }
  }
  return sound ? kOk : kInvariant;
}

struct ConvertOptions {
  double p1 = 0.0;
  std::optional<double> lambda;
  std::optional<double> lambda_lo;
  std::optional<double> lambda_hi;
  std::optional<double> c_lo;
  std::optional<double> c_hi;
  std::optional<double> c;
};

int cmd_convert(const ConvertOptions& o) {
  auto print_c = [](const sb::CellSensitivity& s) {
    std::cout << "c_lo=" << sb::format_number(s.c_lo) << " c_hi=" << sb::format_number(s.c_hi);
  };
  if (o.lambda) {
    print_c(sb::cdep_from_gmsm(o.p1, sb::msm(*o.lambda)));
  } else if (o.lambda_lo || o.lambda_hi) {
    if (!o.lambda_lo || !o.lambda_hi)
      throw sb::InputError("--lambda-lo and --lambda-hi go together");
    print_c(sb::cdep_from_gmsm(o.p1, {*o.lambda_lo, *o.lambda_hi}));
  } else if (o.c_lo || o.c_hi) {
    if (!o.c_lo || !o.c_hi) throw sb::InputError("--c-lo and --c-hi go together");
    const auto g = sb::gmsm_from_cdep(o.p1, {*o.c_lo, *o.c_hi});
    std::cout << "lambda_lo=" << sb::format_number(g.lambda_lo)
              << " lambda_hi=" << sb::format_number(g.lambda_hi);
  } else if (o.c) {
    const auto cs = sb::cdep_from_conditional_c(o.p1, *o.c);
    print_c(cs.sensitivity);
    if (cs.clamped) std::cout << " (clamped)";
  } else {
    throw sb::InputError("convert needs --lambda, --lambda-lo/--lambda-hi, --c-lo/--c-hi or --c");
  }
  std::cout << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp bounds on treatment effects under sensitivity models"};
  app.set_version_flag("--version", sb::library_version());
  app.require_subcommand(1);

  InputOptions bounds_in;
  std::string out_path;
  std::string text_path;
  std::string cells_out;
  unsigned threads = 0;
  auto* bounds = app.add_subcommand("bounds", "evaluate estimands over a sensitivity grid");
  add_input_options(bounds, bounds_in, true);
  bounds->add_option("--out", out_path, "CSV report path (default: stdout)");
  bounds->add_option("--text", text_path, "text report path");
  bounds->add_option("--write-cells", cells_out, "also write the assembled cell summary here");
  bounds->add_option("--threads", threads, "worker threads (0: all cores)");

  InputOptions breakdown_in;
  double target = 0.0;
  double lambda_max = 10.0;
  auto* breakdown = app.add_subcommand("breakdown", "smallest MSM lambda whose interval covers a target");
  add_input_options(breakdown, breakdown_in, false);
  breakdown->add_option("--target", target, "value to cover (default 0)");
  breakdown->add_option("--lambda-max", lambda_max, "search limit (default 10)");

  InputOptions oracle_in;
  int resolution = 200;
  auto* oracle = app.add_subcommand("oracle-check", "compare closed forms with brute-force enumeration");
  add_input_options(oracle, oracle_in, true);
  oracle->add_option("--resolution", resolution, "score grid resolution (default 200)")
      ->check(CLI::Range(2, 100000));

  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "convert between sensitivity parameterizations");
  convert->add_option("--p1", conv.p1, "propensity P(X = 1 | W = w)")->required();
  convert->add_option("--lambda", conv.lambda, "MSM lambda");
  convert->add_option("--lambda-lo", conv.lambda_lo, "GMSM lower odds bound");
  convert->add_option("--lambda-hi", conv.lambda_hi, "GMSM upper odds bound");
  convert->add_option("--c-lo", conv.c_lo, "lower latent score bound");
  convert->add_option("--c-hi", conv.c_hi, "upper latent score bound");
  convert->add_option("--c", conv.c, "conditional c-dependence half-width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*bounds) return cmd_bounds(bounds_in, out_path, text_path, cells_out, threads);
    if (*breakdown) return cmd_breakdown(breakdown_in, target, lambda_max);
    if (*oracle) return cmd_oracle_check(oracle_in, resolution);
    if (*convert) return cmd_convert(conv);
  } catch (const sb::OverlapError& e) {
    std::cerr << "overlap violation: " << e.what() << '\n';
    return kOverlap;
  } catch (const sb::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const sb::InvariantError& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
