#include "sensbounds/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "sensbounds/errors.hpp"

#ifndef SENSBOUNDS_VERSION
#define SENSBOUNDS_VERSION "unknown"
#endif

namespace sensbounds {

namespace {

constexpr double kBreakdownTolerance = 1e-6;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Re-throws the active exception with `context` prefixed, keeping its type so
// the CLI can still map it to an exit code.
[[noreturn]] void rethrow_with(const std::exception_ptr& e, const std::string& context) {
  try {
    std::rethrow_exception(e);
  } catch (const OverlapError& err) {
    throw OverlapError(context + ": " + err.what());
  } catch (const InputError& err) {
    throw InputError(context + ": " + err.what());
  } catch (const InvariantError& err) {
    throw InvariantError(context + ": " + err.what());
  }
}

std::vector<CellEnvelopes> envelopes_for(const Problem& problem,
                                         std::span<const CellSensitivity> sens) {
  std::vector<CellEnvelopes> envs;
  envs.reserve(problem.cells.size());
  for (std::size_t i = 0; i < problem.cells.size(); ++i) {
    try {
      envs.push_back(compute_envelopes(problem.cells[i], sens[i]));
    } catch (...) {
      rethrow_with(std::current_exception(), "cell '" + problem.cells[i].id + "'");
    }
  }
  return envs;
}

std::string c_digest(std::span<const Cell> cells, std::span<const CellSensitivity> sens) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < cells.size(); ++i)
    parts.push_back(cells[i].id + ":" + format_number(sens[i].c_lo) + "/" +
                    format_number(sens[i].c_hi));
  return join(parts, ';');
}

std::vector<ReportRow> evaluate_point(const Problem& problem, std::size_t grid_index) {
  const ResolvedSensitivity rs = resolve(problem.sensitivity, grid_index, problem.cells);
  const auto envs = envelopes_for(problem, rs.cells);
  const std::string digest = c_digest(problem.cells, rs.cells);
  std::vector<ReportRow> rows;
  for (std::size_t r = 0; r < problem.estimands.size(); ++r) {
    const EstimandRequest& req = problem.estimands[r];
    ReportRow row;
    row.estimand = std::string(tag(req.estimand));
    row.request_index = r;
    row.params = req.describe();
    row.grid_index = grid_index;
    row.point = rs.label;
    row.lambda = rs.lambda;
    row.c_digest = digest;
    try {
      row.interval = evaluate(req, problem.cells, envs);
    } catch (...) {
      rethrow_with(std::current_exception(), row.estimand + " (" + row.params + ") at " + rs.label);
    }
    row.interval.sensitivity = rs.label;
    if (rs.clamped) row.interval.flags.emplace_back("clamped-sensitivity");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string library_version() { return SENSBOUNDS_VERSION; }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

Report run(const Problem& problem, unsigned threads) {
  const std::size_t discrepancies_before = envelope_quantile_discrepancies();
  const std::size_t points = problem.sensitivity.size();
  std::vector<std::vector<ReportRow>> per_point(points);
  std::vector<std::exception_ptr> errors(points);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(points, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points; i = next++) {
      try {
        per_point[i] = evaluate_point(problem, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Report report;
  for (auto& rows : per_point)
    std::move(rows.begin(), rows.end(), std::back_inserter(report.rows));
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.estimand, a.request_index, a.grid_index) <
           std::tie(b.estimand, b.request_index, b.grid_index);
  });

  for (const auto& b : problem.breakdowns) {
    const EstimandRequest req = resolve_request(b.estimand, problem.cells);
    report.breakdowns.push_back({std::string(tag(req.estimand)), req.describe(), b.target,
                                 b.lambda_max, breakdown(problem, req, b.target, b.lambda_max)});
  }

  std::ostringstream cells;
  write_cell_summary(cells, problem.cells);
  report.provenance.version = library_version();
  report.provenance.cells_digest = sha256_hex(cells.str());
  report.provenance.dropped_cells = problem.dropped_cells;
  report.provenance.quantile_discrepancies = envelope_quantile_discrepancies() - discrepancies_before;
  return report;
}

BoundInterval evaluate_msm(const Problem& problem, const EstimandRequest& request, double lambda) {
  std::vector<CellSensitivity> sens;
  for (const auto& c : problem.cells) sens.push_back(cdep_from_gmsm(c.p1, msm(lambda)));
  const auto envs = envelopes_for(problem, sens);
  return evaluate(request, problem.cells, envs);
}

std::optional<double> breakdown(const Problem& problem, const EstimandRequest& request,
                                double target, double lambda_max) {
  if (orientation(request.estimand).copula_dependent)
    throw InputError("breakdown is defined only for copula-free estimands, not '" +
                     std::string(tag(request.estimand)) + "'");
  if (!(lambda_max >= 1.0 && std::isfinite(lambda_max)))
    throw InputError("lambda_max must lie in [1, inf)");
  auto covers = [&](double lambda) {
    return evaluate_msm(problem, request, lambda).contains(target);
  };
  if (covers(1.0)) return 1.0;
  if (!covers(lambda_max)) return std::nullopt;
  // Intervals are nested in lambda, so coverage is monotone.
  double lo = 1.0;
  double hi = lambda_max;
  while (hi - lo > kBreakdownTolerance) {
    const double mid = 0.5 * (lo + hi);
    (covers(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace {

void write_provenance(std::ostream& out, const Report& report, const char* prefix) {
  const Provenance& p = report.provenance;
  out << prefix << "sensbounds " << p.version << '\n';
  for (const auto& [label, digest] : p.inputs)
    out << prefix << "input " << label << " sha256=" << digest << '\n';
  out << prefix << "cells sha256=" << p.cells_digest << '\n';
  if (!p.config.empty()) out << prefix << "config " << p.config << '\n';
  out << prefix << "dropped cells: " << (p.dropped_cells.empty() ? "none" : join(p.dropped_cells, ' '))
      << '\n';
  out << prefix << "quantile closed-form discrepancies: " << p.quantile_discrepancies << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const Report& report) {
  write_provenance(out, report, "# ");
  out << "estimand,params,point,lambda_lo,lambda_hi,c,lo,hi,flags\n";
  for (const auto& r : report.rows) {
    out << r.estimand << ',' << csv_field(r.params) << ',' << csv_field(r.point) << ','
        << format_number(r.lambda.lambda_lo) << ',' << format_number(r.lambda.lambda_hi) << ','
        << csv_field(r.c_digest) << ',' << format_number(r.interval.lo) << ','
        << format_number(r.interval.hi) << ',' << csv_field(join(r.interval.flags, ';')) << '\n';
  }
  for (const auto& b : report.breakdowns) {
    out << b.estimand << ',' << csv_field(b.params) << ",breakdown;target="
        << format_number(b.target) << ";lambda_max=" << format_number(b.lambda_max) << ",1,"
        << (b.value ? format_number(*b.value) : "none") << ",,,," << (b.value ? "" : "not-reached")
        << '\n';
  }
}

void write_text(std::ostream& out, const Report& report) {
  out << "sensitivity bounds report\n";
  write_provenance(out, report, "  ");
  out << '\n';
  std::string current;
  for (const auto& r : report.rows) {
    const std::string head = r.estimand + (r.params.empty() ? "" : " (" + r.params + ")");
    if (head != current) {
      out << head << '\n';
      current = head;
    }
    out << "  " << r.point << ": [" << format_number(r.interval.lo) << ", "
        << format_number(r.interval.hi) << "]";
    if (!r.interval.flags.empty()) out << "  " << join(r.interval.flags, ' ');
    out << '\n';
  }
  if (!report.breakdowns.empty()) out << "\nbreakdown (MSM lambda)\n";
  for (const auto& b : report.breakdowns) {
    out << "  " << b.estimand << (b.params.empty() ? "" : " (" + b.params + ")")
        << " target=" << format_number(b.target) << ": "
        << (b.value ? format_number(*b.value)
                    : "none up to lambda=" + format_number(b.lambda_max))
        << '\n';
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InvariantError("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

}  // namespace sensbounds
