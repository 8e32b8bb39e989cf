#include "sensbounds/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sensbounds/errors.hpp"

namespace sensbounds {

using nlohmann::json;

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

// ---- CSV ------------------------------------------------------------------

// One record of RFC 4180 style CSV: comma separated, fields optionally
// double-quoted with "" as an escaped quote. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  while (true) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        // Quoted field spanning lines.
        std::string more;
        if (!std::getline(in, more)) throw InputError("unterminated quoted CSV field");
        ++line_no;
        if (!more.empty() && more.back() == '\r') more.pop_back();
        line += '\n' + more;
        --i;
        continue;
      }
      fields.push_back(field);
      return true;
    }
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& what, std::size_t line_no) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v))
    throw InputError("line " + std::to_string(line_no) + ": " + what + " '" + t +
                     "' is not a finite number");
  return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  return in;
}

// ---- config ---------------------------------------------------------------

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw InputError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InputError("config: '" + what + "' has the wrong type");
  }
}

std::vector<double> number_list(const json& j, const std::string& what) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (j.is_number()) return {j.get<double>()};
  return get_as<std::vector<double>>(j, what);
}

EstimandSpec estimand_from_json(const json& j) {
  if (j.is_string()) return parse_estimand_spec(j.get<std::string>());
  if (!j.is_object()) throw InputError("config: estimand entries must be names or objects");
  reject_unknown_keys(j, {"name", "tau", "z", "y1", "y0", "cell", "omega"}, "estimand");
  if (!j.contains("name")) throw InputError("config: estimand without a name");
  EstimandSpec spec = parse_estimand_spec(get_as<std::string>(j["name"], "name"));
  if (j.contains("tau")) spec.tau = get_as<double>(j["tau"], "tau");
  if (j.contains("z")) spec.z = get_as<double>(j["z"], "z");
  if (j.contains("y1")) spec.y1 = get_as<double>(j["y1"], "y1");
  if (j.contains("y0")) spec.y0 = get_as<double>(j["y0"], "y0");
  if (j.contains("cell")) spec.cell = get_as<std::string>(j["cell"], "cell");
  if (j.contains("omega")) {
    spec.omega = get_as<std::map<std::string, double>>(j["omega"], "omega");
    spec.has_omega = true;
  }
  return spec;
}

json estimand_to_json(const EstimandSpec& e) {
  json j{{"name", std::string(tag(e.estimand))}, {"tau", e.tau}, {"z", e.z}, {"y1", e.y1},
         {"y0", e.y0}, {"cell", e.cell}};
  if (e.has_omega) j["omega"] = e.omega;
  return j;
}

const char* model_name(SensitivityModel m) {
  switch (m) {
    case SensitivityModel::msm:
      return "msm";
    case SensitivityModel::gmsm:
      return "gmsm";
    case SensitivityModel::conditional_c:
      return "conditional_c";
    case SensitivityModel::raw:
      return "raw";
  }
  return "?";
}

SensitivitySpec sensitivity_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config: 'sensitivity' must be an object");
  reject_unknown_keys(j, {"model", "lambdas", "pairs", "c", "cells"}, "sensitivity");
  SensitivitySpec s;
  const std::string model = j.contains("model") ? get_as<std::string>(j["model"], "model") : "msm";
  if (model == "msm") {
    s.model = SensitivityModel::msm;
    if (j.contains("lambdas")) s.lambdas = number_list(j["lambdas"], "lambdas");
  } else if (model == "gmsm") {
    s.model = SensitivityModel::gmsm;
    if (!j.contains("pairs")) throw InputError("config: gmsm needs 'pairs'");
    for (const auto& p : get_as<std::vector<std::vector<double>>>(j["pairs"], "pairs")) {
      if (p.size() != 2) throw InputError("config: gmsm pairs have two entries");
      s.pairs.push_back({p[0], p[1]});
    }
  } else if (model == "conditional_c") {
    s.model = SensitivityModel::conditional_c;
    if (!j.contains("c")) throw InputError("config: conditional_c needs 'c'");
    s.c_values = number_list(j["c"], "c");
  } else if (model == "raw") {
    s.model = SensitivityModel::raw;
    if (!j.contains("cells")) throw InputError("config: raw sensitivity needs 'cells'");
    for (const auto& [id, v] : j["cells"].items()) {
      const auto p = get_as<std::vector<double>>(v, "cells." + id);
      if (p.size() != 2) throw InputError("config: raw sensitivity entries are [c_lo, c_hi]");
      s.raw[id] = {p[0], p[1]};
    }
  } else {
    throw InputError("config: unknown sensitivity model '" + model + "'");
  }
  if (s.size() == 0) throw InputError("config: empty sensitivity grid");
  return s;
}

json sensitivity_to_json(const SensitivitySpec& s) {
  json j{{"model", model_name(s.model)}};
  switch (s.model) {
    case SensitivityModel::msm:
      j["lambdas"] = s.lambdas;
      break;
    case SensitivityModel::gmsm: {
      json pairs = json::array();
      for (const auto& p : s.pairs) pairs.push_back({p.lambda_lo, p.lambda_hi});
      j["pairs"] = pairs;
      break;
    }
    case SensitivityModel::conditional_c:
      j["c"] = s.c_values;
      break;
    case SensitivityModel::raw: {
      json cells = json::object();
      for (const auto& [id, c] : s.raw) cells[id] = {c.c_lo, c.c_hi};
      j["cells"] = cells;
      break;
    }
  }
  return j;
}

}  // namespace

// ---- sensitivity ----------------------------------------------------------

std::size_t SensitivitySpec::size() const {
  switch (model) {
    case SensitivityModel::msm:
      return lambdas.size();
    case SensitivityModel::gmsm:
      return pairs.size();
    case SensitivityModel::conditional_c:
      return c_values.size();
    case SensitivityModel::raw:
      return 1;
  }
  return 0;
}

std::string SensitivitySpec::label(std::size_t i) const {
  switch (model) {
    case SensitivityModel::msm:
      return "lambda=" + fmt12(lambdas.at(i));
    case SensitivityModel::gmsm:
      return "lambda_lo=" + fmt12(pairs.at(i).lambda_lo) + ";lambda_hi=" + fmt12(pairs.at(i).lambda_hi);
    case SensitivityModel::conditional_c:
      return "c=" + fmt12(c_values.at(i));
    case SensitivityModel::raw:
      return "raw";
  }
  return {};
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw InputError("grid '" + text + "' is not start:stop:step");
  const double start = parse_number(parts[0], "grid start", 0);
  const double stop = parse_number(parts[1], "grid stop", 0);
  const double step = parse_number(parts[2], "grid step", 0);
  if (!(step > 0.0)) throw InputError("grid step must be positive");
  if (stop < start) throw InputError("grid stop lies below start");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 1e-9 * step) break;
    out.push_back(v);
    if (out.size() > 1000000) throw InputError("grid has too many points");
  }
  return out;
}

ResolvedSensitivity resolve(const SensitivitySpec& spec, std::size_t index,
                            std::span<const Cell> cells) {
  if (index >= spec.size()) throw InputError("sensitivity grid index out of range");
  ResolvedSensitivity out;
  out.label = spec.label(index);
  out.cells.reserve(cells.size());
  switch (spec.model) {
    case SensitivityModel::msm:
    case SensitivityModel::gmsm: {
      const GmsmBounds g =
          spec.model == SensitivityModel::msm ? msm(spec.lambdas[index]) : spec.pairs[index];
      for (const auto& c : cells) out.cells.push_back(cdep_from_gmsm(c.p1, g));
      out.lambda = g;
      return out;
    }
    case SensitivityModel::conditional_c:
      for (const auto& c : cells) {
        const ClampedSensitivity cs = cdep_from_conditional_c(c.p1, spec.c_values[index]);
        out.cells.push_back(cs.sensitivity);
        out.clamped = out.clamped || cs.clamped;
      }
      break;
    case SensitivityModel::raw:
      for (const auto& c : cells) {
        const auto it = spec.raw.find(c.id);
        if (it == spec.raw.end())
          throw InputError("raw sensitivity has no entry for cell '" + c.id + "'");
        out.cells.push_back(it->second);
      }
      break;
  }
  out.lambda = {1.0, 1.0};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const GmsmBounds g = gmsm_from_cdep(cells[i].p1, out.cells[i]);
    out.lambda.lambda_lo = std::min(out.lambda.lambda_lo, g.lambda_lo);
    out.lambda.lambda_hi = std::max(out.lambda.lambda_hi, g.lambda_hi);
  }
  return out;
}

// ---- config ---------------------------------------------------------------

EstimandSpec parse_estimand_spec(const std::string& name) {
  const auto e = parse_estimand(name);
  if (!e) throw InputError("unknown estimand '" + name + "'");
  EstimandSpec spec;
  spec.estimand = *e;
  return spec;
}

Config Config::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"data", "overlap_epsilon", "drop_nonoverlap", "sensitivity", "estimands",
                       "breakdown"},
                      "config");
  Config c;
  if (j.contains("data")) {
    const json& d = j["data"];
    reject_unknown_keys(d, {"outcome", "treatment", "covariates"}, "data");
    if (d.contains("outcome")) c.columns.outcome = get_as<std::string>(d["outcome"], "outcome");
    if (d.contains("treatment"))
      c.columns.treatment = get_as<std::string>(d["treatment"], "treatment");
    if (d.contains("covariates"))
      c.columns.covariates = get_as<std::vector<std::string>>(d["covariates"], "covariates");
  }
  if (j.contains("overlap_epsilon"))
    c.overlap_epsilon = get_as<double>(j["overlap_epsilon"], "overlap_epsilon");
  if (!(c.overlap_epsilon >= 0.0 && c.overlap_epsilon < 0.5))
    throw InputError("config: overlap_epsilon must lie in [0, 0.5)");
  if (j.contains("drop_nonoverlap"))
    c.drop_nonoverlap = get_as<bool>(j["drop_nonoverlap"], "drop_nonoverlap");
  if (j.contains("sensitivity")) c.sensitivity = sensitivity_from_json(j["sensitivity"]);
  if (j.contains("estimands")) {
    if (!j["estimands"].is_array()) throw InputError("config: 'estimands' must be a list");
    for (const auto& e : j["estimands"]) c.estimands.push_back(estimand_from_json(e));
  }
  if (j.contains("breakdown")) {
    if (!j["breakdown"].is_array()) throw InputError("config: 'breakdown' must be a list");
    for (const auto& b : j["breakdown"]) {
      if (!b.is_object() || !b.contains("estimand"))
        throw InputError("config: breakdown entries need an 'estimand'");
      reject_unknown_keys(b, {"estimand", "target", "lambda_max"}, "breakdown");
      BreakdownSpec spec;
      spec.estimand = estimand_from_json(b["estimand"]);
      if (b.contains("target")) spec.target = get_as<double>(b["target"], "target");
      if (b.contains("lambda_max")) spec.lambda_max = get_as<double>(b["lambda_max"], "lambda_max");
      c.breakdowns.push_back(spec);
    }
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::dump() const {
  json j;
  j["data"] = {{"outcome", columns.outcome},
               {"treatment", columns.treatment},
               {"covariates", columns.covariates}};
  j["overlap_epsilon"] = overlap_epsilon;
  j["drop_nonoverlap"] = drop_nonoverlap;
  j["sensitivity"] = sensitivity_to_json(sensitivity);
  json est = json::array();
  for (const auto& e : estimands) est.push_back(estimand_to_json(e));
  j["estimands"] = est;
  json br = json::array();
  for (const auto& b : breakdowns)
    br.push_back({{"estimand", estimand_to_json(b.estimand)},
                  {"target", b.target},
                  {"lambda_max", b.lambda_max}});
  j["breakdown"] = br;
  return j.dump();
}

// ---- ingestion ------------------------------------------------------------

CellTable read_micro_data(std::istream& in, const DataColumns& columns) {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_record(in, header, line_no)) throw InputError("data file is empty");
  for (auto& h : header) h = trim(h);
  const std::size_t yi = column_index(header, columns.outcome);
  const std::size_t xi = column_index(header, columns.treatment);
  std::vector<std::size_t> wi;
  if (columns.covariates.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (i != yi && i != xi) wi.push_back(i);
  } else {
    for (const auto& name : columns.covariates) wi.push_back(column_index(header, name));
  }

  struct Group {
    std::vector<double> treated;
    std::vector<double> control;
  };
  std::map<std::string, Group> groups;
  std::size_t total = 0;
  std::vector<std::string> fields;
  while (read_record(in, fields, line_no)) {
    if (fields.size() != header.size())
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    const double y = parse_number(fields[yi], "outcome", line_no);
    const double x = parse_number(fields[xi], "treatment", line_no);
    if (x != 0.0 && x != 1.0)
      throw InputError("line " + std::to_string(line_no) + ": non-binary treatment '" +
                       trim(fields[xi]) + "'");
    std::string id;
    for (std::size_t k = 0; k < wi.size(); ++k) {
      if (k) id += '|';
      id += trim(fields[wi[k]]);
    }
    auto& g = groups[id];
    (x == 1.0 ? g.treated : g.control).push_back(y);
    ++total;
  }
  if (total == 0) throw InputError("data file has no rows");

  CellTable table;
  const double n = static_cast<double>(total);
  for (auto& [id, g] : groups) {
    const double count = static_cast<double>(g.treated.size() + g.control.size());
    const double weight = count / n;
    if (g.treated.empty() || g.control.empty()) {
      table.empty_arm[id] = weight;
      continue;
    }
    table.cells.push_back(Cell{id, weight, static_cast<double>(g.treated.size()) / count,
                               StepCdf::empirical(g.treated), StepCdf::empirical(g.control)});
  }
  return table;
}

CellTable read_micro_data(const std::filesystem::path& path, const DataColumns& columns) {
  std::ifstream in = open_input(path);
  return read_micro_data(in, columns);
}

CellTable read_cell_summary(std::istream& in) {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_record(in, header, line_no)) throw InputError("cell summary is empty");
  for (auto& h : header) h = trim(h);
  const std::size_t ci = column_index(header, "cell");
  const std::size_t wi = column_index(header, "weight");
  const std::size_t pi = column_index(header, "p1");
  const std::size_t ai = column_index(header, "arm");
  const std::size_t vi = column_index(header, "value");
  const std::size_t mi = column_index(header, "mass");
  const auto cum_it = std::find(header.begin(), header.end(), "cum");
  const bool has_cum = cum_it != header.end();
  const std::size_t cumi = static_cast<std::size_t>(cum_it - header.begin());

  struct ArmRows {
    std::vector<double> values;
    std::vector<double> masses;
    std::vector<double> cums;
  };
  struct Raw {
    double weight = 0.0;
    double p1 = 0.0;
    ArmRows arm[2];
  };
  std::map<std::string, Raw> raw;
  std::vector<std::string> f;
  while (read_record(in, f, line_no)) {
    if (f.size() != header.size())
      throw InputError("line " + std::to_string(line_no) + ": wrong number of fields");
    const std::string id = trim(f[ci]);
    const double weight = parse_number(f[wi], "weight", line_no);
    const double p1 = parse_number(f[pi], "p1", line_no);
    const double arm = parse_number(f[ai], "arm", line_no);
    if (arm != 0.0 && arm != 1.0)
      throw InputError("line " + std::to_string(line_no) + ": arm must be 0 or 1");
    auto [it, fresh] = raw.try_emplace(id);
    Raw& r = it->second;
    if (fresh) {
      r.weight = weight;
      r.p1 = p1;
    } else if (r.weight != weight || r.p1 != p1) {
      throw InputError("line " + std::to_string(line_no) + ": cell '" + id +
                       "' repeats with a different weight or p1");
    }
    ArmRows& rows = r.arm[arm == 1.0 ? 1 : 0];
    rows.values.push_back(parse_number(f[vi], "value", line_no));
    rows.masses.push_back(parse_number(f[mi], "mass", line_no));
    if (has_cum) rows.cums.push_back(parse_number(f[cumi], "cum", line_no));
  }
  if (raw.empty()) throw InputError("cell summary has no rows");

  auto build = [&](ArmRows& rows, const std::string& id) {
    try {
      if (has_cum) return StepCdf::from_cumulative(std::move(rows.values), std::move(rows.cums));
      return StepCdf::from_masses(std::move(rows.values), std::move(rows.masses));
    } catch (const InputError& e) {
      throw InputError("cell '" + id + "': " + e.what());
    }
  };
  CellTable table;
  for (auto& [id, r] : raw) {
    if (!(r.weight >= 0.0)) throw InputError("cell '" + id + "': negative weight");
    if (r.arm[0].values.empty() || r.arm[1].values.empty()) {
      table.empty_arm[id] = r.weight;
      continue;
    }
    if (!(r.p1 > 0.0 && r.p1 < 1.0))
      throw OverlapError("cell '" + id + "': p1 must lie strictly between 0 and 1");
    table.cells.push_back(Cell{id, r.weight, r.p1, build(r.arm[1], id), build(r.arm[0], id)});
  }
  return table;
}

CellTable read_cell_summary(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_cell_summary(in);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

void write_cell_summary(std::ostream& out, std::span<const Cell> cells) {
  out << "cell,weight,p1,arm,value,mass,cum\n";
  for (const auto& c : cells) {
    for (int arm : {1, 0}) {
      const StepCdf& f = arm == 1 ? c.treated : c.control;
      for (std::size_t i = 0; i < f.size(); ++i) {
        out << csv_field(c.id) << ',' << fmt17(c.weight) << ',' << fmt17(c.p1) << ',' << arm
            << ',' << fmt17(f.support()[i]) << ',' << fmt17(f.masses()[i]) << ','
            << fmt17(f.cum()[i]) << '\n';
      }
    }
  }
}

// ---- assembly -------------------------------------------------------------

EstimandRequest resolve_request(const EstimandSpec& spec, std::span<const Cell> cells) {
  EstimandRequest req;
  req.estimand = spec.estimand;
  req.tau = spec.tau;
  req.z = spec.z;
  req.y1 = spec.y1;
  req.y0 = spec.y0;
  req.cell = spec.cell;
  if (spec.has_omega) {
    for (const auto& [id, _] : spec.omega) {
      if (std::none_of(cells.begin(), cells.end(), [&](const Cell& c) { return c.id == id; }))
        throw InputError("omega names unknown cell '" + id + "'");
    }
    for (const auto& c : cells) {
      const auto it = spec.omega.find(c.id);
      req.omega.push_back(it == spec.omega.end() ? 1.0 : it->second);
    }
  }
  return req;
}

Problem assemble(const Config& config, CellTable table) {
  const double eps = config.overlap_epsilon;
  std::vector<std::string> failing;
  for (const auto& [id, _] : table.empty_arm) failing.push_back(id);
  for (const auto& c : table.cells)
    if (c.p1 < eps || c.p1 > 1.0 - eps) failing.push_back(c.id);
  std::sort(failing.begin(), failing.end());

  double total = 0.0;
  for (const auto& c : table.cells) total += c.weight;
  for (const auto& [_, w] : table.empty_arm) total += w;
  if (std::abs(total - 1.0) > kNormalizationTolerance)
    throw InputError("cell weights sum to " + fmt12(total) + ", not 1");

  Problem p;
  p.sensitivity = config.sensitivity;
  p.overlap_epsilon = eps;
  if (!failing.empty()) {
    if (!config.drop_nonoverlap) {
      std::string names;
      for (const auto& id : failing) names += (names.empty() ? "'" : ", '") + id + "'";
      throw OverlapError("overlap violated in cell(s) " + names);
    }
    const std::set<std::string> drop(failing.begin(), failing.end());
    std::erase_if(table.cells, [&](const Cell& c) { return drop.count(c.id) > 0; });
    if (table.cells.empty()) throw OverlapError("every cell violates overlap");
    double kept = 0.0;
    for (const auto& c : table.cells) kept += c.weight;
    for (auto& c : table.cells) c.weight /= kept;
    p.dropped_cells = failing;
  }
  std::sort(table.cells.begin(), table.cells.end(),
            [](const Cell& a, const Cell& b) { return a.id < b.id; });
  if (table.cells.empty()) throw InputError("no cells");
  p.cells = std::move(table.cells);
  for (const auto& e : config.estimands) p.estimands.push_back(resolve_request(e, p.cells));
  p.breakdowns = config.breakdowns;
  return p;
}

}  // namespace sensbounds
