#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sensbounds/errors.hpp"
#include "sensbounds/report.hpp"
#include "support/generators.hpp"

using namespace sensbounds;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const char* kFixtureCsv = "y,x,w\n0,1,a\n1,1,a\n0,0,a\n1,0,a\n";

struct ScratchDir {
  fs::path path = fs::temp_directory_path() /
                  ("sensbounds-test-" + std::to_string(std::random_device{}()));
  ScratchDir() { fs::create_directories(path); }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch_dir() {
  static const ScratchDir dir;
  return dir.path;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SENSBOUNDS_CLI + "\" " + args + " >" +
                          (scratch_dir() / "stdout.txt").string() + " 2>" +
                          (scratch_dir() / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Problem fixture_problem(const std::string& config_json) {
  std::istringstream in(kFixtureCsv);
  const Config cfg = Config::parse(config_json);
  return assemble(cfg, read_micro_data(in, cfg.columns));
}

// Random micro-data over a few discrete covariate values.
std::string random_micro_data(sbtest::Rng& rng, int rows) {
  std::ostringstream out;
  out << "y,x,g,h\n";
  for (int i = 0; i < rows; ++i) {
    const int g = sbtest::uniform_int(rng, 0, 1);
    const int h = sbtest::uniform_int(rng, 0, 1);
    const int x = i < 8 ? (i % 2) : sbtest::uniform_int(rng, 0, 1);
    const int gi = i < 8 ? (i / 2) % 2 : g;
    const int hi = i < 8 ? i / 4 : h;
    out << sbtest::uniform_int(rng, 0, 5) * 0.5 + x << ',' << x << ',' << gi << ',' << hi << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("micro-data ingestion") {
  std::istringstream in(kFixtureCsv);
  const auto table = read_micro_data(in, DataColumns{});
  REQUIRE(table.cells.size() == 1);
  const Cell& c = table.cells[0];
  CHECK(c.id == "a");
  CHECK(c.p1 == 0.5);
  CHECK(c.weight == 1.0);
  CHECK(c.treated == sbtest::fixture_cell().treated);
  CHECK(c.control == sbtest::fixture_cell().control);

  std::istringstream bad("y,x,w\n0,2,a\n1,1,a\n");
  CHECK_THROWS_WITH(read_micro_data(bad, DataColumns{}), ContainsSubstring("non-binary treatment"));

  std::istringstream missing("y,x,w\n0,1,a\n1,1,a\n0,0,a\n1,0,a\n3,1,b\n");
  const Config cfg;
  try {
    assemble(cfg, read_micro_data(missing, DataColumns{}));
    FAIL("expected an overlap error");
  } catch (const OverlapError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("b"));
  }

  Config drop;
  drop.drop_nonoverlap = true;
  std::istringstream again("y,x,w\n0,1,a\n1,1,a\n0,0,a\n1,0,a\n3,1,b\n");
  const Problem p = assemble(drop, read_micro_data(again, DataColumns{}));
  REQUIRE(p.cells.size() == 1);
  CHECK(p.cells[0].weight == 1.0);
  CHECK(p.dropped_cells == std::vector<std::string>{"b"});
}

TEST_CASE("configuration parsing") {
  const auto cfg = Config::parse(
      R"({"sensitivity": {"model": "msm", "lambdas": "1:2:0.5"},
          "estimands": ["ate", {"name": "qte", "tau": 0.25}],
          "breakdown": [{"estimand": "ate", "target": 0.1}]})");
  CHECK(cfg.sensitivity.lambdas == std::vector<double>{1.0, 1.5, 2.0});
  REQUIRE(cfg.estimands.size() == 2);
  CHECK(cfg.estimands[1].tau == 0.25);
  CHECK(cfg.breakdowns.size() == 1);
  CHECK(Config::parse(cfg.dump()).dump() == cfg.dump());
  CHECK_THROWS_AS(Config::parse(R"({"estimand": ["ate"]})"), InputError);
  CHECK_THROWS_AS(Config::parse(R"({"estimands": ["late"]})"), InputError);
  CHECK_THROWS_AS(parse_grid("2:1:0.5"), InputError);
}

TEST_CASE("runs on the fixture") {
  auto p = fixture_problem(R"({"estimands": ["ate"]})");
  auto rep = run(p, 1);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].interval.lo == 0.0);
  CHECK(rep.rows[0].interval.hi == 0.0);

  p = fixture_problem(R"({"sensitivity": {"lambdas": [1, 2]}, "estimands": ["ate"]})");
  rep = run(p, 2);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].interval.width() == 0.0);
  // Lambda = 2 is (c_lo, c_hi) = (1/3, 2/3) on this cell.
  const Cell& c = p.cells[0];
  const auto env = compute_envelopes(c, {1.0 / 3.0, 2.0 / 3.0});
  const auto direct = cate_bounds(c, env);
  CHECK_THAT(rep.rows[1].interval.lo, WithinAbs(direct.lo, 1e-15));
  CHECK_THAT(rep.rows[1].interval.hi, WithinAbs(direct.hi, 1e-15));
  CHECK_THAT(direct.hi, WithinAbs(0.25, 1e-15));

  p = fixture_problem(R"({"estimands": []})");
  rep = run(p, 1);
  CHECK(rep.rows.empty());
  std::ostringstream csv;
  write_csv(csv, rep);
  CHECK_THAT(csv.str(), ContainsSubstring("# sensbounds "));
}

TEST_CASE("breakdown values") {
  const auto p = fixture_problem(R"({"estimands": ["ate"]})");
  CHECK(breakdown(p, p.estimands[0], 0.0, 10.0) == 1.0);
  CHECK_FALSE(breakdown(p, p.estimands[0], 5.0, 10.0).has_value());
  EstimandRequest dte{Estimand::dte};
  CHECK_THROWS_AS(breakdown(p, dte, 0.5, 10.0), InputError);

  // Point-identified ATE of 0.3 at lambda = 1.
  std::istringstream in("y,x,w\n0,1,a\n1,1,a\n1,1,a\n1,1,a\n1,1,a\n0,0,a\n1,0,a\n");
  Config cfg = Config::parse(R"({"estimands": ["ate"]})");
  Problem q = assemble(cfg, read_micro_data(in, cfg.columns));
  const auto point = evaluate_msm(q, q.estimands[0], 1.0);
  CHECK_THAT(point.lo, WithinAbs(0.3, 1e-12));
  const auto star = breakdown(q, q.estimands[0], 0.0, 10.0);
  REQUIRE(star.has_value());
  CHECK(*star > 1.0);
  // Containment flips across the reported value.
  q.sensitivity.lambdas = {*star - 1e-4, *star + 1e-4};
  const auto rep = run(q, 1);
  REQUIRE(rep.rows.size() == 2);
  CHECK_FALSE(rep.rows[0].interval.contains(0.0));
  CHECK(rep.rows[1].interval.contains(0.0));
}

TEST_CASE("reports are deterministic across thread counts") {
  sbtest::Rng rng(8);
  std::istringstream in(random_micro_data(rng, 60));
  const Config cfg = Config::parse(
      R"({"sensitivity": {"lambdas": "1:3:0.5"},
          "estimands": ["ate", "att", "qte", "qtt", "qcate", "aww", "dte", "qdte",
                        {"name": "joint_cdf", "y1": 1, "y0": 1}]})");
  const Problem p = assemble(cfg, read_micro_data(in, cfg.columns));
  std::ostringstream a, b;
  write_csv(a, run(p, 1));
  write_csv(b, run(p, 4));
  CHECK(a.str() == b.str());
}

TEST_CASE("intervals nest along the lambda grid") {
  sbtest::Rng rng(12);
  std::istringstream in(random_micro_data(rng, 80));
  const Config cfg = Config::parse(
      R"({"sensitivity": {"lambdas": [1, 1.5, 2, 4]},
          "estimands": ["ate", "att", "qte", "qtt", "qcate", "aww"]})");
  const Problem p = assemble(cfg, read_micro_data(in, cfg.columns));
  const auto rep = run(p, 1);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& prev = rep.rows[i - 1];
    const auto& cur = rep.rows[i];
    if (prev.request_index != cur.request_index || prev.estimand != cur.estimand) continue;
    CHECK(cur.interval.contains(prev.interval, 1e-12));
  }
}

TEST_CASE("micro-data and cell-summary ingestion agree") {
  sbtest::Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const std::string micro = random_micro_data(rng, 50);
    std::istringstream in(micro);
    const Config cfg = Config::parse(
        R"({"sensitivity": {"lambdas": [1, 2]}, "estimands": ["ate", "qte", "dte", "att"]})");
    const auto table = read_micro_data(in, cfg.columns);
    std::stringstream summary;
    write_cell_summary(summary, table.cells);
    const auto back = read_cell_summary(summary);
    REQUIRE(back.cells.size() == table.cells.size());
    for (std::size_t i = 0; i < back.cells.size(); ++i) {
      CHECK(back.cells[i].treated == table.cells[i].treated);
      CHECK(back.cells[i].control == table.cells[i].control);
      CHECK(back.cells[i].p1 == table.cells[i].p1);
      CHECK(back.cells[i].weight == table.cells[i].weight);
    }
    const auto r1 = run(assemble(cfg, table), 1);
    const auto r2 = run(assemble(cfg, back), 1);
    REQUIRE(r1.rows.size() == r2.rows.size());
    for (std::size_t i = 0; i < r1.rows.size(); ++i) {
      CHECK(r1.rows[i].interval.lo == r2.rows[i].interval.lo);
      CHECK(r1.rows[i].interval.hi == r2.rows[i].interval.hi);
    }
  }
}

TEST_CASE("command-line interface") {
  const auto data = write_file("fixture.csv", kFixtureCsv);
  const auto out1 = scratch_dir() / "r1.csv";
  const auto out2 = scratch_dir() / "r2.csv";
  const std::string args = "bounds --data \"" + data.string() +
                           "\" --grid 1:2:0.5 --estimand ate --estimand qte --out ";
  REQUIRE(run_cli(args + "\"" + out1.string() + "\"") == 0);
  REQUIRE(run_cli(args + "\"" + out2.string() + "\"") == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK_THAT(slurp(out1), ContainsSubstring("estimand,params,point"));

  const auto bad = write_file("bad.csv", "y,x,w\n0,2,a\n1,1,a\n");
  CHECK(run_cli("bounds --data \"" + bad.string() + "\" --estimand ate") == 2);
  CHECK_THAT(slurp(scratch_dir() / "stderr.txt"), ContainsSubstring("non-binary treatment"));

  const auto lonely = write_file("lonely.csv", "y,x,w\n0,1,a\n1,1,a\n0,0,a\n1,0,a\n3,1,b\n");
  CHECK(run_cli("bounds --data \"" + lonely.string() + "\" --estimand ate") == 3);
  CHECK(run_cli("bounds --data \"" + lonely.string() + "\" --estimand ate --drop-nonoverlap") == 0);

  CHECK(run_cli("bounds --estimand ate") == 2);
  CHECK(run_cli("convert --p1 0.5 --lambda 2") == 0);
  CHECK_THAT(slurp(scratch_dir() / "stdout.txt"), ContainsSubstring("0.333333333333"));
  CHECK(run_cli("breakdown --data \"" + data.string() + "\" --estimand ate") == 0);
  CHECK(run_cli("oracle-check --data \"" + data.string() + "\" --resolution 50") == 0);

  // Cell-summary input reproduces the micro-data rows.
  const auto cells = scratch_dir() / "cells.csv";
  REQUIRE(run_cli(args + "\"" + out1.string() + "\" --write-cells \"" + cells.string() + "\"") == 0);
  const auto out3 = scratch_dir() / "r3.csv";
  REQUIRE(run_cli("bounds --cells \"" + cells.string() +
                  "\" --grid 1:2:0.5 --estimand ate --estimand qte --out \"" + out3.string() +
                  "\"") == 0);
  auto body = [](const std::string& text) {
    std::string rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
      if (!line.empty() && line[0] != '#') rows += line + '\n';
    return rows;
  };
  CHECK(body(slurp(out1)) == body(slurp(out3)));
}
