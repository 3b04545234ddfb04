// prinest: principal nests of real quadratic maps from the command line.
//
// Exit codes: 0 ok, 1 internal error, 2 configuration, 3 I/O, 4 non-recurrent,
// 5 renormalizable, 6 precision exhausted, 7 not realized.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "prinest/io.hpp"

using namespace prinest;

namespace {

void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty())
    std::cout << text;
  else
    write_output(c.output, text);
}

void report_timings(const RunRecord& r) {
  for (const auto& [stage, sec] : r.timings) std::fprintf(stderr, "%s: %.3f s\n", stage.c_str(), sec);
}

int code(ExitCode e) { return static_cast<int>(e); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal nest analysis of f(x) = 1 - a + a x^2"};
  app.require_subcommand(1);

  RunConfig c;
  std::string format = "json";
  std::string range;
  auto common = [&](CLI::App* s) {
    s->add_option("--prec", c.precision_start, "starting precision in bits");
    s->add_option("--prec-max", c.precision_max, "precision ceiling in bits");
    s->add_option("--levels", c.max_levels, "levels beyond I^0 (search: levels verified)");
    s->add_option("--orbit-cap", c.orbit_cap, "critical orbit length cap");
    s->add_option("--return-cap", c.return_cap, "longest first-return itinerary followed");
    s->add_option("--delta", c.delta, "small-factor threshold");
    s->add_option("--out", c.output, "output file (default: stdout)");
    s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* nest = app.add_subcommand("nest", "build the nest and analyze every level");
  nest->add_option("--param", c.parameter, "decimal parameter a in (3/2, 2]")->required();
  common(nest);

  CLI::App* search = app.add_subcommand("search", "find a parameter with given combinatorics");
  search->add_option("--target", c.target, "fibonacci, cascade:N, or a target JSON file")->required();
  search->add_option("--digits", c.digits, "decimal digits of the result");
  common(search);

  CLI::App* sweep = app.add_subcommand("sweep", "nests over a parameter grid");
  sweep->add_option("--range", range, "lo,hi")->required();
  sweep->add_option("--grid", c.grid, "number of grid points (>= 2)")->required();
  common(sweep);

  CLI::App* analyze = app.add_subcommand("analyze", "rerun a saved run record and compare");
  analyze->add_option("--target", c.target, "run record JSON")->required();
  analyze->add_option("--out", c.output, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::Config);
  }
  c.format = format == "csv" ? Format::Csv : Format::Json;

  try {
    if (nest->parsed()) {
      RunRecord r = cmd_nest(c);
      emit(c, render(r, c.format));
      report_timings(r);
      for (const std::string& n : r.notes) std::fprintf(stderr, "note: %s\n", n.c_str());
      return code(exit_code(r.nest->termination));
    }
    if (search->parsed()) {
      RunRecord r = cmd_search(c);
      emit(c, render(r, c.format));
      report_timings(r);
      return 0;
    }
    if (sweep->parsed()) {
      auto comma = range.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::ConfigError, "--range expects lo,hi");
      c.range_lo = range.substr(0, comma);
      c.range_hi = range.substr(comma + 1);
      std::vector<SweepRow> rows = cmd_sweep(c);
      if (c.format == Format::Csv) {
        emit(c, sweep_csv(rows));
      } else {
        Json j{{"schema_version", kSchemaVersion}, {"version", kVersion}, {"config", to_json(c)}, {"rows", Json::array()}};
        for (const SweepRow& row : rows) j["rows"].push_back(to_json(row));
        emit(c, j.dump(2) + "\n");
      }
      return 0;
    }
    bool same = false;
    RunRecord r = cmd_analyze(c, &same);
    emit(c, render(r, Format::Json));
    std::fprintf(stderr, "reproduced: %s\n", same ? "yes" : "no");
    return same ? 0 : code(ExitCode::Internal);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return code(exit_code(e.code()));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return code(ExitCode::Internal);
  }
}
