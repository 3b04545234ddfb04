#pragma once

// Run configuration, run records, their JSON and CSV encodings, and the
// nest / search / sweep / analyze commands behind the command-line tool.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prinest/error.hpp"
#include "prinest/geometry.hpp"
#include "prinest/nest.hpp"
#include "prinest/param_search.hpp"
#include "prinest/renorm.hpp"

namespace prinest {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

enum class Format { Json, Csv };

/// Process exit codes.
enum class ExitCode : int {
  Ok = 0,
  Internal = 1,
  Config = 2,
  Io = 3,
  NonRecurrent = 4,
  Renormalizable = 5,
  PrecisionExhausted = 6,
  NotRealized = 7,
};

ExitCode exit_code(Termination t);
ExitCode exit_code(ErrorCode e);

struct RunConfig {
  std::string parameter;
  std::string target;  // named target or path to a target file
  long precision_start = 128;
  long precision_max = 4096;
  long max_levels = 16;
  long orbit_cap = 1'000'000;
  long return_cap = 10'000;  // longest first-return itinerary followed
  double delta = 0.01;
  std::string output;  // empty: stdout
  Format format = Format::Json;
  long digits = 60;
  std::string range_lo, range_hi;
  long grid = 0;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct LevelSummary {
  long n = 0;
  long r = 0;
  std::optional<bool> central;
  BigScalar lo, hi;
  Termination terminated_by = Termination::None;
  friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

struct NestSummary {
  std::string parameter;
  long prec_bits = 0;
  Termination termination = Termination::None;
  std::vector<LevelSummary> levels;  // level 0 first
  friend bool operator==(const NestSummary&, const NestSummary&) = default;
};

NestSummary summarize(const Nest& nest);

struct SearchOutcome {
  std::string parameter;
  long digits = 0;
  long levels_matched = 0;
  long steps = 0;
  std::string bracket_lo, bracket_hi;
  long cascade_length = 0;  // cascade targets only
  std::string admissibility;
  friend bool operator==(const SearchOutcome&, const SearchOutcome&) = default;
};

struct RunRecord {
  std::string command;
  std::string version = kVersion;
  RunConfig config;
  std::optional<NestSummary> nest;
  std::vector<CombinatoricsRecord> records;
  std::optional<GeometryReport> geometry;
  std::vector<ParabolicProximity> parabolic;
  std::optional<SearchOutcome> search;
  std::vector<std::string> notes;  // per-level failures that did not stop the run
  // Wall-clock seconds per stage; never serialized.
  std::map<std::string, double> timings;

  friend bool operator==(const RunRecord& a, const RunRecord& b) {
    return a.command == b.command && a.version == b.version && a.config == b.config && a.nest == b.nest &&
           a.records == b.records && a.geometry == b.geometry && a.parabolic == b.parabolic && a.search == b.search &&
           a.notes == b.notes;
  }
};

struct SweepRow {
  std::string a;
  long depth = 0;
  std::string termination;
  std::optional<long> trigger_n;
  std::optional<double> rho;
  std::string error;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// JSON. BigScalars are {"value": decimal, "prec_bits": n}.
Json to_json(const BigScalar& x);
BigScalar big_from_json(const Json& j);
Json to_json(const RInterval& x);
RInterval interval_from_json(const Json& j);
Json to_json(const CombinatoricsRecord& k);
CombinatoricsRecord record_from_json(const Json& j);
Json to_json(const GeometryReport& g);
GeometryReport geometry_from_json(const Json& j);
Json to_json(const ParabolicProximity& p);
ParabolicProximity parabolic_from_json(const Json& j);
Json to_json(const NestSummary& s);
NestSummary nest_summary_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);
Json to_json(const RunRecord& r);
/// Throws ConfigError on a malformed document or a schema_version mismatch.
RunRecord run_record_from_json(const Json& j);
Json to_json(const SweepRow& r);
SweepRow sweep_row_from_json(const Json& j);

/// Record list for search targets: an array of records, or {"records": [...]}.
std::vector<CombinatoricsRecord> records_from_json(const Json& j);

// RFC 4180.
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> csv_parse(const std::string& text);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& text);
/// One row per level: n, r, central, lo and hi with their precisions, the nest precision, termination.
std::string levels_csv(const NestSummary& s);
NestSummary levels_from_csv(const std::string& text, const std::string& parameter);

/// Target from a named string ("fibonacci", "cascade:N") or a JSON file. Throws ConfigError, IoError.
SearchTarget load_target(const RunConfig& c, long* cascade_min_length);

RunRecord cmd_nest(const RunConfig& c);
RunRecord cmd_search(const RunConfig& c);
std::vector<SweepRow> cmd_sweep(const RunConfig& c);
/// Reruns the config stored in a record file and compares the results.
RunRecord cmd_analyze(const RunConfig& c, bool* reproduced);

/// Worker count: PRINEST_WORKERS if set and positive, else the hardware thread count.
unsigned worker_count();

/// Text of the output file (JSON with trailing newline, or CSV).
std::string render(const RunRecord& r, Format f);
void write_output(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace prinest
