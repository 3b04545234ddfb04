#include "prinest/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "prinest/error.hpp"

namespace prinest {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

Termination termination_from(std::string_view s) {
  for (Termination t : {Termination::None, Termination::NonRecurrent, Termination::Renormalizable,
                        Termination::PrecisionExhausted})
    if (to_string(t) == s) return t;
  config_error("unknown termination '" + std::string(s) + "'");
}

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

Json opt_bool(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string trim_zeros(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

long decimals_of(const std::string& s) {
  auto dot = s.find('.');
  return dot == std::string::npos ? 0 : static_cast<long>(s.size() - dot - 1);
}

NestOptions nest_options(const RunConfig& c) {
  NestOptions o;
  o.orbit_cap = c.orbit_cap;
  o.prec_max = c.precision_max;
  return o;
}

RenormOptions renorm_options(const RunConfig& c) {
  RenormOptions o;
  o.return_cap = c.return_cap;
  return o;
}

}  // namespace

ExitCode exit_code(Termination t) {
  switch (t) {
    case Termination::None: return ExitCode::Ok;
    case Termination::NonRecurrent: return ExitCode::NonRecurrent;
    case Termination::Renormalizable: return ExitCode::Renormalizable;
    case Termination::PrecisionExhausted: return ExitCode::PrecisionExhausted;
  }
  return ExitCode::Internal;
}

ExitCode exit_code(ErrorCode e) {
  switch (e) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::ParameterOutOfRange: return ExitCode::Config;
    case ErrorCode::IoError: return ExitCode::Io;
    case ErrorCode::PrecisionExhausted: return ExitCode::PrecisionExhausted;
    case ErrorCode::NotRealized: return ExitCode::NotRealized;
    default: return ExitCode::Internal;
  }
}

void RunConfig::validate() const {
  if (precision_start < 16) config_error("precision must be at least 16 bits");
  if (precision_start > precision_max) config_error("precision_start exceeds precision_max");
  if (max_levels < 1 || orbit_cap < 1 || return_cap < 1) config_error("caps must be at least 1");
  if (!(delta > 0 && delta < 1)) config_error("delta must lie in (0, 1)");
  if (digits < 1) config_error("digits must be positive");
}

NestSummary summarize(const Nest& nest) {
  NestSummary s;
  s.parameter = nest.map.parameter_text();
  s.prec_bits = nest.prec().bits;
  s.termination = nest.termination();
  for (const NestLevel& L : nest.levels) s.levels.push_back({L.n, L.r, L.central, L.T.lo(), L.T.hi(), L.terminated_by});
  return s;
}

// ---------------------------------------------------------------- JSON

Json to_json(const BigScalar& x) { return Json{{"value", x.to_string()}, {"prec_bits", x.prec().bits}}; }

BigScalar big_from_json(const Json& j) {
  long bits = get<long>(j, "prec_bits");
  if (bits < 2) config_error("prec_bits must be at least 2");
  try {
    return BigScalar::parse(get<std::string>(j, "value"), Precision(bits));
  } catch (const Error& e) {
    config_error(e.what());
  }
}

Json to_json(const RInterval& x) { return Json{{"lo", to_json(x.lo())}, {"hi", to_json(x.hi())}}; }

RInterval interval_from_json(const Json& j) {
  try {
    return RInterval(big_from_json(field(j, "lo")), big_from_json(field(j, "hi")));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(e.what());
  }
}

Json to_json(const CombinatoricsRecord& k) {
  return Json{{"level", k.level},           {"branch_count", k.branch_count}, {"ordering", k.ordering},
              {"itineraries", k.itineraries}, {"depths", k.depths},             {"transit_times", k.transit_times}};
}

CombinatoricsRecord record_from_json(const Json& j) {
  CombinatoricsRecord k;
  k.level = get<long>(j, "level");
  k.branch_count = get<long>(j, "branch_count");
  k.ordering = get<std::vector<int>>(j, "ordering");
  k.itineraries = get<std::vector<std::vector<int>>>(j, "itineraries");
  k.depths = get<std::vector<long>>(j, "depths");
  k.transit_times = j.contains("transit_times") ? get<std::vector<long>>(j, "transit_times") : std::vector<long>{};
  return k;
}

std::vector<CombinatoricsRecord> records_from_json(const Json& j) {
  const Json& arr = j.is_object() ? field(j, "records") : j;
  if (!arr.is_array()) config_error("records must be an array");
  std::vector<CombinatoricsRecord> out;
  for (const Json& r : arr) out.push_back(record_from_json(r));
  return out;
}

Json to_json(const GeometryReport& g) {
  Json levels = Json::array();
  for (const LevelGeometry& L : g.levels) {
    Json p = nullptr;
    if (L.pieces)
      p = Json{{"c_geo", L.pieces->c_geo}, {"extension_margin", L.pieces->extension_margin}, {"pieces", L.pieces->pieces}};
    levels.push_back(Json{{"level", L.level}, {"lambda", to_json(L.lambda)}, {"central", L.central}, {"pieces", p}});
  }
  Json lam = Json::array();
  for (const BigScalar& x : g.noncentral_lambdas) lam.push_back(to_json(x));
  Json decay = nullptr;
  if (g.decay)
    decay = Json{{"C", g.decay->C},
                 {"rho", g.decay->rho},
                 {"residual", g.decay->residual},
                 {"points", g.decay->points},
                 {"accepted", g.decay->accepted}};
  Json trig = nullptr;
  if (g.trigger) trig = Json{{"N", g.trigger->N}, {"delta", g.trigger->delta}};
  return Json{{"delta", g.delta},
              {"indexing", g.indexing},
              {"levels", levels},
              {"noncentral_levels", g.noncentral_levels},
              {"noncentral_lambdas", lam},
              {"decay", decay},
              {"trigger", trig}};
}

GeometryReport geometry_from_json(const Json& j) {
  GeometryReport g;
  g.delta = get<double>(j, "delta");
  g.indexing = get<std::string>(j, "indexing");
  for (const Json& L : field(j, "levels")) {
    LevelGeometry lg;
    lg.level = get<long>(L, "level");
    lg.lambda = big_from_json(field(L, "lambda"));
    lg.central = get<bool>(L, "central");
    const Json& p = field(L, "pieces");
    if (!p.is_null())
      lg.pieces = PieceGeometry{get<double>(p, "c_geo"), get<double>(p, "extension_margin"), get<long>(p, "pieces")};
    g.levels.push_back(std::move(lg));
  }
  g.noncentral_levels = get<std::vector<long>>(j, "noncentral_levels");
  for (const Json& x : field(j, "noncentral_lambdas")) g.noncentral_lambdas.push_back(big_from_json(x));
  const Json& d = field(j, "decay");
  if (!d.is_null())
    g.decay = DecayFit{get<double>(d, "C"), get<double>(d, "rho"), get<double>(d, "residual"), get<long>(d, "points"),
                       get<bool>(d, "accepted")};
  const Json& t = field(j, "trigger");
  if (!t.is_null()) g.trigger = Trigger{get<long>(t, "N"), get<double>(t, "delta")};
  return g;
}

Json to_json(const ParabolicProximity& p) {
  return Json{{"level", p.level},
              {"cascade_length", p.cascade_length},
              {"kind", std::string(to_string(p.kind))},
              {"fixed_point", to_json(p.fixed_point)},
              {"multiplier", to_json(p.multiplier)},
              {"multiplier_fd", to_json(p.multiplier_fd)},
              {"gap", to_json(p.gap)},
              {"inside_level", p.inside_level},
              {"low_return", p.low_return}};
}

ParabolicProximity parabolic_from_json(const Json& j) {
  ParabolicProximity p;
  p.level = get<long>(j, "level");
  p.cascade_length = get<long>(j, "cascade_length");
  std::string kind = get<std::string>(j, "kind");
  if (kind == "fixed")
    p.kind = ParabolicProximity::Kind::Fixed;
  else if (kind == "ghost")
    p.kind = ParabolicProximity::Kind::Ghost;
  else
    config_error("unknown parabolic kind '" + kind + "'");
  p.fixed_point = big_from_json(field(j, "fixed_point"));
  p.multiplier = big_from_json(field(j, "multiplier"));
  p.multiplier_fd = big_from_json(field(j, "multiplier_fd"));
  p.gap = big_from_json(field(j, "gap"));
  p.inside_level = get<bool>(j, "inside_level");
  p.low_return = get<bool>(j, "low_return");
  return p;
}

Json to_json(const NestSummary& s) {
  Json levels = Json::array();
  for (const LevelSummary& L : s.levels)
    levels.push_back(Json{{"n", L.n},
                          {"r", L.r},
                          {"central", opt_bool(L.central)},
                          {"lo", to_json(L.lo)},
                          {"hi", to_json(L.hi)},
                          {"terminated_by", std::string(to_string(L.terminated_by))}});
  return Json{{"parameter", s.parameter},
              {"prec_bits", s.prec_bits},
              {"depth", static_cast<long>(s.levels.size()) - 1},
              {"termination", std::string(to_string(s.termination))},
              {"levels", levels}};
}

NestSummary nest_summary_from_json(const Json& j) {
  NestSummary s;
  s.parameter = get<std::string>(j, "parameter");
  s.prec_bits = get<long>(j, "prec_bits");
  s.termination = termination_from(get<std::string>(j, "termination"));
  for (const Json& L : field(j, "levels")) {
    LevelSummary ls;
    ls.n = get<long>(L, "n");
    ls.r = get<long>(L, "r");
    const Json& c = field(L, "central");
    if (!c.is_null()) ls.central = c.get<bool>();
    ls.lo = big_from_json(field(L, "lo"));
    ls.hi = big_from_json(field(L, "hi"));
    ls.terminated_by = termination_from(get<std::string>(L, "terminated_by"));
    s.levels.push_back(std::move(ls));
  }
  return s;
}

Json to_json(const RunConfig& c) {
  return Json{{"parameter", c.parameter},
              {"target", c.target},
              {"precision_start", c.precision_start},
              {"precision_max", c.precision_max},
              {"max_levels", c.max_levels},
              {"orbit_cap", c.orbit_cap},
              {"return_cap", c.return_cap},
              {"delta", c.delta},
              {"output", c.output},
              {"format", c.format == Format::Json ? "json" : "csv"},
              {"digits", c.digits},
              {"range", Json::array({c.range_lo, c.range_hi})},
              {"grid", c.grid}};
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  c.parameter = get<std::string>(j, "parameter");
  c.target = get<std::string>(j, "target");
  c.precision_start = get<long>(j, "precision_start");
  c.precision_max = get<long>(j, "precision_max");
  c.max_levels = get<long>(j, "max_levels");
  c.orbit_cap = get<long>(j, "orbit_cap");
  c.return_cap = get<long>(j, "return_cap");
  c.delta = get<double>(j, "delta");
  c.output = get<std::string>(j, "output");
  std::string f = get<std::string>(j, "format");
  if (f != "json" && f != "csv") config_error("format must be json or csv");
  c.format = f == "json" ? Format::Json : Format::Csv;
  c.digits = get<long>(j, "digits");
  auto range = get<std::vector<std::string>>(j, "range");
  if (range.size() != 2) config_error("range must have two entries");
  c.range_lo = range[0];
  c.range_hi = range[1];
  c.grid = get<long>(j, "grid");
  return c;
}

Json to_json(const RunRecord& r) {
  Json j{{"schema_version", kSchemaVersion}, {"command", r.command}, {"version", r.version}, {"config", to_json(r.config)}};
  j["nest"] = r.nest ? to_json(*r.nest) : Json(nullptr);
  Json recs = Json::array();
  for (const CombinatoricsRecord& k : r.records) recs.push_back(to_json(k));
  j["records"] = recs;
  j["geometry"] = r.geometry ? to_json(*r.geometry) : Json(nullptr);
  Json pp = Json::array();
  for (const ParabolicProximity& p : r.parabolic) pp.push_back(to_json(p));
  j["parabolic"] = pp;
  if (r.search) {
    const SearchOutcome& s = *r.search;
    j["search"] = Json{{"parameter", s.parameter},   {"digits", s.digits},           {"levels_matched", s.levels_matched},
                       {"steps", s.steps},           {"bracket", Json::array({s.bracket_lo, s.bracket_hi})},
                       {"cascade_length", s.cascade_length}, {"admissibility", s.admissibility}};
  } else {
    j["search"] = nullptr;
  }
  j["notes"] = r.notes;
  return j;
}

RunRecord run_record_from_json(const Json& j) {
  if (!j.is_object()) config_error("run record must be a JSON object");
  long v = get<long>(j, "schema_version");
  if (v != kSchemaVersion) config_error("unsupported schema_version " + std::to_string(v));
  RunRecord r;
  r.command = get<std::string>(j, "command");
  r.version = get<std::string>(j, "version");
  r.config = config_from_json(field(j, "config"));
  if (!field(j, "nest").is_null()) r.nest = nest_summary_from_json(j.at("nest"));
  r.records = records_from_json(field(j, "records"));
  if (!field(j, "geometry").is_null()) r.geometry = geometry_from_json(j.at("geometry"));
  for (const Json& p : field(j, "parabolic")) r.parabolic.push_back(parabolic_from_json(p));
  const Json& s = field(j, "search");
  if (!s.is_null()) {
    SearchOutcome o;
    o.parameter = get<std::string>(s, "parameter");
    o.digits = get<long>(s, "digits");
    o.levels_matched = get<long>(s, "levels_matched");
    o.steps = get<long>(s, "steps");
    auto b = get<std::vector<std::string>>(s, "bracket");
    if (b.size() != 2) config_error("bracket must have two entries");
    o.bracket_lo = b[0];
    o.bracket_hi = b[1];
    o.cascade_length = get<long>(s, "cascade_length");
    o.admissibility = get<std::string>(s, "admissibility");
    r.search = std::move(o);
  }
  r.notes = get<std::vector<std::string>>(j, "notes");
  return r;
}

Json to_json(const SweepRow& r) {
  return Json{{"a", r.a},
              {"depth", r.depth},
              {"termination", r.termination},
              {"trigger_n", r.trigger_n ? Json(*r.trigger_n) : Json(nullptr)},
              {"rho", r.rho ? Json(*r.rho) : Json(nullptr)},
              {"error", r.error}};
}

SweepRow sweep_row_from_json(const Json& j) {
  SweepRow r;
  r.a = get<std::string>(j, "a");
  r.depth = get<long>(j, "depth");
  r.termination = get<std::string>(j, "termination");
  if (!field(j, "trigger_n").is_null()) r.trigger_n = get<long>(j, "trigger_n");
  if (!field(j, "rho").is_null()) r.rho = get<double>(j, "rho");
  r.error = get<std::string>(j, "error");
  return r;
}

// ---------------------------------------------------------------- CSV

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::vector<std::vector<std::string>> csv_parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cur;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
      continue;
    }
    if (ch == '"') {
      if (!cur.empty()) config_error("quote inside an unquoted CSV field");
      quoted = any = true;
    } else if (ch == ',') {
      row.push_back(std::move(cur));
      cur.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cur));
      cur.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cur += ch;
      any = true;
    }
  }
  if (quoted) config_error("unterminated quoted CSV field");
  if (any || !cur.empty() || !row.empty()) {
    row.push_back(std::move(cur));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out + "\r\n";
}

std::vector<std::vector<std::string>> csv_table(const std::string& text, const std::vector<std::string>& header) {
  auto rows = csv_parse(text);
  if (rows.empty() || rows.front() != header) config_error("unexpected CSV header");
  rows.erase(rows.begin());
  for (const auto& r : rows)
    if (r.size() != header.size()) config_error("CSV row with " + std::to_string(r.size()) + " fields");
  return rows;
}

long to_long(const std::string& s) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    config_error("not an integer: '" + s + "'");
  }
}

std::string double_text(double x) {
  // Shortest round-trip form, shared with the JSON encoder.
  return Json(x).dump();
}

double to_double(const std::string& s) {
  try {
    return Json::parse(s).get<double>();
  } catch (const std::exception&) {
    config_error("not a number: '" + s + "'");
  }
}

const std::vector<std::string> kSweepHeader{"a", "depth", "termination", "trigger_n", "rho", "error"};
const std::vector<std::string> kLevelHeader{"n",       "r",           "central",      "lo",
                                            "lo_bits", "hi",          "hi_bits",      "nest_prec_bits",
                                            "terminated_by"};

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = csv_line(kSweepHeader);
  for (const SweepRow& r : rows)
    out += csv_line({r.a, std::to_string(r.depth), r.termination, r.trigger_n ? std::to_string(*r.trigger_n) : "",
                     r.rho ? double_text(*r.rho) : "", r.error});
  return out;
}

std::vector<SweepRow> sweep_from_csv(const std::string& text) {
  std::vector<SweepRow> out;
  for (const auto& f : csv_table(text, kSweepHeader)) {
    SweepRow r;
    r.a = f[0];
    r.depth = to_long(f[1]);
    r.termination = f[2];
    if (!f[3].empty()) r.trigger_n = to_long(f[3]);
    if (!f[4].empty()) r.rho = to_double(f[4]);
    r.error = f[5];
    out.push_back(std::move(r));
  }
  return out;
}

std::string levels_csv(const NestSummary& s) {
  std::string out = csv_line(kLevelHeader);
  for (const LevelSummary& L : s.levels)
    out += csv_line({std::to_string(L.n), std::to_string(L.r), L.central ? (*L.central ? "true" : "false") : "",
                     L.lo.to_string(), std::to_string(L.lo.prec().bits), L.hi.to_string(),
                     std::to_string(L.hi.prec().bits), std::to_string(s.prec_bits), std::string(to_string(L.terminated_by))});
  return out;
}

NestSummary levels_from_csv(const std::string& text, const std::string& parameter) {
  NestSummary s;
  s.parameter = parameter;
  for (const auto& f : csv_table(text, kLevelHeader)) {
    LevelSummary L;
    L.n = to_long(f[0]);
    L.r = to_long(f[1]);
    if (f[2] == "true")
      L.central = true;
    else if (f[2] == "false")
      L.central = false;
    else if (!f[2].empty())
      config_error("central must be true, false or empty");
    try {
      L.lo = BigScalar::parse(f[3], Precision(to_long(f[4])));
      L.hi = BigScalar::parse(f[5], Precision(to_long(f[6])));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error(e.what());
    }
    s.prec_bits = to_long(f[7]);
    L.terminated_by = termination_from(f[8]);
    s.levels.push_back(std::move(L));
  }
  if (!s.levels.empty()) s.termination = s.levels.back().terminated_by;
  return s;
}

// ---------------------------------------------------------------- files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::string render(const RunRecord& r, Format f) {
  if (f == Format::Json) return to_json(r).dump(2) + "\n";
  if (r.nest) return levels_csv(*r.nest);
  std::string out = csv_line({"parameter", "digits", "levels_matched", "steps", "cascade_length"});
  if (r.search)
    out += csv_line({r.search->parameter, std::to_string(r.search->digits), std::to_string(r.search->levels_matched),
                     std::to_string(r.search->steps), std::to_string(r.search->cascade_length)});
  return out;
}

unsigned worker_count() {
  if (const char* env = std::getenv("PRINEST_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- commands

SearchTarget load_target(const RunConfig& c, long* cascade_min_length) {
  if (cascade_min_length) *cascade_min_length = 0;
  const std::string& t = c.target;
  if (t.empty()) config_error("search needs a target");
  if (t == "fibonacci") return SearchTarget::named(t, c.max_levels);
  if (t.rfind("cascade:", 0) == 0) {
    long n = to_long(t.substr(8));
    if (n < 1) config_error("cascade length must be positive");
    if (cascade_min_length) *cascade_min_length = n;
    return SearchTarget::named(t, c.max_levels);
  }
  std::string text = read_file(t);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error("target " + t + ": " + e.what());
  }
  if (j.is_string()) {
    RunConfig named = c;
    named.target = j.get<std::string>();
    if (named.target == t) config_error("target file names itself");
    return load_target(named, cascade_min_length);
  }
  if (j.is_object() && j.contains("kneading_prefix")) return SearchTarget::kneading_prefix(get<std::string>(j, "kneading_prefix"));
  if (j.is_object() && j.contains("kneading_map")) {
    const Json& q = j.at("kneading_map");
    KneadingMap m{get<std::vector<long>>(q, "prefix"), get<long>(q, "tail")};
    return SearchTarget::kneading_map(std::move(m), j.contains("depth") ? get<long>(j, "depth") : c.max_levels);
  }
  auto recs = records_from_json(j);
  if (recs.empty()) config_error("target has no records");
  return SearchTarget::explicit_records(std::move(recs));
}

RunRecord cmd_nest(const RunConfig& c) {
  c.validate();
  if (c.parameter.empty()) config_error("nest needs --param");
  RunRecord rec;
  rec.command = "nest";
  rec.config = c;
  auto t0 = std::chrono::steady_clock::now();
  Nest nest = build_nest(make_map(c.parameter, Precision(c.precision_start)), c.max_levels, c.orbit_cap, nest_options(c));
  rec.nest = summarize(nest);
  rec.timings["nest"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const RenormOptions ro = renorm_options(c);
  std::vector<std::vector<Branch>> branches;
  for (long n = 1; n <= nest.depth(); ++n) {
    try {
      if (n == nest.depth()) {
        branches.push_back(return_map_domains(nest, n, ro));
        continue;
      }
      LevelAnalysis an = analyze_level(nest, n, ro);
      branches.push_back(an.branches);
      rec.records.push_back(to_record(an));
    } catch (const Error& e) {
      branches.emplace_back();
      rec.notes.push_back("level " + std::to_string(n) + ": " + e.what());
    }
  }
  rec.timings["combinatorics"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  GeometryOptions go;
  go.delta = c.delta;
  go.renorm = ro;
  rec.geometry = geometry_report(nest, branches, go);
  for (long n = 1; n <= nest.depth(); ++n) {
    if (!nest.levels[static_cast<std::size_t>(n)].central.value_or(false)) continue;
    try {
      rec.parabolic.push_back(parabolic_proximity(nest, n));
    } catch (const Error& e) {
      rec.notes.push_back("parabolic level " + std::to_string(n) + ": " + e.what());
    }
  }
  rec.timings["geometry"] = seconds_since(t0);
  return rec;
}

RunRecord cmd_search(const RunConfig& c) {
  c.validate();
  RunRecord rec;
  rec.command = "search";
  rec.config = c;
  auto t0 = std::chrono::steady_clock::now();
  long cascade = 0;
  SearchTarget target = load_target(c, &cascade);
  SearchOptions so;
  so.nest = nest_options(c);
  so.renorm = renorm_options(c);
  SearchOutcome out;
  out.digits = c.digits;
  if (cascade > 0) {
    CascadeSearch cs;
    cs.min_length = cascade;
    CascadeResult r = search_cascade(cs, c.digits, so);
    out.parameter = r.parameter;
    out.steps = r.steps;
    out.cascade_length = r.cascade_length;
    out.bracket_lo = cs.lo;
    out.bracket_hi = cs.hi;
    out.admissibility = "cascade target";
  } else {
    SearchResult r = search_parameter(target, c.digits, so);
    out.parameter = r.parameter;
    out.levels_matched = r.levels_matched;
    out.steps = static_cast<long>(r.steps.size());
    out.bracket_lo = r.bracket_lo;
    out.bracket_hi = r.bracket_hi;
    out.admissibility = target.kind == SearchTarget::Kind::ExplicitRecords
                            ? "records checked for label permutation, central depth 0 and itineraries returning through label 0"
                            : "kneading target";
    rec.records = std::move(r.records);
  }
  rec.search = std::move(out);
  rec.timings["search"] = seconds_since(t0);
  return rec;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& c) {
  c.validate();
  if (c.grid < 2) config_error("grid must be at least 2");
  if (c.range_lo.empty() || c.range_hi.empty()) config_error("sweep needs --range lo,hi");
  Precision p(256);
  BigScalar lo, hi;
  try {
    lo = BigScalar::parse(c.range_lo, p);
    hi = BigScalar::parse(c.range_hi, p);
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (!(lo < hi)) config_error("empty range");
  if (!(lo > BigScalar::parse("1.5", p)) || hi > BigScalar(2L, p)) config_error("range must lie in (3/2, 2]");

  const long decimals =
      std::max(decimals_of(c.range_lo), decimals_of(c.range_hi)) + static_cast<long>(std::ceil(std::log10(c.grid))) + 1;
  std::vector<std::string> points;
  for (long i = 0; i < c.grid; ++i) {
    BigScalar a = lo + (hi - lo) * BigScalar(i, p) / BigScalar(c.grid - 1, p);
    points.push_back(trim_zeros(a.to_fixed(static_cast<int>(decimals))));
  }

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      SweepRow& row = rows[i];
      row.a = points[i];
      try {
        Nest nest = build_nest(make_map(row.a, Precision(c.precision_start)), c.max_levels, c.orbit_cap, nest_options(c));
        row.depth = nest.depth();
        row.termination = std::string(to_string(nest.termination()));
        std::vector<BigScalar> lambdas = scaling_factors(nest);
        if (auto t = small_factor_trigger(lambdas, c.delta)) row.trigger_n = t->N;
        std::vector<BigScalar> nc;
        for (long n : noncentral_levels(nest))
          if (n + 1 <= nest.depth()) nc.push_back(lambdas[static_cast<std::size_t>(n)]);
        if (nc.size() >= 4) row.rho = decay_fit(nc).rho;
      } catch (const Error& e) {
        row.error = e.what();
      } catch (const std::exception& e) {
        row.error = std::string("internal: ") + e.what();
      }
    }
  };
  unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(points.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return rows;
}

RunRecord cmd_analyze(const RunConfig& c, bool* reproduced) {
  if (c.target.empty()) config_error("analyze needs a run record (--target)");
  Json j;
  try {
    j = Json::parse(read_file(c.target));
  } catch (const nlohmann::json::parse_error& e) {
    config_error(c.target + ": " + e.what());
  }
  RunRecord old = run_record_from_json(j);
  RunRecord now;
  if (old.command == "nest")
    now = cmd_nest(old.config);
  else if (old.command == "search")
    now = cmd_search(old.config);
  else
    config_error("cannot rerun a '" + old.command + "' record");
  if (reproduced) *reproduced = to_json(now).dump() == to_json(old).dump();
  return now;
}

}  // namespace prinest
