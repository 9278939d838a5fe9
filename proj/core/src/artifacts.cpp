#include "blowlab/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "blowlab/errors.hpp"

namespace blowlab {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.good()) throw Error("short write on " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

// Tiny ordered JSON emitter; nlohmann is used only for reading. Keeps key
// order and float formatting fully pinned for byte-identical artifacts.
class JsonOut {
public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array(const std::string& key) { key_(key); open('['); }
  void begin_object_in_array() { sep(); open('{'); }
  void end_array() { close(']'); }

  void field(const std::string& key, double v) { key_(key); os_ << format_double(v); }
  void field(const std::string& key, long v) { key_(key); os_ << v; }
  void field(const std::string& key, int v) { key_(key); os_ << v; }
  void field(const std::string& key, bool v) { key_(key); os_ << (v ? "true" : "false"); }
  void field(const std::string& key, const std::string& v) {
    key_(key);
    os_ << '"' << json_escape(v) << '"';
  }
  void field_raw(const std::string& key, const std::string& raw) {
    key_(key);
    os_ << raw;
  }
  void array_number(double v) {
    sep();
    os_ << format_double(v);
  }
  void array_string(const std::string& v) {
    sep();
    os_ << '"' << json_escape(v) << '"';
  }

  std::string str() const { return os_.str() + "\n"; }

private:
  void key_(const std::string& key) {
    sep();
    os_ << '"' << json_escape(key) << "\":";
  }
  void open(char c) {
    os_ << c;
    first_ = true;
  }
  void close(char c) {
    os_ << c;
    first_ = false;
  }
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostringstream os_;
  bool first_ = true;
};

double parse_double_field(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::strtod(s.c_str(), nullptr);
  }
  return j.get<double>();
}

} // namespace

std::filesystem::path OutputLayout::snapshot(int index) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%05d.json", index);
  return snapshots_dir() / buf;
}

std::filesystem::path OutputLayout::frame(int index) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05d.json", index);
  return frames_dir() / buf;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(x)) return "\"nan\"";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_decimal(double x) {
  if (x == 0.0) return "0";
  const double ax = std::abs(x);
  int mag = static_cast<int>(std::floor(std::log10(ax)));
  int decimals = 16 - mag;
  if (decimals < 0) decimals = 0;
  if (decimals > 1060) decimals = 1060;
  char buf[1200];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap,
                    const RadialGrid& grid) {
  JsonOut j;
  j.begin_object();
  j.field("schema_version", 1);
  j.field("repr", std::string("phi_space"));
  j.field("t", format_decimal(snap.t));
  j.field("dt_since_prev", snap.dt_since_prev);
  j.field("step_index", snap.step_index);
  j.field("umax", snap.umax);
  j.field("phi_center", snap.phi_center);
  j.field_raw("grid", [&] {
    JsonOut g;
    g.begin_object();
    g.field("n", grid.n);
    g.field("R", grid.R);
    g.field("J", grid.J);
    g.end_object();
    std::string s = g.str();
    s.pop_back();
    return s;
  }());
  j.begin_array("phi");
  for (double v : snap.phi) j.array_number(v);
  j.end_array();
  j.end_object();
  write_text(path, j.str());
}

Snapshot read_snapshot(const std::filesystem::path& path, RadialGrid* grid_out) {
  const json j = json::parse(read_text(path));
  Snapshot s;
  s.t = std::strtod(j.at("t").get<std::string>().c_str(), nullptr);
  s.dt_since_prev = parse_double_field(j.at("dt_since_prev"));
  s.step_index = j.at("step_index").get<long>();
  s.umax = parse_double_field(j.at("umax"));
  s.phi_center = parse_double_field(j.at("phi_center"));
  for (const auto& v : j.at("phi")) s.phi.push_back(parse_double_field(v));
  if (grid_out) {
    const auto& g = j.at("grid");
    *grid_out = RadialGrid(g.at("n").get<int>(), g.at("R").get<double>(),
                           g.at("J").get<int>());
  }
  return s;
}

void write_frame(const std::filesystem::path& path, const SelfSimilarFrame& frame) {
  JsonOut j;
  j.begin_object();
  j.field("schema_version", 1);
  j.field("s", frame.s);
  j.field("alpha", frame.alpha);
  j.field("source_t", format_decimal(frame.source_t));
  j.field("n", frame.n);
  j.field("extent_truncated", frame.extent_truncated);
  j.begin_array("y");
  for (double v : frame.y) j.array_number(v);
  j.end_array();
  j.begin_array("v");
  for (double v : frame.v) j.array_number(v);
  j.end_array();
  j.end_object();
  write_text(path, j.str());
}

SelfSimilarFrame read_frame(const std::filesystem::path& path) {
  const json j = json::parse(read_text(path));
  SelfSimilarFrame f;
  f.s = parse_double_field(j.at("s"));
  f.alpha = parse_double_field(j.at("alpha"));
  f.source_t = std::strtod(j.at("source_t").get<std::string>().c_str(), nullptr);
  f.n = j.at("n").get<int>();
  f.extent_truncated = j.at("extent_truncated").get<bool>();
  for (const auto& v : j.at("y")) f.y.push_back(parse_double_field(v));
  for (const auto& v : j.at("v")) f.v.push_back(parse_double_field(v));
  return f;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  JsonOut j;
  j.begin_object();
  j.field("schema_version", 1);
  j.field("run_id", m.run_id);
  j.field("config_hash", m.config_hash);
  j.field_raw("code", [] {
    JsonOut c;
    c.begin_object();
    c.field("name", std::string("blowlab"));
    c.field("version", std::string("0.1.0"));
    c.end_object();
    std::string s = c.str();
    s.pop_back();
    return s;
  }());
  j.field("family", m.family);
  j.field("p", m.p);
  j.field("q", m.q);
  j.field_raw("grid", [&] {
    JsonOut g;
    g.begin_object();
    g.field("n", m.grid.n);
    g.field("R", m.grid.R);
    g.field("J", m.grid.J);
    g.end_object();
    std::string s = g.str();
    s.pop_back();
    return s;
  }());
  j.field("amplitude_used", m.amplitude_used);
  j.field("supersolution_verified", m.supersolution_verified);
  j.field("accepted_steps", m.accepted_steps);
  j.field("retried_steps", m.retried_steps);
  j.field_raw("estimate", [&] {
    JsonOut e;
    e.begin_object();
    e.field("T_est", m.estimate.T_est);
    e.field("log_gap_last", m.estimate.log_gap_last);
    e.field("method", m.estimate.method);
    e.field("uncertainty", m.estimate.uncertainty);
    e.field("monotone_warning", m.estimate.monotone_warning);
    e.begin_array("log_gap");
    for (double v : m.estimate.log_gap) e.array_number(v);
    e.end_array();
    e.end_object();
    std::string s = e.str();
    s.pop_back();
    return s;
  }());
  j.begin_array("snapshots");
  for (const auto& f : m.snapshot_files) j.array_string(f);
  j.end_array();
  j.begin_array("frames");
  for (const auto& f : m.frame_files) j.array_string(f);
  j.end_array();
  j.begin_array("ledgers");
  for (const auto& f : m.ledger_files) j.array_string(f);
  j.end_array();
  j.begin_array("warnings");
  for (const auto& w : m.warnings) j.array_string(w);
  j.end_array();
  j.end_object();
  write_text(path, j.str());
}

Manifest read_manifest(const std::filesystem::path& path) {
  const json j = json::parse(read_text(path));
  Manifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.family = j.at("family").get<std::string>();
  m.p = parse_double_field(j.at("p"));
  m.q = parse_double_field(j.at("q"));
  m.grid.n = j.at("grid").at("n").get<int>();
  m.grid.R = j.at("grid").at("R").get<double>();
  m.grid.J = j.at("grid").at("J").get<int>();
  m.amplitude_used = parse_double_field(j.at("amplitude_used"));
  m.supersolution_verified = j.at("supersolution_verified").get<bool>();
  m.accepted_steps = j.at("accepted_steps").get<long>();
  m.retried_steps = j.at("retried_steps").get<long>();
  m.estimate.T_est = parse_double_field(j.at("estimate").at("T_est"));
  m.estimate.log_gap_last = parse_double_field(j.at("estimate").at("log_gap_last"));
  m.estimate.method = j.at("estimate").at("method").get<std::string>();
  m.estimate.uncertainty = parse_double_field(j.at("estimate").at("uncertainty"));
  m.estimate.monotone_warning = j.at("estimate").at("monotone_warning").get<bool>();
  for (const auto& v : j.at("estimate").at("log_gap")) {
    m.estimate.log_gap.push_back(parse_double_field(v));
    m.estimate.s.push_back(-m.estimate.log_gap.back());
  }
  for (const auto& v : j.at("snapshots")) m.snapshot_files.push_back(v.get<std::string>());
  for (const auto& v : j.at("frames")) m.frame_files.push_back(v.get<std::string>());
  for (const auto& v : j.at("ledgers")) m.ledger_files.push_back(v.get<std::string>());
  for (const auto& v : j.at("warnings")) m.warnings.push_back(v.get<std::string>());
  return m;
}

void write_energy_ledger(const std::filesystem::path& path,
                         std::span<const EnergyRecord> records,
                         std::span<const IntervalLedgerEntry> intervals) {
  std::ostringstream os;
  os << "s,E,dirichlet_part,potential_part,H,G_boundary,vs_integral,"
        "h_second_term,interval_lhs,interval_rhs,interval_slack,interval_pass\n";
  for (size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    os << format_double(r.s) << ',' << format_double(r.E) << ','
       << format_double(r.dirichlet_part) << ',' << format_double(r.potential_part)
       << ',' << format_double(r.H) << ',' << format_double(r.G_boundary) << ','
       << format_double(r.vs_integral) << ',' << format_double(r.h_second_term);
    if (k < intervals.size()) {
      const auto& e = intervals[k];
      os << ',' << format_double(e.lhs) << ','
         << format_double(e.energy_drop + e.H_mid) << ',' << format_double(e.slack)
         << ',' << (e.pass ? 1 : 0);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  write_text(path, os.str());
}

void write_series_csv(const std::filesystem::path& path, const std::string& header,
                      std::span<const SeriesPoint> series) {
  std::ostringstream os;
  os << header << '\n';
  for (const auto& p : series) {
    os << format_double(p.s) << ',' << format_double(p.value) << '\n';
  }
  write_text(path, os.str());
}

void write_report_json(const std::filesystem::path& path,
                       const DiagnosticsReport& rep) {
  JsonOut j;
  j.begin_object();
  j.field("schema_version", 1);
  j.field("run_id", rep.run_id);
  j.field("config_hash", rep.config_hash);
  j.field("code_name", rep.code_name);
  j.field("code_version", rep.code_version);
  j.field("any_fail", rep.any_fail());
  j.begin_array("checks");
  for (const auto& c : rep.checks) {
    j.begin_object_in_array();
    j.field("name", c.name);
    j.field("claim", c.claim);
    j.field("statistic", c.statistic);
    j.field("threshold", c.threshold);
    j.field("verdict", verdict_name(c.verdict));
    j.field("notes", c.notes);
    j.end_object();
  }
  j.end_array();
  j.end_object();
  write_text(path, j.str());
}

void write_report_md(const std::filesystem::path& path,
                     const DiagnosticsReport& rep) {
  std::ostringstream os;
  os << "# Run report " << rep.run_id << "\n\n";
  os << "- code: " << rep.code_name << " " << rep.code_version << "\n";
  os << "- config hash: " << rep.config_hash << "\n";
  os << "- overall: " << (rep.any_fail() ? "FAIL" : "pass") << "\n\n";
  os << "| check | verdict | statistic | threshold | notes |\n";
  os << "|---|---|---|---|---|\n";
  for (const auto& c : rep.checks) {
    os << "| " << c.name << " | " << verdict_name(c.verdict) << " | "
       << format_double(c.statistic) << " | " << format_double(c.threshold)
       << " | " << c.notes << " |\n";
  }
  os << "\n";
  for (const auto& c : rep.checks) {
    os << "- **" << c.name << "**: " << c.claim << "\n";
  }
  write_text(path, os.str());
}

} // namespace blowlab
