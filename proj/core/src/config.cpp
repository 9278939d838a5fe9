#include "blowlab/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "blowlab/errors.hpp"

namespace blowlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// key=value pairs keyed by "section.key". Values keep their raw text.
std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string path = section.empty() ? key : section + "." + key;
    if (out.count(path)) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + path + "'");
    }
    out[path] = value;
  }
  return out;
}

class Reader {
public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  double number(const std::string& path, double def) {
    auto it = kv_.find(path);
    if (it == kv_.end()) return def;
    used_.insert(it->first);
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config field '" + path + "': not a number: '" +
                        it->second + "'");
    }
  }

  long integer(const std::string& path, long def) {
    const double v = number(path, static_cast<double>(def));
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v) {
      throw ConfigError("config field '" + path + "': expected an integer");
    }
    return n;
  }

  bool boolean(const std::string& path, bool def) {
    auto it = kv_.find(path);
    if (it == kv_.end()) return def;
    used_.insert(it->first);
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ConfigError("config field '" + path + "': expected true or false");
  }

  std::string text(const std::string& path, std::string def) {
    auto it = kv_.find(path);
    if (it == kv_.end()) return def;
    used_.insert(it->first);
    return it->second;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) {
        throw ConfigError("config field '" + k + "': unknown key");
      }
    }
  }

private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

} // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xF);
  return os.str();
}

Nonlinearity RunConfig::nonlinearity() const {
  if (nl.family == "super_exponential") {
    return Nonlinearity::super_exponential(nl.p, nl.q);
  }
  if (nl.family == "pure_exponential_reference") {
    return Nonlinearity::pure_exponential();
  }
  if (nl.family == "power_reference") {
    return Nonlinearity::power(nl.p);
  }
  throw ConfigError("config field 'nl.family': unknown family '" + nl.family + "'");
}

RunConfig parse_config(const std::string& text) {
  Reader rd(parse_kv(text));
  RunConfig cfg;
  cfg.raw_text = text;
  cfg.config_hash = fnv1a_hex(text);

  cfg.nl.p = rd.number("nl.p", cfg.nl.p);
  cfg.nl.q = rd.number("nl.q", cfg.nl.q);
  cfg.nl.family = rd.text("nl.family", cfg.nl.family);

  cfg.grid.n = static_cast<int>(rd.integer("grid.n", cfg.grid.n));
  cfg.grid.R = rd.number("grid.R", cfg.grid.R);
  cfg.grid.J = static_cast<int>(rd.integer("grid.J", cfg.grid.J));

  cfg.init.profile = rd.text("init.profile", cfg.init.profile);
  cfg.init.amplitude = rd.number("init.amplitude", cfg.init.amplitude);
  cfg.init.supersolution_check =
      rd.boolean("init.supersolution_check", cfg.init.supersolution_check);

  cfg.solver.phi_stop = rd.number("solver.phi_stop", cfg.solver.phi_stop);
  cfg.solver.safety = rd.number("solver.safety", cfg.solver.safety);
  cfg.solver.tol = rd.number("solver.tol", cfg.solver.tol);
  cfg.solver.t_max = rd.number("solver.t_max", cfg.solver.t_max);
  cfg.solver.max_steps = rd.integer("solver.max_steps", cfg.solver.max_steps);

  cfg.analysis.alpha = rd.number("analysis.alpha", cfg.analysis.alpha);
  cfg.analysis.c_compact = rd.number("analysis.c_compact", cfg.analysis.c_compact);
  cfg.analysis.y_resolution =
      static_cast<int>(rd.integer("analysis.y_resolution", cfg.analysis.y_resolution));
  cfg.analysis.snapshot_delta_phi =
      rd.number("analysis.snapshot_delta_phi", cfg.analysis.snapshot_delta_phi);
  cfg.analysis.y_max = rd.number("analysis.y_max", cfg.analysis.y_max);
  cfg.analysis.boundary_layer_fraction = rd.number(
      "analysis.boundary_layer_fraction", cfg.analysis.boundary_layer_fraction);

  cfg.ode.y0 = rd.number("ode.y0", cfg.ode.y0);
  cfg.ode.stop_value = rd.number("ode.stop_value", cfg.ode.stop_value);
  cfg.ode.rel_tol = rd.number("ode.rel_tol", cfg.ode.rel_tol);

  cfg.output_dir = rd.text("output.dir", cfg.output_dir);

  rd.reject_unknown();
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(RunConfig& cfg) {
  cfg.warnings.clear();
  (void)cfg.nonlinearity(); // family / (p, q) domain checks

  if (cfg.grid.n < 1) throw ConfigError("config field 'grid.n': must be >= 1");
  if (cfg.grid.n > 2) {
    cfg.warnings.push_back(
        "grid.n = " + std::to_string(cfg.grid.n) +
        " is outside the n <= 2 scope of the verified asymptotics; "
        "checks run but carry no guarantee");
  }
  if (!(cfg.grid.R > 0.0)) throw ConfigError("config field 'grid.R': must be positive");
  if (cfg.grid.J < 64) throw ConfigError("config field 'grid.J': must be >= 64");

  if (cfg.init.profile != "parabola") {
    throw ConfigError("config field 'init.profile': only 'parabola' is available");
  }
  if (!(cfg.init.amplitude > 0.0)) {
    throw ConfigError("config field 'init.amplitude': must be positive");
  }
  if (cfg.init.supersolution_check && cfg.nl.family == "super_exponential" &&
      cfg.nl.q >= 1.0) {
    throw ConfigError(
        "config field 'init.supersolution_check': needs q = 0 (f(0) > 0); "
        "for q >= 1 the type-I property is assumed, not certified");
  }

  if (!(cfg.solver.phi_stop > 0.0 && cfg.solver.phi_stop <= 690.0)) {
    throw ConfigError("config field 'solver.phi_stop': must lie in (0, 690]");
  }
  if (!(cfg.solver.safety > 0.0 && cfg.solver.safety < 1.0)) {
    throw ConfigError("config field 'solver.safety': must lie in (0, 1)");
  }
  if (!(cfg.solver.tol >= 1e-8 && cfg.solver.tol <= 1e-2)) {
    throw ConfigError("config field 'solver.tol': must lie in [1e-8, 1e-2]");
  }
  if (cfg.solver.max_steps < 1000) {
    throw ConfigError("config field 'solver.max_steps': must be >= 1000");
  }

  const double p = cfg.nl.family == "pure_exponential_reference" ? 1.0 : cfg.nl.p;
  const double alpha = cfg.analysis.alpha;
  if (alpha != 0.0 && !(alpha > 0.0 && alpha < 1.0 / p)) {
    std::ostringstream os;
    os << "config field 'analysis.alpha': " << alpha
       << " violates 0 < alpha < 1/p = " << 1.0 / p
       << "; the h_alpha lower bound and the energy window need alpha < 1/p";
    throw ConfigError(os.str());
  }
  if (cfg.analysis.y_resolution < 33) {
    throw ConfigError("config field 'analysis.y_resolution': must be >= 33");
  }
  if (!(cfg.analysis.snapshot_delta_phi > 0.0 &&
        cfg.analysis.snapshot_delta_phi <= 10.0)) {
    throw ConfigError("config field 'analysis.snapshot_delta_phi': must lie in (0, 10]");
  }
  if (cfg.analysis.c_compact <= 0.0) {
    throw ConfigError("config field 'analysis.c_compact': must be positive");
  }
  if (!(cfg.analysis.boundary_layer_fraction >= 0.0 &&
        cfg.analysis.boundary_layer_fraction <= 0.25)) {
    throw ConfigError(
        "config field 'analysis.boundary_layer_fraction': must lie in [0, 0.25]");
  }

  if (!(cfg.ode.y0 > 0.0)) throw ConfigError("config field 'ode.y0': must be positive");
  if (!(cfg.ode.stop_value > cfg.ode.y0)) {
    throw ConfigError("config field 'ode.stop_value': must exceed ode.y0");
  }
  if (!(cfg.ode.rel_tol >= 1e-12 && cfg.ode.rel_tol <= 1e-3)) {
    throw ConfigError("config field 'ode.rel_tol': must lie in [1e-12, 1e-3]");
  }
  if (cfg.output_dir.empty()) {
    throw ConfigError("config field 'output.dir': must not be empty");
  }
}

} // namespace blowlab
