#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "blowlab/artifacts.hpp"
#include "blowlab/config.hpp"
#include "blowlab/errors.hpp"

using namespace blowlab;

namespace {

const char* kMinimalConfig = R"(
# exponential reference, small grid
[nl]
p = 1.0
q = 0.0
family = "pure_exponential_reference"

[grid]
n = 1
R = 1.0
J = 64

[init]
amplitude = 0.45

[solver]
phi_stop = 12.0

[output]
dir = "out_test"
)";

std::filesystem::path temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("blowlab_test_") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

} // namespace

TEST_CASE("config parsing: values, defaults, hash") {
  RunConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.nl.family == "pure_exponential_reference");
  CHECK(cfg.grid.J == 64);
  CHECK(cfg.init.amplitude == 0.45);
  CHECK(cfg.solver.phi_stop == 12.0);
  CHECK(cfg.solver.safety == 0.45);      // default
  CHECK(cfg.analysis.y_resolution == 257); // default
  CHECK(cfg.output_dir == "out_test");
  CHECK(cfg.config_hash.size() == 16);
  CHECK(cfg.config_hash == fnv1a_hex(kMinimalConfig));
  CHECK(cfg.alpha_or_default() == doctest::Approx(0.5)); // 1/(2p), p = 1
}

TEST_CASE("config validation failures carry field paths") {
  auto expect_error = [](const std::string& patch, const char* needle) {
    const std::string text = std::string(kMinimalConfig) + "\n" + patch + "\n";
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains(needle),
                         ConfigError);
  };
  expect_error("[analysis]\nalpha = 1.2", "analysis.alpha");
  expect_error("[analysis]\nalpha = 1.2", "alpha < 1/p");
  expect_error("[typo_section]\nfoo = 1", "typo_section.foo");
  expect_error("[solver]\ntol = 1.0", "solver.tol");
  expect_error("[ode]\nrel_tol = 1", "ode.rel_tol");

  { // grid too coarse
    std::string bad(kMinimalConfig);
    const auto pos = bad.find("J = 64");
    bad.replace(pos, 6, "J = 32");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("grid.J"),
                         ConfigError);
  }
  { // alpha >= 1/p for a super-exponential family
    std::string text = R"(
[nl]
p = 2.0
q = 0.0
family = "super_exponential"
[analysis]
alpha = 0.6
)";
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("alpha < 1/p"),
                         ConfigError);
  }
  { // supersolution check is a q = 0 device
    std::string text = R"(
[nl]
p = 2.0
q = 1.0
family = "super_exponential"
[init]
supersolution_check = true
)";
    CHECK_THROWS_WITH_AS(parse_config(text),
                         doctest::Contains("supersolution_check"), ConfigError);
  }
  { // malformed line
    CHECK_THROWS_WITH_AS(parse_config("[nl\np = 2"), doctest::Contains("line"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("p 2"), doctest::Contains("key = value"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nl]\np = 2\np = 3"),
                         doctest::Contains("duplicate"), ConfigError);
  }
}

TEST_CASE("out-of-scope dimension warns instead of failing") {
  std::string text = R"(
[nl]
p = 2.0
family = "super_exponential"
[grid]
n = 3
)";
  RunConfig cfg = parse_config(text);
  REQUIRE(cfg.warnings.size() == 1);
  CHECK(cfg.warnings[0].find("n <= 2") != std::string::npos);
}

TEST_CASE("hash is stable") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("blowlab") != fnv1a_hex("blowlab "));
}

TEST_CASE("decimal and %.17g formatting round-trips") {
  for (double x : {0.0, 0.125, 0.13940279264033098, 3.0482773931581377,
                   1e-20, 7.0, 0.9999999999999999}) {
    const std::string dec = format_decimal(x);
    CHECK(std::strtod(dec.c_str(), nullptr) == x);
    CHECK(dec.find('e') == std::string::npos); // exponent-free
    const std::string g = format_double(x);
    CHECK(std::strtod(g.c_str(), nullptr) == x);
  }
  CHECK(format_decimal(0.0) == "0");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "\"inf\"");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "\"-inf\"");
}

TEST_CASE("snapshot JSON round-trips bit-exactly, including the u-space boundary") {
  const auto dir = temp_dir("snapshot_roundtrip");
  RadialGrid grid(1, 1.0, 64);
  Snapshot snap;
  snap.t = 0.13940279264033098;
  snap.dt_since_prev = 2.7e-170;
  snap.step_index = 12345;
  snap.umax = 17.25;
  snap.phi.resize(grid.nodes());
  for (int j = 0; j <= grid.J; ++j) snap.phi[j] = 5.0 - 0.001 * j * j;
  snap.phi[grid.J] = -std::numeric_limits<double>::infinity();
  snap.phi_center = snap.phi[0];

  const auto path = dir / "snap.json";
  write_snapshot(path, snap, grid);
  RadialGrid grid2;
  const Snapshot back = read_snapshot(path, &grid2);
  CHECK(back.t == snap.t);
  CHECK(back.dt_since_prev == snap.dt_since_prev);
  CHECK(back.step_index == snap.step_index);
  CHECK(back.umax == snap.umax);
  CHECK(grid2.J == grid.J);
  CHECK(grid2.R == grid.R);
  REQUIRE(back.phi.size() == snap.phi.size());
  for (size_t j = 0; j < snap.phi.size(); ++j) CHECK(back.phi[j] == snap.phi[j]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("frame and manifest round-trips") {
  const auto dir = temp_dir("frame_roundtrip");
  SelfSimilarFrame f;
  f.s = 17.5;
  f.alpha = 0.25;
  f.source_t = 3.0482773931581377;
  f.n = 2;
  f.extent_truncated = true;
  for (int j = 0; j < 9; ++j) {
    f.y.push_back(0.25 * j);
    f.v.push_back(1.0 + 1e-3 * j);
  }
  write_frame(dir / "f.json", f);
  const SelfSimilarFrame g = read_frame(dir / "f.json");
  CHECK(g.s == f.s);
  CHECK(g.source_t == f.source_t);
  CHECK(g.extent_truncated == f.extent_truncated);
  CHECK(g.v == f.v);
  CHECK(g.y == f.y);

  Manifest m;
  m.run_id = "abc123";
  m.config_hash = "deadbeef";
  m.family = "super_exponential";
  m.p = 2.0;
  m.q = 1.0;
  m.grid.J = 64;
  m.grid.R = 2.0;
  m.grid.n = 1;
  m.estimate.T_est = 0.125;
  m.estimate.log_gap_last = -400.0;
  m.estimate.method = "aitken";
  m.estimate.uncertainty = 1e-12;
  m.estimate.log_gap = {-1.0, -2.0, -3.0};
  m.snapshot_files = {"snapshots/snap_00000.json"};
  m.ledger_files = {"ledgers/energy.csv"};
  m.warnings = {"example warning"};
  write_manifest(dir / "manifest.json", m);
  const Manifest back = read_manifest(dir / "manifest.json");
  CHECK(back.run_id == m.run_id);
  CHECK(back.estimate.method == "aitken");
  CHECK(back.estimate.log_gap == m.estimate.log_gap);
  CHECK(back.estimate.s.size() == 3);
  CHECK(back.snapshot_files == m.snapshot_files);
  CHECK(back.warnings == m.warnings);
  std::filesystem::remove_all(dir);
}
