#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "polaron/config.hpp"
#include "polaron/io.hpp"
#include "polaron/plot.hpp"

using namespace polaron;

namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment line\n"
      "kind = oracle\n"
      "N = 8   # trailing comment\n"
      "L=2.9\n"
      "alphas = 2, 2.83, 4\n"
      "t_units = absolute\n"
      "phi0 = sigma\n");
  CHECK(c.kind == RunKind::oracle);
  CHECK(c.N == 8);
  CHECK(c.L == 2.9);
  CHECK(c.alphas == std::vector<double>{2.0, 2.83, 4.0});
  CHECK(!c.t_in_alpha2);
  CHECK(c.phi0 == Phi0Family::sigma);
  CHECK(c.d == 1);   // default kept
}

TEST_CASE("config errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_config("N = 8\nbogus = 1\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("N = 8\nN = 16\n"), doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse_config("N = eight\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("N 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 2\nalphas = 2, 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind = nonsense\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = [](auto mutate) {
    RunConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), ConfigError);
  };
  bad([](RunConfig& x) { x.N = 15; });
  bad([](RunConfig& x) { x.d = 2; });
  bad([](RunConfig& x) { x.L = -1; });
  bad([](RunConfig& x) { x.alphas = {}; });
  bad([](RunConfig& x) { x.alphas = {2.0, -1.0}; });
  bad([](RunConfig& x) { x.order = 3; });
  bad([](RunConfig& x) { x.gap_floor = 1.0; });
  bad([](RunConfig& x) { x.output_prefix = "a/b"; });
  bad([](RunConfig& x) {
    x.kind = RunKind::oracle;
    x.n_max = 0;
  });
}

TEST_CASE("canonical text round-trips and hashes stably") {
  RunConfig c;
  c.kind = RunKind::compare;
  c.alphas = {2.0, 2.83, 4.0};
  c.L = 2.9;
  c.dt = 0.1 + 0.2;   // needs all 17 digits
  const std::string text = canonical_text(c);
  const RunConfig back = parse_config(text);
  CHECK(canonical_text(back) == text);
  CHECK(back.dt == c.dt);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  RunConfig other = c;
  other.output_dir = "elsewhere";
  other.output_prefix = "x";
  CHECK(config_hash(other) == config_hash(c));
  other.N = 32;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("derived settings") {
  RunConfig c;
  c.alphas = {4.0};
  c.t_final = 0.25;
  CHECK(time_horizon(c, 4.0) == doctest::Approx(4.0));
  c.t_in_alpha2 = false;
  CHECK(time_horizon(c, 4.0) == doctest::Approx(0.25));
  c.cutoff = 2.0;
  CHECK(time_step(c) == doctest::Approx(0.05 / 4));
  CHECK(window_cutoff(c) == doctest::Approx(1.0));
}

TEST_CASE("TSV round trip") {
  Table t;
  t.columns = {"t", "a", "b"};
  t.meta = {{"config_hash", "0123456789abcdef"}, {"kind", "lp"}};
  t.add_row({0.0, 1.0 / 3.0, std::numeric_limits<double>::quiet_NaN()});
  t.add_row({0.5, -2e-300, std::numeric_limits<double>::infinity()});
  const std::string text = format_tsv(t);
  CHECK(text.rfind("# schema_version=1\n", 0) == 0);
  const Table u = parse_tsv(text);
  CHECK(u.columns == t.columns);
  CHECK(u.meta == t.meta);
  REQUIRE(u.rows.size() == 2);
  CHECK(u.rows[0][1] == 1.0 / 3.0);
  CHECK(std::isnan(u.rows[0][2]));
  CHECK(u.rows[1][1] == -2e-300);
  CHECK(std::isinf(u.rows[1][2]));
  CHECK(u.values("a") == std::vector<double>{1.0 / 3.0, -2e-300});
  CHECK_THROWS_AS(u.column("missing"), ConfigError);
  CHECK_THROWS_AS(t.add_row({1.0}), BasisMismatch);
  CHECK_THROWS_AS(parse_tsv("t\ta\n0\t1\n"), ConfigError);
  CHECK_THROWS_AS(parse_tsv("# schema_version=2\nt\n0\n"), ConfigError);
  CHECK_THROWS_AS(parse_tsv("# schema_version=1\nt\ta\n0\n"), ConfigError);
}

TEST_CASE("checkpoint round trip and corruption") {
  Checkpoint c;
  c.d = 1;
  c.N = 8;
  c.L = 2.9;
  c.alpha = 2.83;
  c.t = 2.0;
  for (int i = 0; i < 8; ++i) {
    c.psi.emplace_back(0.1 * i, -0.2 * i);
    c.phi.emplace_back(std::sin(i), std::cos(i));
  }
  const std::string bytes = encode_checkpoint(c);
  CHECK(bytes.rfind("PLRNCKPT", 0) == 0);
  CHECK(bytes.size() == 8 + 4 * 3 + 8 * 3 + 2 * (8 + 8 * 16) + 4);
  const Checkpoint d = decode_checkpoint(bytes);
  CHECK(d.N == 8);
  CHECK(d.alpha == 2.83);
  CHECK(d.psi == c.psi);
  CHECK(d.phi == c.phi);

  std::string flipped = bytes;
  flipped[60] ^= 0x01;
  CHECK_THROWS_WITH_AS(decode_checkpoint(flipped), doctest::Contains("checksum"), ConfigError);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 9)), ConfigError);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(magic), ConfigError);

  c.psi.pop_back();
  CHECK_THROWS_AS(encode_checkpoint(c), BasisMismatch);

  const fs::path dir = fs::temp_directory_path() / "polaron_io_test";
  fs::remove_all(dir);
  write_checkpoint((dir / "sub" / "c.ckpt").string(), d);
  CHECK(read_checkpoint((dir / "sub" / "c.ckpt").string()).phi == d.phi);
  fs::remove_all(dir);
}

TEST_CASE("log-log fit") {
  const std::vector<double> a{2.0, 2.83, 4.0, 5.66};
  std::vector<double> y;
  for (double x : a) y.push_back(3.0 * std::pow(x, -2.0));
  const LogLogFit f = fit_loglog(a, y);
  CHECK(f.fitted);
  CHECK(f.points == 4);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(!fit_loglog({1.0, 2.0}, {1.0, 2.0}).fitted);
  CHECK(!fit_loglog({1.0, 2.0, 3.0}, {1.0, 0.0, -1.0}).fitted);
}

TEST_CASE("plots are deterministic") {
  const Series s{"curve", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}};
  const PlotSpec spec{"title", "t", "y", false, true};
  const std::string a = render_lines(spec, {s});
  CHECK(a == render_lines(spec, {s}));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("curve") != std::string::npos);
  CHECK_THROWS_AS(render_lines(spec, {}), ConfigError);
  const Series empty{"nothing", {0.0}, {std::numeric_limits<double>::quiet_NaN()}};
  CHECK_THROWS_AS(render_lines(spec, {empty}), ConfigError);

  const std::vector<double> al{2.0, 2.83, 4.0};
  const std::vector<double> v{1.0, 0.5, 0.25};
  const ScalingPanel p{"err", al, v, fit_loglog(al, v)};
  const std::string sc = render_scaling("sweep", {p, p});
  CHECK(sc == render_scaling("sweep", {p, p}));
  CHECK(sc.find("slope = ") != std::string::npos);
}

}
