#include "polaron/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "polaron/landau_pekar.hpp"
#include "polaron/types.hpp"

namespace polaron {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw ConfigError("key '" + std::string(key) + "': " + what + " (got '" + std::string(value) + "')");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "expected a number");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "expected an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "expected true or false");
}

RunKind to_kind(std::string_view key, std::string_view v) {
  if (v == "lp") return RunKind::lp;
  if (v == "bogoliubov") return RunKind::bogoliubov;
  if (v == "oracle") return RunKind::oracle;
  if (v == "sweep") return RunKind::sweep;
  if (v == "compare") return RunKind::compare;
  bad_value(key, v, "expected lp, bogoliubov, oracle, sweep or compare");
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (item.empty()) bad_value(key, v, "empty list entry");
    out.push_back(to_double(key, item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) bad_value(key, v, "expected a comma-separated list");
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"kind", [](RunConfig& c, auto k, auto v) { c.kind = to_kind(k, v); }},
      {"sweep_kind", [](RunConfig& c, auto k, auto v) { c.sweep_kind = to_kind(k, v); }},
      {"d", [](RunConfig& c, auto k, auto v) { c.d = static_cast<int>(to_int(k, v)); }},
      {"N", [](RunConfig& c, auto k, auto v) { c.N = static_cast<int>(to_int(k, v)); }},
      {"L", [](RunConfig& c, auto k, auto v) { c.L = to_double(k, v); }},
      {"cutoff", [](RunConfig& c, auto k, auto v) { c.cutoff = to_double(k, v); }},
      {"alpha", [](RunConfig& c, auto k, auto v) { c.alphas = {to_double(k, v)}; }},
      {"alphas", [](RunConfig& c, auto k, auto v) { c.alphas = to_list(k, v); }},
      {"dt", [](RunConfig& c, auto k, auto v) { c.dt = to_double(k, v); }},
      {"t_final", [](RunConfig& c, auto k, auto v) { c.t_final = to_double(k, v); }},
      {"t_units",
       [](RunConfig& c, auto k, auto v) {
         if (v == "alpha2") c.t_in_alpha2 = true;
         else if (v == "absolute") c.t_in_alpha2 = false;
         else bad_value(k, v, "expected alpha2 or absolute");
       }},
      {"order", [](RunConfig& c, auto k, auto v) { c.order = static_cast<int>(to_int(k, v)); }},
      {"record_stride", [](RunConfig& c, auto k, auto v) { c.record_stride = static_cast<int>(to_int(k, v)); }},
      {"gs_stride", [](RunConfig& c, auto k, auto v) { c.gs_stride = static_cast<int>(to_int(k, v)); }},
      {"phi0",
       [](RunConfig& c, auto k, auto v) {
         if (v == "gaussian") c.phi0 = Phi0Family::gaussian;
         else if (v == "sigma") c.phi0 = Phi0Family::sigma;
         else bad_value(k, v, "expected gaussian or sigma");
       }},
      {"phi0_amplitude", [](RunConfig& c, auto k, auto v) { c.phi0_amplitude = to_double(k, v); }},
      {"phi0_width", [](RunConfig& c, auto k, auto v) { c.phi0_width = to_double(k, v); }},
      {"phi0_scale", [](RunConfig& c, auto k, auto v) { c.phi0_scale = to_double(k, v); }},
      {"phi0_trial_width", [](RunConfig& c, auto k, auto v) { c.phi0_trial_width = to_double(k, v); }},
      {"n_max", [](RunConfig& c, auto k, auto v) { c.n_max = static_cast<int>(to_int(k, v)); }},
      {"leak_tol", [](RunConfig& c, auto k, auto v) { c.leak_tol = to_double(k, v); }},
      {"window_k", [](RunConfig& c, auto k, auto v) { c.window_k = to_double(k, v); }},
      {"dim_cap",
       [](RunConfig& c, auto k, auto v) {
         const long long n = to_int(k, v);
         if (n <= 0) bad_value(k, v, "must be positive");
         c.dim_cap = static_cast<std::uint64_t>(n);
       }},
      {"eig_tol", [](RunConfig& c, auto k, auto v) { c.eig_tol = to_double(k, v); }},
      {"cg_tol", [](RunConfig& c, auto k, auto v) { c.cg_tol = to_double(k, v); }},
      {"gap_floor", [](RunConfig& c, auto k, auto v) { c.gap_floor = to_double(k, v); }},
      {"tol_norm", [](RunConfig& c, auto k, auto v) { c.tol_norm = to_double(k, v); }},
      {"min_initial_gap", [](RunConfig& c, auto k, auto v) { c.min_initial_gap = to_double(k, v); }},
      {"seed",
       [](RunConfig& c, auto k, auto v) {
         const long long n = to_int(k, v);
         if (n < 0) bad_value(k, v, "must not be negative");
         c.seed = static_cast<std::uint64_t>(n);
       }},
      {"output_dir", [](RunConfig& c, auto, auto v) { c.output_dir = std::string(v); }},
      {"output_prefix", [](RunConfig& c, auto, auto v) { c.output_prefix = std::string(v); }},
      {"write_checkpoint", [](RunConfig& c, auto k, auto v) { c.write_checkpoint = to_bool(k, v); }},
      {"write_plots", [](RunConfig& c, auto k, auto v) { c.write_plots = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  if (value.empty()) throw ConfigError("key '" + std::string(key) + "' has an empty value");
  it->second(cfg, key, value);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    // alpha and alphas write the same field
    const std::string_view slot = key == "alphas" ? "alpha" : key;
    if (!seen.insert(std::string(slot)).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
    }
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(c.d == 1 || c.d == 3, "d must be 1 or 3");
  need(c.N >= 8 && c.N % 2 == 0, "N must be even and at least 8");
  need(c.L > 0.0, "L must be positive");
  need(c.cutoff > 0.0, "cutoff must be positive");
  need(!c.alphas.empty(), "alpha is required");
  for (double a : c.alphas) need(a > 0.0, "alpha values must be positive");
  need(c.dt >= 0.0, "dt must not be negative (0 selects the default)");
  need(c.t_final >= 0.0, "t_final must not be negative");
  need(c.order == 2 || c.order == 4, "order must be 2 or 4");
  need(c.record_stride >= 1, "record_stride must be at least 1");
  need(c.gs_stride >= 1, "gs_stride must be at least 1");
  need(c.phi0_width > 0.0, "phi0_width must be positive");
  need(c.phi0_trial_width > 0.0, "phi0_trial_width must be positive");
  need(c.n_max >= 0, "n_max must not be negative");
  need(c.window_k >= 0.0, "window_k must not be negative");
  need(c.leak_tol > 0.0, "leak_tol must be positive");
  need(c.eig_tol > 0.0, "eig_tol must be positive");
  need(c.cg_tol > 0.0, "cg_tol must be positive");
  need(c.gap_floor > 0.0 && c.gap_floor < 1.0, "gap_floor is a fraction of the initial gap in (0, 1)");
  need(c.tol_norm > 0.0, "tol_norm must be positive");
  need(c.min_initial_gap > 0.0, "min_initial_gap must be positive");
  need(!c.output_prefix.empty(), "output_prefix must not be empty");
  need(c.output_prefix.find('/') == std::string::npos, "output_prefix must not contain '/'");
  need(c.sweep_kind == RunKind::lp || c.sweep_kind == RunKind::bogoliubov || c.sweep_kind == RunKind::oracle,
       "sweep_kind must be lp, bogoliubov or oracle");
  if (c.kind == RunKind::oracle || c.kind == RunKind::compare ||
      (c.kind == RunKind::sweep && c.sweep_kind == RunKind::oracle)) {
    need(c.n_max >= 1, "oracle runs need n_max >= 1");
  }
}

std::string kind_name(RunKind k) {
  switch (k) {
    case RunKind::lp: return "lp";
    case RunKind::bogoliubov: return "bogoliubov";
    case RunKind::oracle: return "oracle";
    case RunKind::sweep: return "sweep";
    case RunKind::compare: return "compare";
  }
  return "?";
}

std::string family_name(Phi0Family f) { return f == Phi0Family::gaussian ? "gaussian" : "sigma"; }

std::string canonical_text(const RunConfig& c, bool with_outputs) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  std::string alphas;
  for (std::size_t i = 0; i < c.alphas.size(); ++i) alphas += (i ? ", " : "") + num(c.alphas[i]);
  kv("kind", kind_name(c.kind));
  kv("sweep_kind", kind_name(c.sweep_kind));
  kv("d", std::to_string(c.d));
  kv("N", std::to_string(c.N));
  kv("L", num(c.L));
  kv("cutoff", num(c.cutoff));
  kv("alphas", alphas);
  kv("dt", num(c.dt));
  kv("t_final", num(c.t_final));
  kv("t_units", c.t_in_alpha2 ? "alpha2" : "absolute");
  kv("order", std::to_string(c.order));
  kv("record_stride", std::to_string(c.record_stride));
  kv("gs_stride", std::to_string(c.gs_stride));
  kv("phi0", family_name(c.phi0));
  kv("phi0_amplitude", num(c.phi0_amplitude));
  kv("phi0_width", num(c.phi0_width));
  kv("phi0_scale", num(c.phi0_scale));
  kv("phi0_trial_width", num(c.phi0_trial_width));
  kv("n_max", std::to_string(c.n_max));
  kv("leak_tol", num(c.leak_tol));
  kv("window_k", num(c.window_k));
  kv("dim_cap", std::to_string(c.dim_cap));
  kv("eig_tol", num(c.eig_tol));
  kv("cg_tol", num(c.cg_tol));
  kv("gap_floor", num(c.gap_floor));
  kv("tol_norm", num(c.tol_norm));
  kv("min_initial_gap", num(c.min_initial_gap));
  kv("seed", std::to_string(c.seed));
  if (!with_outputs) return os.str();
  kv("output_dir", c.output_dir);
  kv("output_prefix", c.output_prefix);
  kv("write_checkpoint", c.write_checkpoint ? "true" : "false");
  kv("write_plots", c.write_plots ? "true" : "false");
  return os.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double time_horizon(const RunConfig& c, double alpha) { return c.t_in_alpha2 ? c.t_final * alpha * alpha : c.t_final; }

double time_step(const RunConfig& c) { return c.dt > 0.0 ? c.dt : default_dt(c.cutoff); }

double window_cutoff(const RunConfig& c) { return c.window_k > 0.0 ? c.window_k : 0.5 * c.cutoff; }

}  // namespace polaron
