// polaron: command-line front end for runs, sweeps, comparisons and plots.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polaron/harness.hpp"
#include "polaron/kernels.hpp"

namespace {

using namespace polaron;

constexpr int kExitSolver = 4;

RunConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = load_config(path);
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value (got '" + s + "')");
    auto trim = [](std::string x) {
      const auto b = x.find_first_not_of(" \t");
      const auto e = x.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return cfg;
}

void report(const RunOutcome& out, bool quiet) {
  if (quiet) return;
  std::cout << "status: " << out.status << " (exit " << out.exit_code << ")\n";
  if (!out.message.empty()) std::cout << "message: " << out.message << '\n';
  const auto& j = out.summary;
  if (j.contains("metrics")) {
    for (const auto& [k, v] : j["metrics"].items()) std::cout << "  " << k << " = " << v.dump() << '\n';
  }
  if (j.contains("compare")) {
    for (const auto& [k, v] : j["compare"].items()) std::cout << "  " << k << " = " << v.dump() << '\n';
  }
  if (j.contains("fits")) {
    for (const auto& [k, v] : j["fits"].items()) {
      std::cout << "  " << k << ": ";
      if (v["fitted"].get<bool>()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "slope %.4f", v["slope"].get<double>());
        std::cout << buf << '\n';
      } else {
        std::cout << "no fit\n";
      }
    }
  }
  for (const auto& f : out.files) std::cout << "wrote " << f << '\n';
}

int plot_table(const std::string& path, std::string out, const std::string& xcol, const std::vector<std::string>& ycols,
               bool logy, const std::string& title) {
  const Table t = read_tsv(path);
  if (out.empty()) out = std::filesystem::path(path).replace_extension(".svg").string();
  if (t.rows.empty()) throw ConfigError("table '" + path + "' has no rows; nothing to plot");
  bool sweep = !t.columns.empty() && t.columns.front() == "alpha";
  for (const auto& [k, v] : t.meta) {
    if (k == "kind" && v == "sweep") sweep = true;
  }
  std::vector<std::string> ys = ycols;
  const std::string x = sweep ? std::string("alpha") : xcol;
  if (ys.empty()) {
    for (const auto& c : t.columns) {
      if (c != x) ys.push_back(c);
    }
  }
  std::string svg;
  if (sweep) {
    std::vector<ScalingPanel> panels;
    const auto alphas = t.values("alpha");
    for (const auto& y : ys) {
      const auto v = t.values(y);
      panels.push_back({y, alphas, v, fit_loglog(alphas, v)});
    }
    svg = render_scaling(title.empty() ? "alpha sweep" : title, panels);
  } else {
    std::vector<Series> series;
    for (const auto& y : ys) series.push_back({y, t.values(x), t.values(y)});
    svg = render_lines({title.empty() ? std::filesystem::path(path).filename().string() : title, x, "value", false, logy},
                       series);
  }
  write_file(out, svg);
  std::cout << "wrote " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong-coupling polaron dynamics: classical field, quadratic fluctuations, exact reference"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "Vector kernels: auto, scalar or avx2")->capture_default_str();

  std::string config_path;
  std::vector<std::string> sets;
  std::string output_dir;
  bool quiet = false;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "Override a config key: key=value (repeatable)");
    sub->add_option("-o,--output-dir", output_dir, "Override output_dir");
    sub->add_flag("-q,--quiet", quiet, "Print nothing on success");
    sub->fallthrough();
  };

  CLI::App* run = app.add_subcommand("run", "Run the pipeline selected by the config's kind");
  add_run_options(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Alpha sweep with log-log slope fits (forces kind = sweep)");
  add_run_options(sweep);
  CLI::App* compare =
      app.add_subcommand("compare", "Corrected vs uncorrected product approximation (forces kind = compare)");
  add_run_options(compare);

  CLI::App* validate_cmd = app.add_subcommand("validate-config", "Parse, validate and check the initial field");
  bool no_physics = false;
  validate_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--set", sets, "Override a config key: key=value (repeatable)");
  validate_cmd->add_flag("--syntax-only", no_physics, "Skip the ground-state check");
  validate_cmd->fallthrough();

  CLI::App* plot = app.add_subcommand("plot", "Render a time-series or sweep table as SVG");
  std::string table_path, plot_out, xcol = "t", title;
  std::vector<std::string> ycols;
  bool logy = false;
  plot->add_option("table", table_path, "TSV written by run or sweep")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output SVG (default: table path with .svg)");
  plot->add_option("--x", xcol, "Abscissa column for time series")->capture_default_str();
  plot->add_option("--y", ycols, "Columns to draw (default: all)")->delimiter(',');
  plot->add_flag("--logy", logy, "Logarithmic ordinate for time series");
  plot->add_option("--title", title, "Plot title");
  plot->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    kernels::set_backend(kernels::parse_backend(simd));
    if (*plot) return plot_table(table_path, plot_out, xcol, ycols, logy, title);

    RunConfig cfg = load_with_overrides(config_path, sets);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (*sweep) cfg.kind = RunKind::sweep;
    if (*compare) cfg.kind = RunKind::compare;
    validate(cfg);

    if (*validate_cmd) {
      std::cout << canonical_text(cfg) << "config_hash = " << config_hash(cfg) << '\n';
      if (!no_physics) {
        const Setup s = prepare(cfg, cfg.alphas.front());
        std::cout << "modes = " << s.sys.modes.size() << "\ne(phi0) = " << s.gs0.energy
                  << "\ngap(phi0) = " << s.gs0.gap << '\n';
      }
      std::cout << "config ok\n";
      return kExitOk;
    }

    RunContext ctx;
    ctx.workers = workers_from_env();
    const RunOutcome out = execute(cfg, ctx);
    report(out, quiet && out.exit_code == kExitOk);
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BasisMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GapCollapse& e) {
    std::cerr << "gap abort: " << e.what() << '\n';
    return kExitGapAbort;
  } catch (const LeakageError& e) {
    std::cerr << "leakage: " << e.what() << '\n';
    return kExitLeakage;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
