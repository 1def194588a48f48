// eeopt: optimum energy efficiency / spectral efficiency of a flat-fading link.
//
//   eeopt optimize --config link.ini [--set section.key=value ...]
//   eeopt tradeoff --config link.ini --c-min 0 --c-max 10 --points 201
//   eeopt sweep    --config link.ini --param kappa --start 7e-8 --stop 1e-7 --points 7
//
// CSV goes to --output (default: output.path from the config, "-" for stdout).
// Exit codes: 0 success, 2 configuration error, 3 solver error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eeopt/runs.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> cases;
  std::optional<double> distance_m;
  std::optional<double> g0_db;
  std::optional<double> path_exp;
  std::optional<double> delta;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI config file (defaults reproduce the 10 m reference link)");
  cmd->add_option("--set", o.overrides, "Override a config value, e.g. --set link.kappa=1e-7");
  cmd->add_option("--cases", o.cases, "Comma-separated cases: static_csit,fading_cdit,fading_csit");
  cmd->add_option("--distance-m", o.distance_m, "Transmitter-receiver distance in meters");
  cmd->add_option("--g0-db", o.g0_db, "Path gain at 1 m in dB");
  cmd->add_option("--path-exp", o.path_exp, "Path-loss exponent");
  cmd->add_option("--delta", o.delta, "Bisection bracket tolerance in bit/s/Hz");
  cmd->add_option("--output,-o", o.output, "CSV output path, '-' for stdout");
}

std::string number(double v) { return eeopt::csv::format_number(v); }

eeopt::RunConfig resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.cases) overrides.push_back("channel.cases=" + *o.cases);
  if (o.distance_m) overrides.push_back("channel.distance_m=" + number(*o.distance_m));
  if (o.g0_db) overrides.push_back("channel.g0_db=" + number(*o.g0_db));
  if (o.path_exp) overrides.push_back("channel.path_exp=" + number(*o.path_exp));
  if (o.delta) overrides.push_back("solver.delta=" + number(*o.delta));
  if (!o.output.empty()) overrides.push_back("output.path=" + o.output);
  if (o.config_path.empty()) {
    std::istringstream empty;
    return eeopt::parse_config(empty, overrides);
  }
  return eeopt::load_config(o.config_path, overrides);
}

void emit(const eeopt::RunConfig& cfg, const std::string& csv_text) {
  if (cfg.output_path == "-") {
    std::cout << csv_text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw eeopt::config_error("output.path: cannot write '" + cfg.output_path + "'");
  out << csv_text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficiency / spectral-efficiency optimizer for flat-fading links"};
  app.require_subcommand(1);

  CommonOptions opt_common, trade_common, sweep_common;

  auto* optimize_cmd = app.add_subcommand("optimize", "Optimum spectral efficiency and energy per bit per case");
  add_common(optimize_cmd, opt_common);

  auto* tradeoff_cmd = app.add_subcommand("tradeoff", "Sample the EE-SE curve on a uniform grid");
  add_common(tradeoff_cmd, trade_common);
  double c_min = 0.0, c_max = 10.0;
  int curve_points = 201;
  tradeoff_cmd->add_option("--c-min", c_min, "Lowest spectral efficiency");
  tradeoff_cmd->add_option("--c-max", c_max, "Highest spectral efficiency");
  tradeoff_cmd->add_option("--points", curve_points, "Number of grid points");

  auto* sweep_cmd = app.add_subcommand("sweep", "Optimize across one swept parameter");
  add_common(sweep_cmd, sweep_common);
  std::string param;
  double start = 0.0, stop = 0.0;
  int sweep_points = 0;
  bool log_scale = false;
  sweep_cmd->add_option("--param", param, "kappa | noise_figure_db | p_static | distance_m | nakagami_m")->required();
  sweep_cmd->add_option("--start", start, "First swept value")->required();
  sweep_cmd->add_option("--stop", stop, "Last swept value")->required();
  sweep_cmd->add_option("--points", sweep_points, "Number of swept values")->required();
  sweep_cmd->add_flag("--log", log_scale, "Geometric spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    if (optimize_cmd->parsed()) {
      const auto cfg = resolve(opt_common);
      const auto rows = eeopt::run_optimize(cfg);
      emit(cfg, eeopt::optimize_csv(rows));
      std::cerr << eeopt::optimize_summary(rows);
    } else if (tradeoff_cmd->parsed()) {
      const auto cfg = resolve(trade_common);
      emit(cfg, eeopt::tradeoff_csv(eeopt::run_tradeoff(cfg, c_min, c_max, curve_points)));
    } else if (sweep_cmd->parsed()) {
      const auto cfg = resolve(sweep_common);
      const auto which = eeopt::parse_sweep_parameter(param);
      if (!which) throw eeopt::config_error("--param: unknown sweep parameter '" + param + "'");
      const eeopt::SweepSpec spec{*which, start, stop, sweep_points, log_scale};
      emit(cfg, eeopt::sweep_csv(eeopt::run_sweep(cfg, spec)));
    }
  } catch (const eeopt::config_error& e) {
    std::cerr << "eeopt: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const eeopt::domain_error& e) {
    std::cerr << "eeopt: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "eeopt: solver error: " << e.what() << '\n';
    return exit_solver;
  }
  return 0;
}
