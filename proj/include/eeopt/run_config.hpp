#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eeopt/channel_stats.hpp"
#include "eeopt/circuit_power.hpp"
#include "eeopt/ee_optimizer.hpp"
#include "eeopt/errors.hpp"
#include "eeopt/min_power.hpp"

namespace eeopt {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Everything a CLI run needs. dB inputs live only here; link_params() hands the
/// library linear SI values.
struct RunConfig {
  // [link]
  double bandwidth_hz = 1e4;
  std::optional<double> noise_power_w; // overrides psd * W * noise figure when set
  double noise_psd_dbm_per_hz = -170.0;
  double noise_figure_db = 10.0;
  double pa_efficiency = 0.4;
  double kappa = 9e-8;
  double p_static_w = 0.188;
  // [circuit_power]
  CircuitPowerModel circuit = CircuitPowerModel::linear();
  // [channel]
  std::vector<ChannelCase> cases{std::begin(all_channel_cases), std::end(all_channel_cases)};
  std::optional<double> mean_gain; // overrides the distance model when set
  double distance_m = 10.0;
  double g0_db = -70.0;
  double path_exp = 3.5;
  double nakagami_m = 1.0;
  // [expectation], [solver], [output]
  ExpectationSpec expectation = {};
  OptimizerOptions solver = {};
  std::string output_path = "-";

  // sigma^2 = W N0 Nf
  double resolved_noise_power() const {
    if (noise_power_w) return *noise_power_w;
    return bandwidth_hz * dbm_to_watts(noise_psd_dbm_per_hz) * db_to_linear(noise_figure_db);
  }

  double resolved_mean_gain() const {
    if (mean_gain) return *mean_gain;
    return mean_gain_from_distance(distance_m, db_to_linear(g0_db), path_exp);
  }

  // Static channels get the mean gain as a fixed gain; fading cases a Nakagami-m law with that mean.
  LinkParams link_params(ChannelCase which) const {
    const double g = resolved_mean_gain();
    GainModel gain = which == ChannelCase::StaticCsit ? GainModel::fixed(g) : GainModel::nakagami(nakagami_m, g);
    return LinkParams{bandwidth_hz, resolved_noise_power(), pa_efficiency, kappa, p_static_w,
                      which,        std::move(gain),        circuit,       expectation};
  }

  void validate() const {
    if (cases.empty()) throw config_error("channel.cases: at least one channel case is required");
    if (!(solver.delta > 0.0)) throw config_error("solver.delta: must be positive");
    if (!(solver.c_cap >= 1.0)) throw config_error("solver.c_cap: must be >= 1");
    try {
      for (ChannelCase c : cases) link_params(c).validate();
    } catch (const domain_error& e) {
      throw config_error(std::string("invalid link parameters: ") + e.what());
    }
  }
};

namespace detail {

using boost::property_tree::ptree;

inline double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw config_error(key + ": expected a number, got '" + text + "'");
}

inline std::uint64_t parse_count(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used == text.size() && text.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  throw config_error(key + ": expected a non-negative integer, got '" + text + "'");
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\"");
  const auto e = s.find_last_not_of(" \t\"");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<ChannelCase> parse_cases(const std::string& key, const std::string& text) {
  std::vector<ChannelCase> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto c = parse_channel_case(item);
    if (!c) throw config_error(key + ": unknown channel case '" + item + "'");
    out.push_back(*c);
  }
  return out;
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"link",
       {"bandwidth_hz", "noise_power_w", "noise_psd_dbm_per_hz", "noise_figure_db", "pa_efficiency", "kappa",
        "p_static_w"}},
      {"circuit_power", {"kind", "alpha"}},
      {"channel", {"cases", "mean_gain", "distance_m", "g0_db", "path_exp", "nakagami_m"}},
      {"expectation", {"method", "order", "samples", "seed", "rel_tol"}},
      {"solver", {"delta", "c_cap"}},
      {"output", {"path"}},
  };
  return keys;
}

inline RunConfig from_tree(const ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) throw config_error(section + ": unknown section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw config_error(section + "." + key + ": unknown key");
      (void)value;
    }
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  auto real = [&](const std::string& path, double& dst) {
    if (auto v = get(path)) dst = parse_real(path, *v);
  };
  auto opt_real = [&](const std::string& path, std::optional<double>& dst) {
    if (auto v = get(path)) dst = parse_real(path, *v);
  };

  RunConfig cfg;
  real("link.bandwidth_hz", cfg.bandwidth_hz);
  opt_real("link.noise_power_w", cfg.noise_power_w);
  real("link.noise_psd_dbm_per_hz", cfg.noise_psd_dbm_per_hz);
  real("link.noise_figure_db", cfg.noise_figure_db);
  real("link.pa_efficiency", cfg.pa_efficiency);
  real("link.kappa", cfg.kappa);
  real("link.p_static_w", cfg.p_static_w);

  const std::string kind = get("circuit_power.kind").value_or("linear");
  if (kind == "linear") {
    if (get("circuit_power.alpha")) throw config_error("circuit_power.alpha: only valid with kind = powerlaw");
  } else if (kind == "powerlaw") {
    const auto alpha = get("circuit_power.alpha");
    if (!alpha) throw config_error("circuit_power.alpha: required for kind = powerlaw");
    try {
      cfg.circuit = CircuitPowerModel::power_law(parse_real("circuit_power.alpha", *alpha));
    } catch (const domain_error& e) {
      throw config_error(std::string("circuit_power.alpha: ") + e.what());
    }
  } else {
    throw config_error("circuit_power.kind: expected linear or powerlaw, got '" + kind + "'");
  }

  if (auto v = get("channel.cases")) cfg.cases = parse_cases("channel.cases", *v);
  opt_real("channel.mean_gain", cfg.mean_gain);
  real("channel.distance_m", cfg.distance_m);
  real("channel.g0_db", cfg.g0_db);
  real("channel.path_exp", cfg.path_exp);
  real("channel.nakagami_m", cfg.nakagami_m);

  const std::string method = get("expectation.method").value_or("quadrature");
  double rel_tol = cfg.expectation.rel_tol;
  real("expectation.rel_tol", rel_tol);
  if (method == "quadrature") {
    ExpectationSpec::Quadrature q;
    if (auto v = get("expectation.order")) q.order = static_cast<int>(parse_count("expectation.order", *v));
    cfg.expectation = ExpectationSpec{q, rel_tol};
  } else if (method == "montecarlo") {
    ExpectationSpec::MonteCarlo mc;
    if (auto v = get("expectation.samples")) mc.samples = parse_count("expectation.samples", *v);
    if (auto v = get("expectation.seed")) mc.seed = parse_count("expectation.seed", *v);
    cfg.expectation = ExpectationSpec{mc, rel_tol};
  } else {
    throw config_error("expectation.method: expected quadrature or montecarlo, got '" + method + "'");
  }
  try {
    cfg.expectation.validate();
  } catch (const domain_error& e) {
    throw config_error(std::string("expectation: ") + e.what());
  }

  real("solver.delta", cfg.solver.delta);
  real("solver.c_cap", cfg.solver.c_cap);
  if (auto v = get("output.path")) cfg.output_path = *v;
  return cfg;
}

} // namespace detail

/// "section.key=value" applied on top of the file contents.
inline void apply_override(boost::property_tree::ptree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw config_error("override '" + assignment + "': expected section.key=value");
  const std::string path = detail::trim(assignment.substr(0, eq));
  if (path.find('.') == std::string::npos) throw config_error("override '" + assignment + "': key needs a section");
  tree.put(boost::property_tree::ptree::path_type(path, '.'), detail::trim(assignment.substr(eq + 1)));
}

inline boost::property_tree::ptree read_config_tree(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw config_error(std::string("config syntax: ") + e.what());
  }
  return tree;
}

inline RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {}) {
  auto tree = read_config_tree(in);
  for (const auto& o : overrides) apply_override(tree, o);
  RunConfig cfg = detail::from_tree(tree);
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config(in, overrides);
}

enum class SweepParameter { Kappa, NoiseFigureDb, PStatic, DistanceM, NakagamiM };

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
  case SweepParameter::Kappa: return "kappa";
  case SweepParameter::NoiseFigureDb: return "noise_figure_db";
  case SweepParameter::PStatic: return "p_static";
  case SweepParameter::DistanceM: return "distance_m";
  case SweepParameter::NakagamiM: return "nakagami_m";
  }
  return "unknown";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
  for (auto p : {SweepParameter::Kappa, SweepParameter::NoiseFigureDb, SweepParameter::PStatic,
                 SweepParameter::DistanceM, SweepParameter::NakagamiM})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

struct SweepSpec {
  SweepParameter parameter;
  double start;
  double stop;
  int points;
  bool log_scale = false;

  void validate() const {
    if (!(start < stop)) throw config_error("sweep: start must be below stop");
    if (points < 2) throw config_error("sweep: points must be >= 2");
    if (log_scale && !(start > 0.0)) throw config_error("sweep: log scale needs start > 0");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
      const double frac = static_cast<double>(i) / (points - 1);
      v[i] = log_scale ? start * std::pow(stop / start, frac) : start + (stop - start) * frac;
    }
    v.back() = stop;
    return v;
  }

  // Distance sweeps recompute the mean gain from the path-loss model, so an explicit
  // mean gain (or explicit noise power for noise-figure sweeps) would mask the sweep.
  void apply(RunConfig& cfg, double value) const {
    switch (parameter) {
    case SweepParameter::Kappa: cfg.kappa = value; break;
    case SweepParameter::NoiseFigureDb:
      if (cfg.noise_power_w) throw config_error("sweep noise_figure_db: link.noise_power_w is set explicitly");
      cfg.noise_figure_db = value;
      break;
    case SweepParameter::PStatic: cfg.p_static_w = value; break;
    case SweepParameter::DistanceM:
      if (cfg.mean_gain) throw config_error("sweep distance_m: channel.mean_gain is set explicitly");
      cfg.distance_m = value;
      break;
    case SweepParameter::NakagamiM: cfg.nakagami_m = value; break;
    }
  }
};

} // namespace eeopt
