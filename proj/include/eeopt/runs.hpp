#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eeopt/csv.hpp"
#include "eeopt/ee_optimizer.hpp"
#include "eeopt/run_config.hpp"

namespace eeopt {

namespace detail {

// Runs fn(i) for i in [0, n) on a small thread pool. Results land at their index, so
// output order never depends on scheduling. The first exception (lowest index) wins.
template <class T, class F>
std::vector<T> parallel_indexed(std::size_t n, F&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Re-raises the in-flight library error with a context prefix, keeping its category.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const unbounded_root_error& e) {
    throw unbounded_root_error(context, e);
  } catch (const solver_error& e) {
    throw solver_error(context, e);
  } catch (const numerical_error& e) {
    throw numerical_error(context + ": " + e.what());
  } catch (const domain_error& e) {
    throw domain_error(context + ": " + e.what());
  }
}

inline std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  csv::write_row(os, header);
  for (const auto& r : rows) csv::write_row(os, r);
  return os.str();
}

} // namespace detail

struct OptimizeRow {
  ChannelCase channel_case;
  OptimumResult result;
};

inline std::vector<OptimizeRow> run_optimize(const RunConfig& cfg) {
  cfg.validate();
  return detail::parallel_indexed<OptimizeRow>(cfg.cases.size(), [&](std::size_t i) {
    const ChannelCase c = cfg.cases[i];
    try {
      return OptimizeRow{c, optimize(cfg.link_params(c), cfg.solver)};
    } catch (...) {
      detail::rethrow_with_context("case " + std::string(to_string(c)));
    }
  });
}

inline std::string optimize_csv(const std::vector<OptimizeRow>& rows) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows)
    body.push_back({std::string(to_string(r.channel_case)), csv::format_number(r.result.c_star),
                    csv::format_number(r.result.ee_star), std::to_string(r.result.iterations),
                    csv::format_number(r.result.final_bracket_width)});
  return detail::render({"case", "c_star", "ee_star", "iterations", "final_bracket_width"}, body);
}

inline std::string optimize_summary(const std::vector<OptimizeRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s C* = %.6f bit/s/Hz   EE* = %.6e J/bit   (%d doublings, %d bisections)\n",
                  std::string(to_string(r.channel_case)).c_str(), r.result.c_star, r.result.ee_star,
                  r.result.doubling_steps, r.result.iterations);
    os << line;
  }
  return os.str();
}

struct TradeoffRow {
  ChannelCase channel_case;
  EeSePoint point;
};

inline std::vector<TradeoffRow> run_tradeoff(const RunConfig& cfg, double c_min, double c_max, int points) {
  cfg.validate();
  if (!(c_min >= 0.0)) throw config_error("tradeoff: c_min must be >= 0");
  if (!(c_min < c_max)) throw config_error("tradeoff: c_min must be below c_max");
  if (points < 2) throw config_error("tradeoff: points must be >= 2");

  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = c_min + (c_max - c_min) * i / (points - 1);
  grid.back() = c_max;

  const std::size_t n = cfg.cases.size() * grid.size();
  return detail::parallel_indexed<TradeoffRow>(n, [&](std::size_t k) {
    const ChannelCase c = cfg.cases[k / grid.size()];
    const double se = grid[k % grid.size()];
    try {
      return TradeoffRow{c, evaluate_point(cfg.link_params(c), se)};
    } catch (...) {
      detail::rethrow_with_context("case " + std::string(to_string(c)) + " at C = " + csv::format_number(se));
    }
  });
}

inline std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows)
    body.push_back({std::string(to_string(r.channel_case)), csv::format_number(r.point.c),
                    csv::format_number(r.point.total_power_w), csv::format_number(r.point.ee_j_per_bit),
                    csv::format_number(r.point.gamma_w)});
  return detail::render({"case", "C", "total_power_w", "ee_j_per_bit", "gamma_w"}, body);
}

struct SweepRow {
  ChannelCase channel_case;
  SweepParameter parameter;
  double value;
  OptimumResult result;
};

/// One optimization per (sweep value, case), rows ordered by sweep value then case.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepSpec& sweep) {
  cfg.validate();
  const std::vector<double> values = sweep.values();
  std::vector<RunConfig> per_value;
  for (double v : values) {
    RunConfig c = cfg;
    sweep.apply(c, v);
    try {
      c.validate();
    } catch (const config_error& e) {
      throw config_error(std::string(to_string(sweep.parameter)) + " = " + csv::format_number(v) + ": " + e.what());
    }
    per_value.push_back(std::move(c));
  }

  const std::size_t n = values.size() * cfg.cases.size();
  return detail::parallel_indexed<SweepRow>(n, [&](std::size_t k) {
    const std::size_t vi = k / cfg.cases.size();
    const ChannelCase c = cfg.cases[k % cfg.cases.size()];
    try {
      return SweepRow{c, sweep.parameter, values[vi], optimize(per_value[vi].link_params(c), cfg.solver)};
    } catch (...) {
      detail::rethrow_with_context("sweep " + std::string(to_string(sweep.parameter)) + " = " +
                                   csv::format_number(values[vi]) + ", case " + std::string(to_string(c)));
    }
  });
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows)
    body.push_back({std::string(to_string(r.channel_case)), std::string(to_string(r.parameter)),
                    csv::format_number(r.value), csv::format_number(r.result.c_star),
                    csv::format_number(r.result.ee_star)});
  return detail::render({"case", "sweep_param", "sweep_value", "c_star", "ee_star"}, body);
}

} // namespace eeopt
