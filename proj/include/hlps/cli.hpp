#pragma once

// Subcommand bodies for the hlps tool. Each returns a process exit status and
// writes diagnostics to `err`; argument parsing lives in tools/hlps.cpp.

#include <cstdint>
#include <exception>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hlps/config.hpp"
#include "hlps/error.hpp"
#include "hlps/metrics.hpp"
#include "hlps/report.hpp"
#include "hlps/sim.hpp"
#include "hlps/text.hpp"

namespace hlps {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline int emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file_atomically(path, contents);
  }
  return kExitOk;
}

}  // namespace detail

inline int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = generate_scenario(config.scenario);
    const SimulationResult result = run_simulation(scenario);
    const ReportDocument doc = build_report(config, result);
    return detail::emit(config.output.path, encode(doc, config.output.format), out);
  } catch (const std::exception& e) {
    err << "hlps run: " << e.what() << "\n";
    return kExitFailure;
  }
}

/// Parses "key=v1,v2,..." into a grid axis.
inline GridAxis parse_vary(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidValue, "--vary expects key=v1,v2,...");
  }
  GridAxis axis{parse_sweep_param(trim(spec.substr(0, eq))), {}};
  for (auto v : split(spec.substr(eq + 1), ',')) {
    if (v.empty()) throw Error(ErrorCode::kInvalidValue, "empty value in --vary");
    axis.values.emplace_back(v);
  }
  return axis;
}

inline int cmd_sweep(const RunConfig& config, std::span<const GridAxis> grid, std::ostream& out,
                     std::ostream& err) {
  try {
    const auto rows = sweep(config.scenario, grid);
    const std::string body = config.output.format == OutputFormat::kJson ? sweep_json(config, rows)
                                                                         : sweep_csv(rows);
    return detail::emit(config.output.path, body, out);
  } catch (const std::exception& e) {
    err << "hlps sweep: " << e.what() << "\n";
    return kExitFailure;
  }
}

inline int cmd_entropy_table(std::span<const std::uint64_t> k_values, std::ostream& out,
                             std::ostream& err) {
  if (k_values.empty()) {
    err << "hlps entropy-table: no k values given\n";
    return kExitUsage;
  }
  std::string body = csv_line({"k", "entropy_bits"});
  for (const auto k : k_values) {
    if (k == 0) {
      err << "hlps entropy-table: k must be a positive integer\n";
      return kExitFailure;
    }
    body += csv_line({std::to_string(k), format_fixed(uniform_entropy(k), kEntropyDecimals)});
  }
  out << body;
  return kExitOk;
}

inline int cmd_timing(std::span<const std::uint64_t> sizes, std::uint64_t repetitions,
                      std::ostream& out, std::ostream& err) {
  if (repetitions < kMinTimingRepetitions) {
    err << "hlps timing: --reps must be at least " << kMinTimingRepetitions << "\n";
    return kExitUsage;
  }
  try {
    const auto samples = timing_probe(sizes, repetitions);
    std::string body = csv_line({"n", "median_ms"});
    for (const auto& s : samples) body += csv_line({std::to_string(s.n), format_shortest(s.median_ms)});
    if (samples.size() >= 2) {
      const auto fit = linearity(samples);
      body += "# linear fit: slope_ms_per_n=" + format_shortest(fit.slope) +
              " intercept_ms=" + format_shortest(fit.intercept) +
              " r2=" + format_fixed(fit.r_squared, 4) + "\n";
    }
    out << body;
    return kExitOk;
  } catch (const std::exception& e) {
    err << "hlps timing: " << e.what() << "\n";
    return kExitFailure;
  }
}

/// Parses a comma-separated list of positive counts ("1000,10000").
inline std::vector<std::uint64_t> parse_count_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto token : split(text, ',')) {
    const auto v = parse_uint(token);
    if (!v) throw Error(ErrorCode::kInvalidValue, "bad count '" + std::string(token) + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace hlps
