#pragma once

// Report documents and their JSON / CSV encodings.
//
// Numbers are rounded once, when the document is built (entropy 5 places,
// accuracy 2, energy in millijoules 3, coordinates 3), so both encodings
// carry identical values. The CSV form is a single long table
//   table,round,subject,metric,value
// with one row per scalar.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "hlps/config.hpp"
#include "hlps/error.hpp"
#include "hlps/metrics.hpp"
#include "hlps/sim.hpp"
#include "hlps/text.hpp"

namespace hlps {

inline constexpr std::string_view kToolName = "hlps";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline constexpr int kEntropyDecimals = 5;
inline constexpr int kAccuracyDecimals = 2;
inline constexpr int kEnergyDecimals = 3;
inline constexpr int kCoordinateDecimals = 3;

struct MetricsSummary {
  double entropy_from_peers = 0.0;
  double entropy_from_provider = 0.0;
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  double sends = 0.0;
  double receives = 0.0;
  double bytes = 0.0;
  double energy_mj = 0.0;
  std::map<std::uint64_t, double> per_user_accuracy;

  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

struct RoundSummary {
  std::uint64_t round = 0;
  std::uint64_t elected_qu = 0;
  double final_x = 0.0;
  double final_y = 0.0;
  MetricsSummary metrics;

  friend bool operator==(const RoundSummary&, const RoundSummary&) = default;
};

struct TraceRow {
  std::uint64_t round = 0;
  std::uint64_t index = 0;
  std::string kind;
  std::string sender;                  // "u<id>" or "provider"
  std::vector<std::string> receivers;  // same naming
  std::uint64_t bytes = 0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct ReportDocument {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::uint64_t seed = 0;
  std::string config;  // canonical config text; reproduces the run
  MetricsSummary aggregate;
  std::vector<RoundSummary> rounds;
  std::optional<std::vector<TraceRow>> trace;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

inline MetricsSummary summarize(const MetricsReport& m) {
  MetricsSummary s;
  s.entropy_from_peers = round_to(m.entropy_from_peers, kEntropyDecimals);
  s.entropy_from_provider = round_to(m.entropy_from_provider, kEntropyDecimals);
  s.mean_accuracy = round_to(m.mean_accuracy, kAccuracyDecimals);
  s.min_accuracy = round_to(m.min_accuracy, kAccuracyDecimals);
  s.sends = m.sends;
  s.receives = m.receives;
  s.bytes = m.bytes;
  s.energy_mj = round_to(m.energy * 1e3, kEnergyDecimals);
  for (const auto& [id, acc] : m.per_user_accuracy) {
    s.per_user_accuracy[id.value] = round_to(acc, kAccuracyDecimals);
  }
  return s;
}

inline std::string endpoint_name(const Endpoint& e) {
  return e.role == Endpoint::Role::kProvider ? "provider" : "u" + std::to_string(e.id.value);
}

/// The run configuration minus its output destination, which does not
/// affect the report's contents.
inline RunConfig config_echo(const RunConfig& cfg) {
  RunConfig echo = cfg;
  echo.output = OutputSpec{};
  return echo;
}

inline ReportDocument build_report(const RunConfig& cfg, const SimulationResult& result) {
  ReportDocument doc;
  doc.seed = cfg.scenario.seed;
  doc.config = serialize_config(config_echo(cfg));
  doc.aggregate = summarize(result.aggregate);
  if (cfg.emit_trace) doc.trace.emplace();
  for (std::size_t r = 0; r < result.per_round.size(); ++r) {
    const auto& rec = result.per_round[r];
    RoundSummary rs;
    rs.round = r;
    rs.elected_qu = rec.outcome.elected_qu.value;
    rs.final_x = round_to(rec.outcome.final_location.x, kCoordinateDecimals);
    rs.final_y = round_to(rec.outcome.final_location.y, kCoordinateDecimals);
    rs.metrics = summarize(rec.metrics);
    doc.rounds.push_back(std::move(rs));
    if (doc.trace) {
      for (std::size_t i = 0; i < rec.outcome.trace.size(); ++i) {
        const auto& m = rec.outcome.trace[i];
        TraceRow row{r, i, std::string(to_string(m.kind)), endpoint_name(m.sender), {}, m.bytes};
        for (const auto& e : m.receivers) row.receivers.push_back(endpoint_name(e));
        doc.trace->push_back(std::move(row));
      }
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::ordered_json metrics_json(const MetricsSummary& m) {
  nlohmann::ordered_json j;
  j["entropy_from_peers"] = m.entropy_from_peers;
  j["entropy_from_provider"] = m.entropy_from_provider;
  j["mean_accuracy"] = m.mean_accuracy;
  j["min_accuracy"] = m.min_accuracy;
  j["sends"] = m.sends;
  j["receives"] = m.receives;
  j["bytes"] = m.bytes;
  j["energy_mj"] = m.energy_mj;
  auto& acc = j["per_user_accuracy"] = nlohmann::ordered_json::object();
  for (const auto& [id, a] : m.per_user_accuracy) acc[std::to_string(id)] = a;
  return j;
}

inline MetricsSummary metrics_from_json(const nlohmann::json& j) {
  MetricsSummary m;
  m.entropy_from_peers = j.at("entropy_from_peers").get<double>();
  m.entropy_from_provider = j.at("entropy_from_provider").get<double>();
  m.mean_accuracy = j.at("mean_accuracy").get<double>();
  m.min_accuracy = j.at("min_accuracy").get<double>();
  m.sends = j.at("sends").get<double>();
  m.receives = j.at("receives").get<double>();
  m.bytes = j.at("bytes").get<double>();
  m.energy_mj = j.at("energy_mj").get<double>();
  for (const auto& [id, a] : j.at("per_user_accuracy").items()) {
    m.per_user_accuracy[std::stoull(id)] = a.get<double>();
  }
  return m;
}

}  // namespace detail

inline std::string to_json(const ReportDocument& doc) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"tool", doc.tool}, {"version", doc.version}, {"seed", doc.seed}, {"config", doc.config}};
  j["aggregate"] = detail::metrics_json(doc.aggregate);
  auto& rounds = j["rounds"] = nlohmann::ordered_json::array();
  for (const auto& r : doc.rounds) {
    nlohmann::ordered_json jr;
    jr["round"] = r.round;
    jr["elected_qu"] = r.elected_qu;
    jr["final_location"] = {r.final_x, r.final_y};
    jr["metrics"] = detail::metrics_json(r.metrics);
    rounds.push_back(std::move(jr));
  }
  if (doc.trace) {
    auto& trace = j["trace"] = nlohmann::ordered_json::array();
    for (const auto& t : *doc.trace) {
      trace.push_back({{"round", t.round},
                       {"index", t.index},
                       {"kind", t.kind},
                       {"sender", t.sender},
                       {"receivers", t.receivers},
                       {"bytes", t.bytes}});
    }
  }
  return j.dump(2) + "\n";
}

inline ReportDocument report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ReportDocument doc;
    const auto& meta = j.at("metadata");
    doc.tool = meta.at("tool").get<std::string>();
    doc.version = meta.at("version").get<std::string>();
    doc.seed = meta.at("seed").get<std::uint64_t>();
    doc.config = meta.at("config").get<std::string>();
    doc.aggregate = detail::metrics_from_json(j.at("aggregate"));
    for (const auto& jr : j.at("rounds")) {
      RoundSummary r;
      r.round = jr.at("round").get<std::uint64_t>();
      r.elected_qu = jr.at("elected_qu").get<std::uint64_t>();
      r.final_x = jr.at("final_location").at(0).get<double>();
      r.final_y = jr.at("final_location").at(1).get<double>();
      r.metrics = detail::metrics_from_json(jr.at("metrics"));
      doc.rounds.push_back(std::move(r));
    }
    if (j.contains("trace")) {
      doc.trace.emplace();
      for (const auto& jt : j.at("trace")) {
        doc.trace->push_back({jt.at("round").get<std::uint64_t>(), jt.at("index").get<std::uint64_t>(),
                              jt.at("kind").get<std::string>(), jt.at("sender").get<std::string>(),
                              jt.at("receivers").get<std::vector<std::string>>(),
                              jt.at("bytes").get<std::uint64_t>()});
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidValue, std::string("malformed JSON report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180)

using CsvRow = std::vector<std::string>;

inline std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_line(const CsvRow& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += csv_field(row[i]);
  }
  return line + "\r\n";
}

inline std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool row_open = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    row_open = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      row_open = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kInvalidValue, "unterminated quoted CSV field");
  if (row_open) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const CsvRow kReportCsvHeader = {"table", "round", "subject", "metric", "value"};

namespace detail {

inline void metrics_rows(std::string& out, const std::string& table, const std::string& round,
                         const MetricsSummary& m) {
  auto row = [&](const std::string& metric, double v) {
    out += csv_line({table, round, "", metric, format_shortest(v)});
  };
  row("entropy_from_peers", m.entropy_from_peers);
  row("entropy_from_provider", m.entropy_from_provider);
  row("mean_accuracy", m.mean_accuracy);
  row("min_accuracy", m.min_accuracy);
  row("sends", m.sends);
  row("receives", m.receives);
  row("bytes", m.bytes);
  row("energy_mj", m.energy_mj);
  for (const auto& [id, a] : m.per_user_accuracy) {
    out += csv_line({table, round, std::to_string(id), "accuracy", format_shortest(a)});
  }
}

inline std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? " " : "") + names[i];
  return s;
}

}  // namespace detail

inline std::string to_csv(const ReportDocument& doc) {
  std::string out = csv_line(kReportCsvHeader);
  out += csv_line({"meta", "", "", "tool", doc.tool});
  out += csv_line({"meta", "", "", "version", doc.version});
  out += csv_line({"meta", "", "", "seed", std::to_string(doc.seed)});
  out += csv_line({"meta", "", "", "config", doc.config});
  detail::metrics_rows(out, "aggregate", "", doc.aggregate);
  for (const auto& r : doc.rounds) {
    const auto round = std::to_string(r.round);
    out += csv_line({"round", round, "", "elected_qu", std::to_string(r.elected_qu)});
    out += csv_line({"round", round, "", "final_x", format_shortest(r.final_x)});
    out += csv_line({"round", round, "", "final_y", format_shortest(r.final_y)});
    detail::metrics_rows(out, "round", round, r.metrics);
  }
  if (doc.trace) {
    for (const auto& t : *doc.trace) {
      const auto round = std::to_string(t.round);
      const auto index = std::to_string(t.index);
      out += csv_line({"trace", round, index, "kind", t.kind});
      out += csv_line({"trace", round, index, "sender", t.sender});
      out += csv_line({"trace", round, index, "receivers", detail::join_names(t.receivers)});
      out += csv_line({"trace", round, index, "bytes", std::to_string(t.bytes)});
    }
  }
  return out;
}

inline ReportDocument report_from_csv(std::string_view text) {
  const auto rows = read_csv(text);
  if (rows.empty() || rows.front() != kReportCsvHeader) {
    throw Error(ErrorCode::kInvalidValue, "CSV report header missing");
  }
  auto number = [](const std::string& s) {
    const auto v = parse_double(s);
    if (!v) throw Error(ErrorCode::kInvalidValue, "bad number '" + s + "' in CSV report");
    return *v;
  };
  auto integer = [](const std::string& s) {
    const auto v = parse_uint(s);
    if (!v) throw Error(ErrorCode::kInvalidValue, "bad integer '" + s + "' in CSV report");
    return *v;
  };
  auto set_metric = [&](MetricsSummary& m, const CsvRow& row) {
    const auto& metric = row[3];
    const double v = number(row[4]);
    if (metric == "accuracy") m.per_user_accuracy[integer(row[2])] = v;
    else if (metric == "entropy_from_peers") m.entropy_from_peers = v;
    else if (metric == "entropy_from_provider") m.entropy_from_provider = v;
    else if (metric == "mean_accuracy") m.mean_accuracy = v;
    else if (metric == "min_accuracy") m.min_accuracy = v;
    else if (metric == "sends") m.sends = v;
    else if (metric == "receives") m.receives = v;
    else if (metric == "bytes") m.bytes = v;
    else if (metric == "energy_mj") m.energy_mj = v;
    else throw Error(ErrorCode::kInvalidValue, "unknown metric '" + metric + "' in CSV report");
  };

  ReportDocument doc;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != kReportCsvHeader.size()) {
      throw Error(ErrorCode::kInvalidValue, "CSV report row " + std::to_string(i + 1) + " has wrong width");
    }
    const auto& table = row[0];
    if (table == "meta") {
      if (row[3] == "tool") doc.tool = row[4];
      else if (row[3] == "version") doc.version = row[4];
      else if (row[3] == "seed") doc.seed = integer(row[4]);
      else if (row[3] == "config") doc.config = row[4];
    } else if (table == "aggregate") {
      set_metric(doc.aggregate, row);
    } else if (table == "round") {
      const auto r = integer(row[1]);
      if (doc.rounds.empty() || doc.rounds.back().round != r) {
        doc.rounds.push_back({});
        doc.rounds.back().round = r;
      }
      auto& rs = doc.rounds.back();
      if (row[3] == "elected_qu") rs.elected_qu = integer(row[4]);
      else if (row[3] == "final_x") rs.final_x = number(row[4]);
      else if (row[3] == "final_y") rs.final_y = number(row[4]);
      else set_metric(rs.metrics, row);
    } else if (table == "trace") {
      if (!doc.trace) doc.trace.emplace();
      const auto r = integer(row[1]);
      const auto idx = integer(row[2]);
      if (doc.trace->empty() || doc.trace->back().round != r || doc.trace->back().index != idx) {
        doc.trace->push_back({r, idx, "", "", {}, 0});
      }
      auto& t = doc.trace->back();
      if (row[3] == "kind") t.kind = row[4];
      else if (row[3] == "sender") t.sender = row[4];
      else if (row[3] == "bytes") t.bytes = integer(row[4]);
      else if (row[3] == "receivers") {
        for (auto name : split_ws(row[4])) t.receivers.emplace_back(name);
      }
    } else {
      throw Error(ErrorCode::kInvalidValue, "unknown table '" + table + "' in CSV report");
    }
  }
  return doc;
}

inline std::string encode(const ReportDocument& doc, OutputFormat format) {
  return format == OutputFormat::kJson ? to_json(doc) : to_csv(doc);
}

// ---------------------------------------------------------------------------
// Sweep tables

inline std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out;
  if (rows.empty()) return out;
  CsvRow header;
  for (const auto& [param, value] : rows.front().point) header.emplace_back(to_string(param));
  for (const char* col : {"seed", "entropy_from_peers", "entropy_from_provider", "mean_accuracy",
                          "min_accuracy", "sends", "receives", "bytes", "energy_mj"}) {
    header.emplace_back(col);
  }
  out += csv_line(header);
  for (const auto& row : rows) {
    const MetricsSummary m = summarize(row.aggregate);
    CsvRow line;
    for (const auto& [param, value] : row.point) line.push_back(value);
    line.push_back(std::to_string(row.seed));
    for (double v : {m.entropy_from_peers, m.entropy_from_provider, m.mean_accuracy, m.min_accuracy,
                     m.sends, m.receives, m.bytes, m.energy_mj}) {
      line.push_back(format_shortest(v));
    }
    out += csv_line(line);
  }
  return out;
}

inline std::string sweep_json(const RunConfig& base, std::span<const SweepRow> rows) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"tool", kToolName}, {"version", kToolVersion}, {"seed", base.scenario.seed},
                   {"config", serialize_config(config_echo(base))}};
  auto& out = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json jr;
    auto& point = jr["point"] = nlohmann::ordered_json::object();
    for (const auto& [param, value] : row.point) point[std::string(to_string(param))] = value;
    jr["seed"] = row.seed;
    jr["aggregate"] = detail::metrics_json(summarize(row.aggregate));
    out.push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Output

/// Writes to a sibling temporary and renames it into place, so the target
/// either holds the complete contents or is left untouched.
inline void write_file_atomically(const std::filesystem::path& target, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw Error(ErrorCode::kIo, "cannot move report into '" + target.string() + "': " + ec.message());
  }
}

}  // namespace hlps
