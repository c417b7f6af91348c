#pragma once

// Privacy (entropy), service accuracy (circle overlap), overhead and energy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hlps/error.hpp"
#include "hlps/geometry.hpp"
#include "hlps/messages.hpp"
#include "hlps/protocol.hpp"

namespace hlps {

inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Shannon entropy in bits. Zero-probability terms contribute nothing.
inline double entropy(std::span<const double> probabilities) {
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kNotAProbabilityVector, "probability outside [0, 1]");
    }
    sum += p;
  }
  if (probabilities.empty() || std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw Error(ErrorCode::kNotAProbabilityVector, "probabilities must sum to 1");
  }
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

/// log2(k), the entropy of k indistinguishable candidates.
inline double uniform_entropy(std::uint64_t k) {
  if (k == 0) throw Error(ErrorCode::kBadAnonymitySetSize, "anonymity set must be nonempty");
  return std::log2(static_cast<double>(k));
}

// The provider sees one query point for the whole group, so every member
// hides among all group_size participants.
inline double provider_view_entropy(std::uint64_t group_size) {
  return uniform_entropy(group_size);
}

/// Percentage of the user's interest circle covered by the serving circle
/// centred on the query point.
inline double service_accuracy(const User& user, const Point2D& final, double serving_radius) {
  return 100.0 * overlap_fraction(Circle(user.true_position, user.interest_radius),
                                  Circle(final, serving_radius));
}

struct Overhead {
  std::uint64_t sends = 0;
  std::uint64_t receives = 0;
  std::uint64_t bytes = 0;

  friend bool operator==(const Overhead&, const Overhead&) = default;
};

/// Bytes are counted once per send.
inline Overhead overhead(const RoundOutcome& outcome) {
  Overhead o;
  o.sends = outcome.trace.size();
  for (const auto& m : outcome.trace) {
    o.receives += m.receivers.size();
    o.bytes += m.bytes;
  }
  return o;
}

/// Fixed energy per transmitted and per received message, in joules.
struct EnergyConfig {
  double e_tx = 0.66e-3;
  double e_rx = 0.395e-3;

  void validate() const {
    if (!(e_tx >= 0.0) || !(e_rx >= 0.0)) {
      throw Error(ErrorCode::kInvalidValue, "energy per message must be non-negative");
    }
  }

  friend bool operator==(const EnergyConfig&, const EnergyConfig&) = default;
};

inline double energy(double sends, double receives, const EnergyConfig& config) {
  return sends * config.e_tx + receives * config.e_rx;
}

inline double energy(const Overhead& counts, const EnergyConfig& config) {
  return energy(static_cast<double>(counts.sends), static_cast<double>(counts.receives), config);
}

struct TimingSample {
  std::uint64_t n = 0;
  double median_ms = 0.0;

  friend bool operator==(const TimingSample&, const TimingSample&) = default;
};

/// Per-round metrics. In aggregates the count fields hold per-round means,
/// so they stay comparable across different round counts.
struct MetricsReport {
  double entropy_from_peers = 0.0;     // bits
  double entropy_from_provider = 0.0;  // bits
  std::map<UserId, double> per_user_accuracy;  // percent
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  double sends = 0.0;
  double receives = 0.0;
  double bytes = 0.0;
  double energy = 0.0;  // joules
  std::vector<TimingSample> timing_samples;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline void summarize_accuracy(MetricsReport& report) {
  if (report.per_user_accuracy.empty()) {
    report.mean_accuracy = report.min_accuracy = 0.0;
    return;
  }
  double sum = 0.0;
  double lo = 100.0;
  for (const auto& [id, acc] : report.per_user_accuracy) {
    sum += acc;
    lo = std::min(lo, acc);
  }
  report.mean_accuracy = sum / static_cast<double>(report.per_user_accuracy.size());
  report.min_accuracy = lo;
}

inline MetricsReport evaluate_round(const RoundOutcome& outcome, std::span<const User> users,
                                    double serving_radius, const EnergyConfig& energy_config) {
  MetricsReport r;
  const auto group = static_cast<std::uint64_t>(outcome.participants.size());
  r.entropy_from_peers = uniform_entropy(group);
  r.entropy_from_provider = provider_view_entropy(group);
  for (const auto& u : users) {
    r.per_user_accuracy[u.id] = service_accuracy(u, outcome.final_location, serving_radius);
  }
  summarize_accuracy(r);
  const Overhead o = overhead(outcome);
  r.sends = static_cast<double>(o.sends);
  r.receives = static_cast<double>(o.receives);
  r.bytes = static_cast<double>(o.bytes);
  r.energy = energy(o, energy_config);
  return r;
}

/// Mean over rounds; per-user accuracy is averaged user by user.
inline MetricsReport aggregate(std::span<const MetricsReport> rounds) {
  MetricsReport agg;
  if (rounds.empty()) return agg;
  const auto n = static_cast<double>(rounds.size());
  for (const auto& r : rounds) {
    agg.entropy_from_peers += r.entropy_from_peers;
    agg.entropy_from_provider += r.entropy_from_provider;
    agg.sends += r.sends;
    agg.receives += r.receives;
    agg.bytes += r.bytes;
    agg.energy += r.energy;
    for (const auto& [id, acc] : r.per_user_accuracy) agg.per_user_accuracy[id] += acc;
  }
  agg.entropy_from_peers /= n;
  agg.entropy_from_provider /= n;
  agg.sends /= n;
  agg.receives /= n;
  agg.bytes /= n;
  agg.energy /= n;
  for (auto& [id, acc] : agg.per_user_accuracy) acc /= n;
  summarize_accuracy(agg);
  return agg;
}

}  // namespace hlps
