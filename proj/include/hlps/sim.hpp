#pragma once

// Scenario generation, multi-round simulation, parameter sweeps and the
// scaling probe for final-location computation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hlps/error.hpp"
#include "hlps/geometry.hpp"
#include "hlps/messages.hpp"
#include "hlps/metrics.hpp"
#include "hlps/protocol.hpp"
#include "hlps/provider.hpp"
#include "hlps/random.hpp"
#include "hlps/text.hpp"

namespace hlps {

/// Axis-aligned rectangle [0, width] x [0, height].
struct Region {
  double width = 1000.0;
  double height = 1000.0;

  bool contains(const Point2D& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }

  friend bool operator==(const Region&, const Region&) = default;
};

/// How privacy requirements are assigned to generated users. An explicit
/// list is applied cyclically when shorter than the population.
struct PrivacyDistribution {
  struct Uniform {
    friend bool operator==(const Uniform&, const Uniform&) = default;
  };
  struct Fixed {
    double p = 0.5;
    friend bool operator==(const Fixed&, const Fixed&) = default;
  };
  struct Explicit {
    std::vector<double> values;
    friend bool operator==(const Explicit&, const Explicit&) = default;
  };

  std::variant<Uniform, Fixed, Explicit> kind;

  friend bool operator==(const PrivacyDistribution&, const PrivacyDistribution&) = default;
};

/// Text form: "uniform", "fixed:<p>" or "list:<p1> <p2> ...".
inline PrivacyDistribution parse_privacy_distribution(std::string_view text) {
  const std::string_view t = trim(text);
  auto bad = [&]() {
    return Error(ErrorCode::kInvalidValue, "bad privacy distribution '" + std::string(t) + "'");
  };
  auto checked = [&](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw bad();
    return p;
  };
  if (t == "uniform") return {PrivacyDistribution::Uniform{}};
  if (t.starts_with("fixed:")) {
    const auto v = parse_double(t.substr(6));
    if (!v) throw bad();
    return {PrivacyDistribution::Fixed{checked(*v)}};
  }
  if (t.starts_with("list:")) {
    PrivacyDistribution::Explicit list;
    for (auto token : split_ws(t.substr(5))) {
      const auto v = parse_double(token);
      if (!v) throw bad();
      list.values.push_back(checked(*v));
    }
    if (list.values.empty()) throw bad();
    return {std::move(list)};
  }
  throw bad();
}

inline std::string format_privacy_distribution(const PrivacyDistribution& d) {
  struct Visitor {
    std::string operator()(const PrivacyDistribution::Uniform&) const { return "uniform"; }
    std::string operator()(const PrivacyDistribution::Fixed& f) const {
      return "fixed:" + format_shortest(f.p);
    }
    std::string operator()(const PrivacyDistribution::Explicit& e) const {
      std::string s = "list:";
      for (std::size_t i = 0; i < e.values.size(); ++i) {
        if (i) s += ' ';
        s += format_shortest(e.values[i]);
      }
      return s;
    }
  };
  return std::visit(Visitor{}, d.kind);
}

struct ScenarioParams {
  Region region;
  std::uint64_t n_users = 10;
  std::uint64_t n_pois = 2000;
  PrivacyDistribution privacy;
  std::uint64_t seed = 1;
  std::uint64_t rounds = 10;
  NoiseConfig noise;
  ServiceTag service{"restaurant"};
  // Empty means every POI carries the requested service category.
  std::vector<ServiceTag> poi_categories;
  double interest_radius = 125.0;
  double serving_radius = kDefaultServingRadius;
  EnergyConfig energy;

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

struct Scenario {
  Region region;
  std::vector<User> users;
  ProviderModel provider;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  NoiseConfig noise;
  ServiceTag service;
  EnergyConfig energy;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

enum class Stream : std::uint64_t { kScenario = 1, kRound = 2, kTiming = 3 };

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return mix_seed(mix_seed(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

inline void validate(const ScenarioParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kBadScenarioParams, what); };
  if (p.n_users < 1) fail("n_users must be at least 1");
  if (!(p.region.width > 0.0) || !(p.region.height > 0.0) || !std::isfinite(p.region.width) ||
      !std::isfinite(p.region.height)) {
    fail("region dimensions must be positive");
  }
  if (!(p.interest_radius > 0.0) || !std::isfinite(p.interest_radius)) {
    fail("interest_radius must be positive");
  }
  if (!(p.serving_radius > 0.0) || !std::isfinite(p.serving_radius)) {
    fail("serving_radius must be positive");
  }
  try {
    p.noise.validate();
    p.energy.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

}  // namespace detail

/// Users and POIs placed independently and uniformly in the region; a pure
/// function of the parameters. User ids run 1..n_users (0 is the provider).
inline Scenario generate_scenario(const ScenarioParams& params) {
  detail::validate(params);
  Rng rng(detail::derive_seed(params.seed, detail::Stream::kScenario, 0));

  Scenario s;
  s.region = params.region;
  s.seed = params.seed;
  s.rounds = params.rounds;
  s.noise = params.noise;
  s.service = params.service;
  s.energy = params.energy;
  s.provider.serving_radius = params.serving_radius;

  auto draw_point = [&]() {
    const double x = rng.uniform(0.0, params.region.width);
    const double y = rng.uniform(0.0, params.region.height);
    return Point2D{x, y};
  };

  s.users.reserve(params.n_users);
  for (std::uint64_t i = 0; i < params.n_users; ++i) {
    User u;
    u.id = UserId{i + 1};
    u.true_position = draw_point();
    u.interest_radius = params.interest_radius;
    struct Draw {
      Rng& rng;
      std::uint64_t i;
      double operator()(const PrivacyDistribution::Uniform&) const { return rng.uniform(); }
      double operator()(const PrivacyDistribution::Fixed& f) const { return f.p; }
      double operator()(const PrivacyDistribution::Explicit& e) const {
        return e.values[i % e.values.size()];
      }
    };
    u.privacy = PrivacyLevel(std::visit(Draw{rng, i}, params.privacy.kind));
    s.users.push_back(std::move(u));
  }

  s.provider.pois.reserve(params.n_pois);
  for (std::uint64_t i = 0; i < params.n_pois; ++i) {
    PoiRecord poi;
    poi.id = i + 1;
    poi.position = draw_point();
    poi.category = params.poi_categories.empty()
                       ? params.service
                       : params.poi_categories[rng.index(params.poi_categories.size())];
    s.provider.pois.push_back(std::move(poi));
  }
  return s;
}

/// Recall of the payload against the POIs of the requested category inside
/// the user's interest circle. An empty reference set counts as 100%.
inline double empirical_accuracy(const User& user, const Payload& payload,
                                 const ProviderModel& ground_truth, const ServiceTag& service) {
  std::set<std::uint64_t> reference;
  for (const auto& poi : ground_truth.pois) {
    if (poi.category == service && distance(poi.position, user.true_position) <= user.interest_radius) {
      reference.insert(poi.id);
    }
  }
  if (reference.empty()) return 100.0;
  std::size_t hit = 0;
  for (const auto& poi : payload) hit += reference.count(poi.id);
  return 100.0 * static_cast<double>(hit) / static_cast<double>(reference.size());
}

struct RoundRecord {
  RoundOutcome outcome;
  MetricsReport metrics;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SimulationResult {
  std::vector<RoundRecord> per_round;
  MetricsReport aggregate;

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

/// Independent rounds over static users; each round draws fresh obfuscation
/// from its own derived seed.
inline SimulationResult run_simulation(const Scenario& scenario) {
  SimulationResult result;
  const ProtocolConfig config{scenario.noise, scenario.service};
  result.per_round.reserve(scenario.rounds);
  std::vector<MetricsReport> reports;
  reports.reserve(scenario.rounds);
  for (std::uint64_t r = 0; r < scenario.rounds; ++r) {
    Rng rng(detail::derive_seed(scenario.seed, detail::Stream::kRound, r));
    RoundRecord rec;
    rec.outcome = run_round(scenario.users, scenario.provider, config, rng);
    rec.metrics = evaluate_round(rec.outcome, scenario.users, scenario.provider.serving_radius,
                                 scenario.energy);
    reports.push_back(rec.metrics);
    result.per_round.push_back(std::move(rec));
  }
  result.aggregate = aggregate(reports);
  return result;
}

enum class SweepParam { kNUsers, kRhoMax, kServingRadius, kPrivacy };

inline std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kNUsers: return "n_users";
    case SweepParam::kRhoMax: return "rho_max";
    case SweepParam::kServingRadius: return "serving_radius";
    case SweepParam::kPrivacy: return "privacy";
  }
  return "unknown";
}

inline SweepParam parse_sweep_param(std::string_view name) {
  for (auto p : {SweepParam::kNUsers, SweepParam::kRhoMax, SweepParam::kServingRadius,
                 SweepParam::kPrivacy}) {
    if (name == to_string(p)) return p;
  }
  throw Error(ErrorCode::kInvalidValue, "cannot sweep over '" + std::string(name) + "'");
}

struct GridAxis {
  SweepParam param;
  std::vector<std::string> values;

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

inline void apply_setting(ScenarioParams& params, SweepParam param, std::string_view value) {
  auto number = [&]() {
    const auto v = parse_double(value);
    if (!v) throw Error(ErrorCode::kInvalidValue, "bad sweep value '" + std::string(value) + "'");
    return *v;
  };
  switch (param) {
    case SweepParam::kNUsers: {
      const auto v = parse_uint(value);
      if (!v) throw Error(ErrorCode::kInvalidValue, "bad n_users '" + std::string(value) + "'");
      params.n_users = *v;
      break;
    }
    case SweepParam::kRhoMax: params.noise.rho_max = number(); break;
    case SweepParam::kServingRadius: params.serving_radius = number(); break;
    case SweepParam::kPrivacy: params.privacy = parse_privacy_distribution(value); break;
  }
}

struct SweepRow {
  std::vector<std::pair<SweepParam, std::string>> point;
  std::uint64_t seed = 0;
  MetricsReport aggregate;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Cartesian product of the axes, last axis fastest. Every point places its
/// population from base.seed, so points differ only in the swept parameter;
/// point i draws its rounds from seed base.seed + i. Rows are returned in
/// grid order; with `parallel` the points are evaluated concurrently.
inline std::vector<SweepRow> sweep(const ScenarioParams& base, std::span<const GridAxis> grid,
                                   bool parallel = false) {
  if (grid.empty()) throw Error(ErrorCode::kBadScenarioParams, "empty sweep grid");
  std::size_t total = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw Error(ErrorCode::kBadScenarioParams,
                  "no values for sweep axis " + std::string(to_string(axis.param)));
    }
    total *= axis.values.size();
  }

  std::vector<SweepRow> rows(total);
  std::vector<ScenarioParams> points(total, base);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (std::size_t a = grid.size(); a-- > 0;) {
      const auto& axis = grid[a];
      const auto& value = axis.values[rem % axis.values.size()];
      rem /= axis.values.size();
      apply_setting(points[i], axis.param, value);
      rows[i].point.insert(rows[i].point.begin(), {axis.param, value});
    }
    rows[i].seed = base.seed + i;
  }

  auto evaluate = [&](std::size_t i) {
    Scenario scenario = generate_scenario(points[i]);
    scenario.seed = rows[i].seed;
    return run_simulation(scenario).aggregate;
  };
  if (parallel) {
    std::vector<std::future<MetricsReport>> jobs;
    jobs.reserve(total);
    for (std::size_t i = 0; i < total; ++i) jobs.push_back(std::async(std::launch::async, evaluate, i));
    for (std::size_t i = 0; i < total; ++i) rows[i].aggregate = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < total; ++i) rows[i].aggregate = evaluate(i);
  }
  return rows;
}

inline constexpr std::uint64_t kMinTimingRepetitions = 3;

/// Median wall time of final_location over n synthetic broadcasts, for each
/// n. Every sample streams the same arena of at least 2^20 messages, split
/// into consecutive groups of n with one call per group, so all sizes are
/// measured in the same cache regime. Reported times are per call.
inline std::vector<TimingSample> timing_probe(std::span<const std::uint64_t> sizes,
                                              std::uint64_t repetitions) {
  if (sizes.empty()) throw Error(ErrorCode::kBadTimingParams, "no sizes to probe");
  if (repetitions < kMinTimingRepetitions) {
    throw Error(ErrorCode::kBadTimingParams, "at least 3 repetitions are required");
  }
  if (std::ranges::find(sizes, std::uint64_t{0}) != sizes.end()) {
    throw Error(ErrorCode::kBadTimingParams, "sizes must be at least 1");
  }

  const std::uint64_t arena_size = std::max<std::uint64_t>(std::ranges::max(sizes), 1u << 20);
  Rng rng(detail::derive_seed(0, detail::Stream::kTiming, 0));
  const ServiceTag service("probe");
  std::vector<BroadcastMessage> arena;
  arena.reserve(arena_size);
  for (std::uint64_t i = 0; i < arena_size; ++i) {
    arena.push_back({UserId{i + 1}, {rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)}, service,
                     PrivacyLevel(rng.uniform())});
  }
  const std::span<const BroadcastMessage> all(arena);

  std::vector<TimingSample> out;
  volatile double sink = 0.0;
  for (const auto n : sizes) {
    const std::uint64_t groups = arena_size / n;
    auto pass = [&]() {
      double acc = 0.0;
      for (std::uint64_t g = 0; g < groups; ++g) acc += final_location(all.subspan(g * n, n)).x;
      sink = sink + acc;
    };
    pass();  // warm-up

    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::uint64_t r = 0; r < repetitions; ++r) {
      const auto start = std::chrono::steady_clock::now();
      pass();
      const auto stop = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count() /
                        static_cast<double>(groups));
    }
    std::ranges::nth_element(samples, samples.begin() + samples.size() / 2);
    out.push_back({n, samples[samples.size() / 2]});
  }
  return out;
}

struct LinearityDiagnostic {
  double slope = 0.0;      // ms per element
  double intercept = 0.0;  // ms
  double r_squared = 0.0;
};

/// Least-squares fit of median time against n.
inline LinearityDiagnostic linearity(std::span<const TimingSample> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::kInsufficientPoints, "need two timing samples");
  std::vector<Point2D> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back({static_cast<double>(s.n), s.median_ms});
  const LineFit fit = ols_fit(pts);
  LinearityDiagnostic d;
  if (fit.vertical()) return d;
  d.slope = fit.slope;
  d.intercept = fit.intercept;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto& p : pts) {
    const double r = p.y - (fit.slope * p.x + fit.intercept);
    ss_res += r * r;
    ss_tot += (p.y - fit.centroid.y) * (p.y - fit.centroid.y);
  }
  d.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return d;
}

/// Growth factor per doubling of n between consecutive samples.
inline double per_doubling_growth(const TimingSample& a, const TimingSample& b) {
  const double doublings = std::log2(static_cast<double>(b.n) / static_cast<double>(a.n));
  return std::pow(b.median_ms / a.median_ms, 1.0 / doublings);
}

}  // namespace hlps
