#pragma once

// One collaborative query round:
//   1. every participant broadcasts a lightly obfuscated position and its
//      privacy requirement,
//   2. the participant with the lowest requirement becomes the query user
//      (QU) and queries the provider with the mean of all broadcast
//      positions,
//   3. the QU forwards the provider's response to every other participant.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "hlps/error.hpp"
#include "hlps/geometry.hpp"
#include "hlps/messages.hpp"
#include "hlps/provider.hpp"
#include "hlps/random.hpp"

namespace hlps {

/// Peer-stage blur radius rho(p) = rho_min + p * (rho_max - rho_min).
struct NoiseConfig {
  double rho_min = 5.0;
  double rho_max = 50.0;

  void validate() const {
    if (!(rho_min >= 0.0) || !(rho_max >= rho_min) || !std::isfinite(rho_max)) {
      throw Error(ErrorCode::kBadNoiseConfig, "need 0 <= rho_min <= rho_max");
    }
  }

  double radius(PrivacyLevel p) const { return rho_min + p.value() * (rho_max - rho_min); }

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct ProtocolConfig {
  NoiseConfig noise;
  ServiceTag service;
};

enum class MessageKind { kBroadcast, kQuery, kResponse, kForward };

constexpr std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kBroadcast: return "broadcast";
    case MessageKind::kQuery: return "query";
    case MessageKind::kResponse: return "response";
    case MessageKind::kForward: return "forward";
  }
  return "unknown";
}

struct Endpoint {
  enum class Role { kUser, kProvider };
  Role role = Role::kUser;
  UserId id;

  static Endpoint user(UserId id) { return {Role::kUser, id}; }
  static Endpoint provider() { return {Role::kProvider, kProviderId}; }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// Byte-size classes. Sizes only feed overhead reporting.
inline constexpr std::size_t kBroadcastBytes = 64;
inline constexpr std::size_t kQueryBytes = 64;
inline constexpr std::size_t kResponseBaseBytes = 64;
inline constexpr std::size_t kBytesPerPoi = 16;

inline std::size_t payload_bytes(const Payload& payload) {
  return kResponseBaseBytes + kBytesPerPoi * payload.size();
}

struct TraceEntry {
  MessageKind kind;
  Endpoint sender;
  std::vector<Endpoint> receivers;
  std::size_t bytes = 0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct RoundOutcome {
  std::vector<UserId> participants;
  std::vector<BroadcastMessage> broadcasts;
  UserId elected_qu;
  Point2D final_location;
  LbsQuery query;
  LbsResponse response;
  std::vector<ForwardedResponse> forwards;
  std::vector<TraceEntry> trace;  // every send, in order
  std::map<UserId, Payload> per_user_payloads;

  friend bool operator==(const RoundOutcome&, const RoundOutcome&) = default;
};

/// Displaces the true position by a uniform draw from the disk of radius
/// rho(privacy).
inline Point2D obfuscate(const Point2D& true_position, PrivacyLevel privacy,
                         const NoiseConfig& noise, Rng& rng) {
  noise.validate();
  const Point2D offset = rng.in_disk(noise.radius(privacy));
  return {true_position.x + offset.x, true_position.y + offset.y};
}

inline void check_distinct_senders(std::span<const BroadcastMessage> messages) {
  std::set<UserId> seen;
  for (const auto& m : messages) {
    if (!seen.insert(m.sender).second) {
      throw Error(ErrorCode::kDuplicateSender,
                  "user " + std::to_string(m.sender.value) + " broadcast twice");
    }
  }
}

/// Lowest privacy requirement wins; ties go to the smallest id.
inline UserId elect_qu(std::span<const BroadcastMessage> messages) {
  if (messages.empty()) throw Error(ErrorCode::kNoParticipants, "election with no messages");
  check_distinct_senders(messages);
  const auto best = std::ranges::min_element(messages, [](const auto& a, const auto& b) {
    if (a.privacy != b.privacy) return a.privacy < b.privacy;
    return a.sender < b.sender;
  });
  return best->sender;
}

/// Mean of every broadcast position, the QU's own included. The least-squares
/// line through the positions always passes through this point.
inline Point2D final_location(std::span<const BroadcastMessage> messages) {
  if (messages.empty()) throw Error(ErrorCode::kNoParticipants, "no broadcast positions");
  return centroid(messages, &BroadcastMessage::obfuscated_position);
}

inline LbsQuery build_query(UserId qu, const Point2D& final, const ServiceTag& service) {
  return {qu, final, service};
}

inline std::vector<ForwardedResponse> forward(const LbsResponse& response,
                                              std::span<const UserId> participants) {
  if (std::ranges::find(participants, response.qu) == participants.end()) {
    throw Error(ErrorCode::kQuNotInGroup, "QU is not a participant");
  }
  std::vector<ForwardedResponse> out;
  out.reserve(participants.size() - 1);
  for (const auto& id : participants) {
    if (id == response.qu) continue;
    out.push_back({response.qu, id, response.payload});
  }
  return out;
}

/// Executes a full round over a single-hop full-mesh group.
inline RoundOutcome run_round(std::span<const User> users, const ProviderModel& provider,
                              const ProtocolConfig& config, Rng& rng) {
  if (users.empty()) throw Error(ErrorCode::kNoParticipants, "round with no users");
  config.noise.validate();

  RoundOutcome out;
  out.participants.reserve(users.size());
  for (const auto& u : users) {
    if (!(u.interest_radius > 0.0)) {
      throw Error(ErrorCode::kInvalidValue, "interest radius must be positive");
    }
    out.participants.push_back(u.id);
  }

  auto peers_of = [&](UserId self) {
    std::vector<Endpoint> r;
    for (const auto& id : out.participants) {
      if (id != self) r.push_back(Endpoint::user(id));
    }
    return r;
  };

  out.broadcasts.reserve(users.size());
  for (const auto& u : users) {
    out.broadcasts.push_back({u.id, obfuscate(u.true_position, u.privacy, config.noise, rng),
                              config.service, u.privacy});
    out.trace.push_back({MessageKind::kBroadcast, Endpoint::user(u.id), peers_of(u.id),
                         kBroadcastBytes});
  }

  out.elected_qu = elect_qu(out.broadcasts);
  out.final_location = final_location(out.broadcasts);
  out.query = build_query(out.elected_qu, out.final_location, config.service);
  out.trace.push_back({MessageKind::kQuery, Endpoint::user(out.elected_qu),
                       {Endpoint::provider()}, kQueryBytes});

  out.response = serve_query(provider, out.query);
  out.trace.push_back({MessageKind::kResponse, Endpoint::provider(),
                       {Endpoint::user(out.elected_qu)}, payload_bytes(out.response.payload)});

  out.forwards = forward(out.response, out.participants);
  for (const auto& f : out.forwards) {
    out.trace.push_back({MessageKind::kForward, Endpoint::user(f.qu),
                         {Endpoint::user(f.recipient)}, payload_bytes(f.payload)});
  }

  out.per_user_payloads[out.elected_qu] = out.response.payload;
  for (const auto& f : out.forwards) out.per_user_payloads[f.recipient] = f.payload;
  return out;
}

}  // namespace hlps
