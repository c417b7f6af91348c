#pragma once

// Identities and the wire-level records exchanged during a round.

#include <compare>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hlps/error.hpp"
#include "hlps/geometry.hpp"

namespace hlps {

struct UserId {
  std::uint64_t value = 0;

  friend auto operator<=>(const UserId&, const UserId&) = default;
};

// Id carried in responses on behalf of the provider.
inline constexpr UserId kProviderId{0};

/// Privacy requirement in [0, 1]; higher means stronger.
class PrivacyLevel {
 public:
  PrivacyLevel() = default;
  explicit PrivacyLevel(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidValue, "privacy level must lie in [0, 1]");
    }
  }

  double value() const { return p_; }

  friend auto operator<=>(const PrivacyLevel&, const PrivacyLevel&) = default;

 private:
  double p_ = 0.0;
};

/// Requested service, e.g. "restaurant".
class ServiceTag {
 public:
  ServiceTag() : tag_("poi") {}
  explicit ServiceTag(std::string tag) : tag_(std::move(tag)) {
    if (tag_.empty()) throw Error(ErrorCode::kInvalidValue, "service tag must be nonempty");
  }

  const std::string& str() const { return tag_; }

  friend auto operator<=>(const ServiceTag&, const ServiceTag&) = default;

 private:
  std::string tag_;
};

struct PoiRecord {
  std::uint64_t id = 0;
  Point2D position;
  ServiceTag category;

  friend bool operator==(const PoiRecord&, const PoiRecord&) = default;
};

using Payload = std::vector<PoiRecord>;

struct User {
  UserId id;
  Point2D true_position;
  PrivacyLevel privacy;
  double interest_radius = 125.0;

  friend bool operator==(const User&, const User&) = default;
};

// M = {ID, (x, y), r, p}
struct BroadcastMessage {
  UserId sender;
  Point2D obfuscated_position;
  ServiceTag service;
  PrivacyLevel privacy;

  friend bool operator==(const BroadcastMessage&, const BroadcastMessage&) = default;
};

struct LbsQuery {
  UserId qu;
  Point2D query_position;
  ServiceTag service;

  friend bool operator==(const LbsQuery&, const LbsQuery&) = default;
};

// R = {ID_p, ID_QU, response}
struct LbsResponse {
  UserId provider = kProviderId;
  UserId qu;
  Payload payload;

  friend bool operator==(const LbsResponse&, const LbsResponse&) = default;
};

// R_f = {ID_qu, ID_i, response}
struct ForwardedResponse {
  UserId qu;
  UserId recipient;
  Payload payload;

  friend bool operator==(const ForwardedResponse&, const ForwardedResponse&) = default;
};

}  // namespace hlps
