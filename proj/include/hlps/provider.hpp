#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlps/error.hpp"
#include "hlps/geometry.hpp"
#include "hlps/messages.hpp"

namespace hlps {

inline constexpr double kDefaultServingRadius = 125.0;

/// The location service provider: a POI catalogue answered by radius query.
struct ProviderModel {
  std::vector<PoiRecord> pois;
  double serving_radius = kDefaultServingRadius;

  friend bool operator==(const ProviderModel&, const ProviderModel&) = default;
};

/// All POIs of the requested category within the serving radius of the
/// query point, nearest first, ties by id.
inline LbsResponse serve_query(const ProviderModel& provider, const LbsQuery& query) {
  if (!(provider.serving_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidValue, "serving radius must be positive");
  }
  struct Hit {
    double dist;
    const PoiRecord* poi;
  };
  std::vector<Hit> hits;
  for (const auto& poi : provider.pois) {
    if (poi.category != query.service) continue;
    const double d = distance(poi.position, query.query_position);
    if (d <= provider.serving_radius) hits.push_back({d, &poi});
  }
  std::ranges::sort(hits, [](const Hit& a, const Hit& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.poi->id < b.poi->id;
  });

  LbsResponse response;
  response.provider = kProviderId;
  response.qu = query.qu;
  response.payload.reserve(hits.size());
  for (const auto& h : hits) response.payload.push_back(*h.poi);
  return response;
}

}  // namespace hlps
