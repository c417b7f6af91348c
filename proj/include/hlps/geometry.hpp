#pragma once

// Planar primitives in metres: distances, centroids, least-squares line fits
// and circle-circle overlap (lens) areas.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <ranges>
#include <span>

#include "hlps/error.hpp"

namespace hlps {

struct Point2D {
  double x = 0.0;  // east
  double y = 0.0;  // north

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline bool is_finite(const Point2D& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

class Circle {
 public:
  Circle(Point2D center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw Error(ErrorCode::kInvalidValue, "circle radius must be positive");
    }
  }

  const Point2D& center() const { return center_; }
  double radius() const { return radius_; }
  double area() const { return std::numbers::pi * radius_ * radius_; }

  friend bool operator==(const Circle&, const Circle&) = default;

 private:
  Point2D center_;
  double radius_;
};

inline double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Component-wise mean of the projected points. Single pass, O(n).
template <std::ranges::input_range R, class Proj = std::identity>
Point2D centroid(R&& points, Proj proj = {}) {
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (auto&& item : points) {
    const Point2D& p = std::invoke(proj, item);
    sx += p.x;
    sy += p.y;
    ++n;
  }
  if (n == 0) {
    throw Error(ErrorCode::kEmptyPointSet, "centroid of an empty point set");
  }
  const auto count = static_cast<double>(n);
  return {sx / count, sy / count};
}

/// Ordinary least-squares fit of y on x. When every x is identical the fit
/// degenerates to the vertical line x = x0 instead of carrying an infinite
/// slope.
struct LineFit {
  enum class Kind { kSloped, kVertical };

  Kind kind = Kind::kSloped;
  double slope = 0.0;
  double intercept = 0.0;
  double x0 = 0.0;
  Point2D centroid;

  bool vertical() const { return kind == Kind::kVertical; }

  /// Perpendicular distance from p to the fitted line.
  double distance_to(const Point2D& p) const {
    if (vertical()) return std::abs(p.x - x0);
    return std::abs(p.y - (slope * p.x + intercept)) /
           std::sqrt(1.0 + slope * slope);
  }
};

inline LineFit ols_fit(std::span<const Point2D> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints,
                "line fit needs at least two points");
  }
  LineFit fit;
  fit.centroid = centroid(points);
  const double mx = fit.centroid.x;
  const double my = fit.centroid.y;

  const bool all_x_equal =
      std::ranges::all_of(points, [&](const Point2D& p) { return p.x == points[0].x; });
  if (all_x_equal) {
    fit.kind = LineFit::Kind::kVertical;
    fit.x0 = mx;
    return fit;
  }

  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mx;
    sxy += dx * (p.y - my);
    sxx += dx * dx;
  }
  fit.kind = LineFit::Kind::kSloped;
  fit.slope = sxy / sxx;
  // Anchored at the centroid, so the centroid is on the line by construction.
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// Branch selection slack on the centre distance, in metres.
inline constexpr double kLensTolerance = 1e-9;

/// Area of the intersection of two circles.
inline double circle_overlap_area(const Circle& c1, const Circle& c2) {
  const double r1 = c1.radius();
  const double r2 = c2.radius();
  const double d = distance(c1.center(), c2.center());

  if (d >= r1 + r2 - kLensTolerance) return 0.0;
  if (d <= std::abs(r1 - r2) + kLensTolerance) {
    const double r = std::min(r1, r2);
    return std::numbers::pi * r * r;
  }

  auto clamped_acos = [](double v) { return std::acos(std::clamp(v, -1.0, 1.0)); };
  const double alpha = clamped_acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
  const double beta = clamped_acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
  const double kite = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  const double area = r1 * r1 * alpha + r2 * r2 * beta - 0.5 * std::sqrt(std::max(kite, 0.0));
  return std::clamp(area, 0.0, std::numbers::pi * std::min(r1, r2) * std::min(r1, r2));
}

/// Share of the interest circle covered by the serving circle, in [0, 1].
inline double overlap_fraction(const Circle& interest, const Circle& serving) {
  return std::clamp(circle_overlap_area(interest, serving) / interest.area(), 0.0, 1.0);
}

}  // namespace hlps
