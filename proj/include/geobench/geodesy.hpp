#pragma once

#include <stdexcept>

namespace geobench {

// IUGG mean Earth radius, km. All distances in this project are great-circle
// distances on a sphere of this radius.
inline constexpr double kEarthRadiusKm = 6371.0088;

inline constexpr int kMaxScore = 5000;

// Latitude/longitude in degrees; construction enforces the valid ranges.
class GeoPoint {
 public:
  GeoPoint(double lat_deg, double lon_deg);
  double lat() const { return lat_; }
  double lon() const { return lon_; }

 private:
  double lat_;
  double lon_;
};

// Exponential-decay score parameters: s_d is the e-folding distance in km,
// d_max the maximum playable distance it was derived from (both > 0).
class ScoreScale {
 public:
  ScoreScale(double s_d_km, double d_max_km);

  // s_d = d_max / ln(5000), so a worst-case guess at d_max scores ⌊≈1⌋.
  static ScoreScale from_max_distance(double d_max_km);
  // Explicit override of s_d; d_max back-derived for reporting.
  static ScoreScale from_scale(double s_d_km);

  double s_d() const { return s_d_; }
  double d_max() const { return d_max_; }

 private:
  double s_d_;
  double d_max_;
};

// Haversine distance in km. Exactly symmetric in its arguments and bounded
// by pi * R.
double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b);

// floor(5000 * exp(-d / s_d)); integer in [0, 5000], non-increasing in d.
// Negative distances are rejected.
int score(double distance_km, const ScoreScale& scale);

ScoreScale derive_scale(double d_max_km);

}  // namespace geobench
