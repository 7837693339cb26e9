#include "geobench/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace geobench {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kLn5000 = 8.517193191416238;  // ln(5000)
}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
    throw std::invalid_argument("latitude out of range [-90, 90]: " + std::to_string(lat_deg));
  if (!(lon_deg >= -180.0 && lon_deg <= 180.0))
    throw std::invalid_argument("longitude out of range [-180, 180]: " + std::to_string(lon_deg));
}

ScoreScale::ScoreScale(double s_d_km, double d_max_km) : s_d_(s_d_km), d_max_(d_max_km) {
  if (!(s_d_km > 0.0)) throw std::invalid_argument("scale s_d must be positive");
  if (!(d_max_km > 0.0)) throw std::invalid_argument("scale d_max must be positive");
}

ScoreScale ScoreScale::from_max_distance(double d_max_km) {
  if (!(d_max_km > 0.0)) throw std::invalid_argument("d_max must be positive");
  return ScoreScale(d_max_km / kLn5000, d_max_km);
}

ScoreScale ScoreScale::from_scale(double s_d_km) {
  if (!(s_d_km > 0.0)) throw std::invalid_argument("s_d must be positive");
  return ScoreScale(s_d_km, s_d_km * kLn5000);
}

double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat() * kDegToRad;
  const double lat2 = b.lat() * kDegToRad;
  const double dlat = (b.lat() - a.lat()) * kDegToRad;
  const double dlon = (b.lon() - a.lon()) * kDegToRad;

  const double sin_lat = std::sin(dlat / 2.0);
  const double sin_lon = std::sin(dlon / 2.0);
  double h = sin_lat * sin_lat + std::cos(lat1) * std::cos(lat2) * sin_lon * sin_lon;
  h = std::clamp(h, 0.0, 1.0);  // rounding guard near the antipode
  return kEarthRadiusKm * 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

int score(double distance_km, const ScoreScale& scale) {
  if (!(distance_km >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  const double raw = std::exp(-distance_km / scale.s_d()) * kMaxScore;
  return static_cast<int>(std::floor(raw));
}

ScoreScale derive_scale(double d_max_km) { return ScoreScale::from_max_distance(d_max_km); }

}  // namespace geobench
