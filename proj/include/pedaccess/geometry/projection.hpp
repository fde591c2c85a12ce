#ifndef PEDACCESS_GEOMETRY_PROJECTION_HPP
#define PEDACCESS_GEOMETRY_PROJECTION_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/point.hpp"

namespace pedaccess {

/// UTM zone context shared by every projected coordinate of a region.
struct UtmZone {
  int number = 31;
  bool south = false;

  friend bool operator==(const UtmZone&, const UtmZone&) = default;

  double central_meridian() const { return -183.0 + 6.0 * number; }
  std::string name() const { return std::to_string(number) + (south ? "S" : "N"); }
};

inline int utm_zone_for(double lon) {
  const int z = static_cast<int>(std::floor((lon + 180.0) / 6.0)) + 1;
  return std::clamp(z, 1, 60);
}

inline UtmZone utm_zone_for(LatLon ll) { return {utm_zone_for(ll.lon), ll.lat < 0.0}; }

namespace detail {

// Krueger series for the WGS84 ellipsoid, sixth order in the third flattening.
struct TmSeries {
  double a_rect;  // rectifying radius
  double e;       // first eccentricity
  std::array<double, 6> alpha;
  std::array<double, 6> beta;
};

inline const TmSeries& wgs84_series() {
  static const TmSeries s = [] {
    constexpr double a = 6378137.0;
    constexpr double f = 1.0 / 298.257223563;
    const double n = f / (2.0 - f);
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    TmSeries t{};
    t.a_rect = a / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    t.e = std::sqrt(f * (2.0 - f));
    t.alpha = {n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
               13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
               61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
               49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
               34729 * n5 / 80640 - 3418889 * n6 / 1995840,
               212378941 * n6 / 319334400};
    t.beta = {n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
              n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
              17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
              4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
              4583 * n5 / 161280 - 108847 * n6 / 3991680,
              20648693 * n6 / 638668800};
    return t;
  }();
  return s;
}

inline constexpr double kScale = 0.9996;
inline constexpr double kFalseEasting = 500000.0;
inline constexpr double kFalseNorthingSouth = 10000000.0;
inline constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace detail

/// Forward UTM mapping. Throws Error for |lat| > 84.
inline Point project(LatLon ll, const UtmZone& zone) {
  if (!(std::abs(ll.lat) <= 84.0)) throw Error("latitude out of supported band: " + std::to_string(ll.lat));
  const auto& s = detail::wgs84_series();
  const double phi = ll.lat * detail::kDeg;
  double dlon = ll.lon - zone.central_meridian();
  dlon = std::remainder(dlon, 360.0);
  const double lam = dlon * detail::kDeg;

  const double sphi = std::sin(phi);
  const double t = std::sinh(std::atanh(sphi) - s.e * std::atanh(s.e * sphi));
  const double xi_p = std::atan2(t, std::cos(lam));
  const double eta_p = std::atanh(std::sin(lam) / std::sqrt(1.0 + t * t));

  double xi = xi_p;
  double eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    xi += a * std::sin(2 * j * xi_p) * std::cosh(2 * j * eta_p);
    eta += a * std::cos(2 * j * xi_p) * std::sinh(2 * j * eta_p);
  }
  Point p{detail::kFalseEasting + detail::kScale * s.a_rect * eta, detail::kScale * s.a_rect * xi};
  if (zone.south) p.y += detail::kFalseNorthingSouth;
  return p;
}

inline LatLon unproject(Point p, const UtmZone& zone) {
  const auto& s = detail::wgs84_series();
  const double northing = zone.south ? p.y - detail::kFalseNorthingSouth : p.y;
  const double xi = northing / (detail::kScale * s.a_rect);
  const double eta = (p.x - detail::kFalseEasting) / (detail::kScale * s.a_rect);

  double xi_p = xi;
  double eta_p = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[j - 1];
    xi_p -= b * std::sin(2 * j * xi) * std::cosh(2 * j * eta);
    eta_p -= b * std::cos(2 * j * xi) * std::sinh(2 * j * eta);
  }
  const double sinh_eta = std::sinh(eta_p);
  const double cos_xi = std::cos(xi_p);
  const double tau_p = std::sin(xi_p) / std::hypot(sinh_eta, cos_xi);
  const double lam = std::atan2(sinh_eta, cos_xi);

  // Newton iteration for tan(phi) from the conformal tan(phi').
  const double e2m = 1.0 - s.e * s.e;
  double tau = tau_p;
  for (int i = 0; i < 8; ++i) {
    const double tau1 = std::hypot(1.0, tau);
    const double sig = std::sinh(s.e * std::atanh(s.e * tau / tau1));
    const double taupa = std::hypot(1.0, sig) * tau - sig * tau1;
    const double dtau = (tau_p - taupa) / std::hypot(1.0, taupa) * (1.0 + e2m * tau * tau) /
                        (e2m * tau1);
    tau += dtau;
    if (std::abs(dtau) < 1e-14 * std::max(1.0, std::abs(tau))) break;
  }
  return {std::atan(tau) / detail::kDeg, zone.central_meridian() + lam / detail::kDeg};
}

}  // namespace pedaccess

#endif  // PEDACCESS_GEOMETRY_PROJECTION_HPP
