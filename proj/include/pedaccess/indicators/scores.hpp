#ifndef PEDACCESS_INDICATORS_SCORES_HPP
#define PEDACCESS_INDICATORS_SCORES_HPP

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pedaccess/error.hpp"

namespace pedaccess {

enum class AccessMethod { binary, soft, gaussian };

inline std::string to_string(AccessMethod m) {
  switch (m) {
    case AccessMethod::binary:
      return "binary";
    case AccessMethod::soft:
      return "soft";
    case AccessMethod::gaussian:
      return "gaussian";
  }
  return "binary";
}

inline AccessMethod parse_access_method(std::string_view s) {
  if (s == "binary") return AccessMethod::binary;
  if (s == "soft") return AccessMethod::soft;
  if (s == "gaussian") return AccessMethod::gaussian;
  throw ConfigError("unknown access_method '" + std::string(s) + "' (expected binary, soft or gaussian)");
}

struct AccessParams {
  double t = 500.0;
  double k = 5.0;
  double v = 129842.0;

  void validate() const {
    if (!(t > 0) || !(k > 0) || !(v > 0)) throw ConfigError("access parameters t, k and v must be positive");
  }
};

/// Density at a point on an edge from the densities at its two ends.
inline double interpolate_density(double d1, double d2, double l1, double l2) {
  if (l1 < 0 || l2 < 0 || std::isnan(l1) || std::isnan(l2)) throw Error("negative distance in density interpolation");
  if (l1 == 0) return d1;
  if (l2 == 0) return d2;
  const double total = l1 + l2;
  return (1.0 - l1 / total) * d1 + (1.0 - l2 / total) * d2;
}

/// Access score in [0, 1]; an unreached destination scores 0 under every method.
inline double access_score(std::optional<double> d, AccessMethod method, const AccessParams& p) {
  if (!d) return 0.0;
  switch (method) {
    case AccessMethod::binary:
      return *d <= p.t ? 1.0 : 0.0;
    case AccessMethod::soft:
      return 1.0 / (1.0 + std::exp(p.k * (*d - p.t) / p.t));
    case AccessMethod::gaussian:
      return *d <= p.t ? 1.0 : std::exp(-(*d - p.t) * (*d - p.t) / p.v);
  }
  return 0.0;
}

inline int daily_living(double fresh_food, double convenience, double pt_any) {
  int sum = 0;
  for (double s : {fresh_food, convenience, pt_any}) {
    if (s != 0.0 && s != 1.0) throw Error("daily living inputs must be binary scores");
    sum += static_cast<int>(s);
  }
  return sum;
}

/// Standard scores with the population standard deviation. A constant input yields
/// zeros and sets *degenerate.
inline std::vector<double> zscores(const std::vector<double>& values, bool* degenerate = nullptr) {
  if (values.size() < 2) throw Error("z-scores need at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (double x : values) mean += x;
  mean /= n;
  double ss = 0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out(values.size(), 0.0);
  const bool flat = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
  if (degenerate) *degenerate = flat;
  if (flat) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

inline double walkability(double z_pop, double z_int, double z_daily) { return z_pop + z_int + z_daily; }

}  // namespace pedaccess

#endif  // PEDACCESS_INDICATORS_SCORES_HPP
