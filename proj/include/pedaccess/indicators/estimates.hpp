#ifndef PEDACCESS_INDICATORS_ESTIMATES_HPP
#define PEDACCESS_INDICATORS_ESTIMATES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/indicators/sample_points.hpp"
#include "pedaccess/indicators/scores.hpp"
#include "pedaccess/network/accessibility.hpp"
#include "pedaccess/network/parallel.hpp"

namespace pedaccess {

struct AccessDistance {
  enum class Status { reached, unreached, omitted };
  Status status = Status::unreached;
  double meters = 0.0;

  std::optional<double> value() const {
    return status == Status::reached ? std::optional<double>(meters) : std::nullopt;
  }
  static AccessDistance omitted() { return {Status::omitted, 0.0}; }
};

/// Shortest full distance from a sample point to the nearest destination through either
/// terminal node of its edge.
inline AccessDistance sample_access_distance(const SamplePoint& sp, const PedestrianGraph& g,
                                             const NodeDistanceField& field) {
  const auto a = g.find_node(sp.n1), b = g.find_node(sp.n2);
  if (!a || !b) return AccessDistance::omitted();
  std::optional<double> best;
  if (const auto& d = field.distance.at(*a)) best = sp.l1 + *d;
  if (const auto& d = field.distance.at(*b); d && (!best || sp.l2 + *d < *best)) best = sp.l2 + *d;
  if (!best) return {AccessDistance::Status::unreached, 0.0};
  return {AccessDistance::Status::reached, *best};
}

/// Destination classes that make up the daily living score, in order.
inline const std::vector<std::string>& daily_living_classes() {
  static const std::vector<std::string> v{"fresh_food_market", "convenience", "pt_any"};
  return v;
}

struct EstimateOptions {
  AccessParams params;
  AccessMethod method = AccessMethod::binary;
  unsigned threads = 1;
};

/// Per-sample-point estimates. Class-indexed vectors follow `classes`.
struct SampleEstimates {
  std::vector<std::string> classes;
  AccessMethod method = AccessMethod::binary;
  std::vector<SamplePoint> points;  // retained (non-omitted) points
  std::vector<double> nh_pop_density;
  std::vector<double> nh_intersection_density;
  std::vector<std::vector<std::optional<double>>> distance;  // [class][point]
  std::vector<std::vector<double>> binary;                   // [class][point]
  std::vector<std::vector<double>> score;                    // [class][point], configured method
  std::vector<double> daily_living;
  std::vector<double> z_pop, z_int, z_daily;
  std::vector<double> walkability;
  std::size_t omitted = 0;
  bool degenerate_z = false;

  std::size_t size() const { return points.size(); }
  std::optional<std::size_t> class_index(const std::string& name) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == name) return i;
    return std::nullopt;
  }
};

/// Recomputes daily living, within-region z-scores and walkability from the stored
/// densities and binary scores. With fewer than two points the z columns are zero.
inline void finish_composites(SampleEstimates& est) {
  const std::size_t n = est.size();
  est.daily_living.assign(n, 0.0);
  std::vector<std::optional<std::size_t>> dl;
  for (const auto& c : daily_living_classes()) dl.push_back(est.class_index(c));
  for (std::size_t i = 0; i < n; ++i) {
    double parts[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k)
      if (dl[k]) parts[k] = est.binary[*dl[k]][i];
    est.daily_living[i] = daily_living(parts[0], parts[1], parts[2]);
  }
  est.degenerate_z = false;
  if (n >= 2) {
    bool d1 = false, d2 = false, d3 = false;
    est.z_pop = zscores(est.nh_pop_density, &d1);
    est.z_int = zscores(est.nh_intersection_density, &d2);
    est.z_daily = zscores(est.daily_living, &d3);
    est.degenerate_z = d1 || d2 || d3;
  } else {
    est.z_pop.assign(n, 0.0);
    est.z_int.assign(n, 0.0);
    est.z_daily.assign(n, 0.0);
    est.degenerate_z = true;
  }
  est.walkability.resize(n);
  for (std::size_t i = 0; i < n; ++i) est.walkability[i] = walkability(est.z_pop[i], est.z_int[i], est.z_daily[i]);
}

/// Sample-point estimates from node-level densities and destination fields (one per class).
inline SampleEstimates estimate_samples(const std::vector<SamplePoint>& points, const PedestrianGraph& g,
                                        const std::vector<LocalDensity>& node_density,
                                        const std::vector<NodeDistanceField>& fields, const EstimateOptions& opt) {
  opt.params.validate();
  if (node_density.size() != g.node_count()) throw Error("node densities do not cover the graph");
  SampleEstimates est;
  est.method = opt.method;
  for (const auto& f : fields) est.classes.push_back(f.destination_class);

  std::vector<char> keep(points.size(), 1);
  std::vector<std::uint32_t> a(points.size()), b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto na = g.find_node(points[i].n1), nb = g.find_node(points[i].n2);
    if (!na || !nb) {
      keep[i] = 0;
      ++est.omitted;
      continue;
    }
    a[i] = *na;
    b[i] = *nb;
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (keep[i]) order.push_back(i);
  const std::size_t n = order.size();
  const std::size_t nc = fields.size();
  est.points.resize(n);
  est.nh_pop_density.resize(n);
  est.nh_intersection_density.resize(n);
  est.distance.assign(nc, std::vector<std::optional<double>>(n));
  est.binary.assign(nc, std::vector<double>(n));
  est.score.assign(nc, std::vector<double>(n));

  parallel_ranges(n, opt.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::size_t i = order[j];
      const SamplePoint& sp = points[i];
      est.points[j] = sp;
      const LocalDensity& da = node_density[a[i]];
      const LocalDensity& db = node_density[b[i]];
      est.nh_pop_density[j] = interpolate_density(da.pop_density, db.pop_density, sp.l1, sp.l2);
      est.nh_intersection_density[j] =
          interpolate_density(da.intersection_density, db.intersection_density, sp.l1, sp.l2);
      for (std::size_t c = 0; c < nc; ++c) {
        const auto d = sample_access_distance(sp, g, fields[c]).value();
        est.distance[c][j] = d;
        est.binary[c][j] = access_score(d, AccessMethod::binary, opt.params);
        est.score[c][j] = access_score(d, opt.method, opt.params);
      }
    }
  });
  finish_composites(est);
  return est;
}

}  // namespace pedaccess

#endif  // PEDACCESS_INDICATORS_ESTIMATES_HPP
