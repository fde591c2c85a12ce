#ifndef PEDACCESS_INDICATORS_AGGREGATE_HPP
#define PEDACCESS_INDICATORS_AGGREGATE_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedaccess/error.hpp"
#include "pedaccess/geometry/hexgrid.hpp"
#include "pedaccess/indicators/estimates.hpp"
#include "pedaccess/indicators/scores.hpp"

namespace pedaccess {

inline constexpr double kNull = std::numeric_limits<double>::quiet_NaN();

namespace col {
inline constexpr const char* region = "Study region";
inline constexpr const char* area = "Area (sqkm)";
inline constexpr const char* population = "Population estimate";
inline constexpr const char* pop_density = "Population per sqkm";
inline constexpr const char* intersections = "Intersections";
inline constexpr const char* intersection_density = "Intersections per sqkm";
inline constexpr const char* sample_count = "urban_sample_point_count";
inline constexpr const char* local_pop = "local_nh_population_density";
inline constexpr const char* local_int = "local_nh_intersection_density";
inline constexpr const char* local_daily = "local_daily_living";
inline constexpr const char* local_walk = "local_walkability";
inline constexpr const char* z_pop = "all_cities_z_nh_population_density";
inline constexpr const char* z_int = "all_cities_z_nh_intersection_density";
inline constexpr const char* z_daily = "all_cities_z_daily_living";
inline constexpr const char* z_walk = "all_cities_walkability";
inline constexpr const char* pop_pop = "pop_nh_pop_density";
inline constexpr const char* pop_int = "pop_nh_intersection_density";
inline constexpr const char* pop_daily = "pop_daily_living";
inline constexpr const char* pop_walk = "pop_walkability";
inline constexpr const char* pop_z_pop = "all_cities_pop_z_nh_population_density";
inline constexpr const char* pop_z_int = "all_cities_pop_z_nh_intersection_density";
inline constexpr const char* pop_z_daily = "all_cities_pop_z_daily_living";
inline constexpr const char* pop_z_walk = "all_cities_pop_walkability";
}  // namespace col

/// Shortest decimal form of a distance, e.g. 500 → "500", 750.5 → "750.5".
inline std::string format_distance(double meters) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, meters);
  return std::string(buf, p);
}

/// `pct_access_{d}m_{class}_{method}`
inline std::string access_column(double meters, const std::string& cls, AccessMethod method) {
  return "pct_access_" + format_distance(meters) + "m_" + cls + "_" + to_string(method);
}

/// Keyed numeric table; "Study region" is carried per row as text. NaN marks a null.
struct IndicatorFrame {
  enum class Level { hex, city };
  struct Row {
    std::string region;
    std::int64_t hex_id = -1;
    std::vector<double> values;
  };

  Level level = Level::hex;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    return std::nullopt;
  }
  std::size_t index(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error("frame has no column '" + name + "'");
    return *i;
  }
  double at(std::size_t row, const std::string& name) const { return rows.at(row).values.at(index(name)); }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out;
    for (const Row& r : rows) out.push_back(r.values[c]);
    return out;
  }
  void add_column(const std::string& name) {
    if (find(name) || name == col::region) throw Error("indicator column name collision: " + name);
    columns.push_back(name);
  }
};

/// Names of the per-class percentage columns, binary first, then the configured method.
inline std::vector<std::string> access_columns(const std::vector<std::string>& classes, double meters,
                                               AccessMethod method) {
  std::vector<std::string> out;
  for (const auto& c : classes) {
    out.push_back(access_column(meters, c, AccessMethod::binary));
    if (method != AccessMethod::binary) out.push_back(access_column(meters, c, method));
  }
  return out;
}

/// Hex-level means of sample estimates; hexes without sample points are left out.
/// `meters` is the access threshold used in column names.
inline IndicatorFrame aggregate_hex(const SampleEstimates& est, const HexGrid& grid, const std::string& region,
                                    double meters) {
  IndicatorFrame f;
  f.level = IndicatorFrame::Level::hex;
  for (const char* c : {col::population, col::pop_density, col::intersections, col::intersection_density,
                        col::sample_count})
    f.add_column(c);
  const auto pct = access_columns(est.classes, meters, est.method);
  for (const auto& c : pct) f.add_column(c);
  for (const char* c : {col::local_pop, col::local_int, col::local_daily, col::local_walk, col::z_pop, col::z_int,
                        col::z_daily, col::z_walk})
    f.add_column(c);

  std::map<std::int64_t, std::vector<std::size_t>> by_hex;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const std::int64_t h = est.points[i].hex_id;
    if (h < 0 || static_cast<std::size_t>(h) >= grid.size()) throw Error("sample point outside the hex grid");
    by_hex[h].push_back(i);
  }
  const bool two = est.method != AccessMethod::binary;
  for (const auto& [h, idx] : by_hex) {
    const HexCell& cell = grid[h];
    const double n = static_cast<double>(idx.size());
    auto mean = [&](const std::vector<double>& v) {
      double s = 0;
      for (std::size_t i : idx) s += v[i];
      return s / n;
    };
    IndicatorFrame::Row row{region, h, {}};
    row.values = {cell.population, cell.pop_density, static_cast<double>(cell.intersection_count),
                  cell.intersection_density, n};
    for (std::size_t c = 0; c < est.classes.size(); ++c) {
      row.values.push_back(100.0 * mean(est.binary[c]));
      if (two) row.values.push_back(100.0 * mean(est.score[c]));
    }
    row.values.push_back(mean(est.nh_pop_density));
    row.values.push_back(mean(est.nh_intersection_density));
    row.values.push_back(mean(est.daily_living));
    row.values.push_back(mean(est.walkability));
    for (int k = 0; k < 4; ++k) row.values.push_back(kNull);
    f.rows.push_back(std::move(row));
  }
  return f;
}

/// Standardizes hex-level local densities and daily living over the hexes of all regions
/// together and fills the all_cities_* columns. Returns true if any pooled column was constant.
inline bool between_city_z(std::vector<IndicatorFrame*> frames) {
  std::vector<double> pop, inter, daily;
  for (const IndicatorFrame* f : frames) {
    const std::size_t a = f->index(col::local_pop), b = f->index(col::local_int), c = f->index(col::local_daily);
    for (const auto& r : f->rows) {
      pop.push_back(r.values[a]);
      inter.push_back(r.values[b]);
      daily.push_back(r.values[c]);
    }
  }
  if (pop.size() < 2) throw Error("between-city z-scores need at least two hexes");
  bool d1 = false, d2 = false, d3 = false;
  const auto zp = zscores(pop, &d1), zi = zscores(inter, &d2), zd = zscores(daily, &d3);
  std::size_t k = 0;
  for (IndicatorFrame* f : frames) {
    const std::size_t a = f->index(col::z_pop), b = f->index(col::z_int), c = f->index(col::z_daily),
                      w = f->index(col::z_walk);
    for (auto& r : f->rows) {
      r.values[a] = zp[k];
      r.values[b] = zi[k];
      r.values[c] = zd[k];
      r.values[w] = walkability(zp[k], zi[k], zd[k]);
      ++k;
    }
  }
  return d1 || d2 || d3;
}

/// Region-wide covariates that do not come from sample points.
struct RegionStats {
  std::string name;
  double area_km2 = 0.0;
  double population = 0.0;
  std::int64_t intersections = 0;
};

/// Column layout of the city frame for the given classes and method.
inline IndicatorFrame empty_city_frame(const std::vector<std::string>& classes, double meters, AccessMethod method) {
  IndicatorFrame f;
  f.level = IndicatorFrame::Level::city;
  for (const char* c : {col::area, col::population, col::pop_density, col::intersections, col::intersection_density,
                        col::sample_count})
    f.add_column(c);
  for (const auto& c : access_columns(classes, meters, method)) f.add_column("pop_" + c);
  for (const char* c : {col::pop_pop, col::pop_int, col::pop_daily, col::pop_walk, col::pop_z_pop, col::pop_z_int,
                        col::pop_z_daily, col::pop_z_walk})
    f.add_column(c);
  for (const auto& c : access_columns(classes, meters, method)) f.add_column(c);
  for (const char* c : {col::local_pop, col::local_int, col::local_daily, col::local_walk, col::z_pop, col::z_int,
                        col::z_daily, col::z_walk})
    f.add_column(c);
  return f;
}

/// One city row: population-weighted hex means (weights = hex population) for the pop_*
/// columns and unweighted hex means for the spatial averages.
inline IndicatorFrame::Row aggregate_city(const IndicatorFrame& hex, const RegionStats& stats,
                                          const std::vector<std::string>& classes, double meters,
                                          AccessMethod method) {
  const IndicatorFrame layout = empty_city_frame(classes, meters, method);
  IndicatorFrame::Row row{stats.name, -1, std::vector<double>(layout.columns.size(), kNull)};
  auto set = [&](const std::string& name, double v) { row.values[layout.index(name)] = v; };
  set(col::area, stats.area_km2);
  set(col::population, stats.population);
  set(col::pop_density, stats.area_km2 > 0 ? stats.population / stats.area_km2 : kNull);
  set(col::intersections, static_cast<double>(stats.intersections));
  set(col::intersection_density, stats.area_km2 > 0 ? static_cast<double>(stats.intersections) / stats.area_km2 : kNull);
  double points = 0;
  for (const auto& r : hex.rows) points += r.values[hex.index(col::sample_count)];
  set(col::sample_count, points);
  if (hex.rows.empty()) return row;

  const std::vector<double> w = hex.column(col::population);
  double wsum = 0;
  for (double x : w) wsum += x;
  if (!(wsum > 0)) throw Error("population-weighted mean with zero total weight in region " + stats.name);
  auto weighted = [&](const std::string& name) {
    const auto v = hex.column(name);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (w[i] > 0) s += w[i] * v[i];
    return s / wsum;
  };
  auto plain = [&](const std::string& name) {
    const auto v = hex.column(name);
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  for (const auto& c : access_columns(classes, meters, method)) {
    set("pop_" + c, weighted(c));
    set(c, plain(c));
  }
  const std::pair<const char*, const char*> pairs[] = {
      {col::pop_pop, col::local_pop}, {col::pop_int, col::local_int}, {col::pop_daily, col::local_daily},
      {col::pop_walk, col::local_walk}, {col::pop_z_pop, col::z_pop}, {col::pop_z_int, col::z_int},
      {col::pop_z_daily, col::z_daily}, {col::pop_z_walk, col::z_walk}};
  for (const auto& [city, source] : pairs) {
    set(city, weighted(source));
    set(source, plain(source));
  }
  return row;
}

}  // namespace pedaccess

#endif  // PEDACCESS_INDICATORS_AGGREGATE_HPP
