#ifndef PEDACCESS_AUXDATA_GTFS_HPP
#define PEDACCESS_AUXDATA_GTFS_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/auxdata/zip.hpp"
#include "pedaccess/error.hpp"
#include "pedaccess/geometry/boundary.hpp"
#include "pedaccess/geometry/projection.hpp"
#include "pedaccess/osm/pois.hpp"

namespace pedaccess::gtfs {

using Date = std::chrono::year_month_day;

/// Parses YYYYMMDD.
inline std::optional<Date> parse_date(std::string_view s) {
  const auto v = csv::to_int(s);
  if (!v || s.size() != 8) return std::nullopt;
  const Date d{std::chrono::year(static_cast<int>(*v / 10000)), std::chrono::month(static_cast<unsigned>(*v / 100 % 100)),
               std::chrono::day(static_cast<unsigned>(*v % 100))};
  if (!d.ok()) return std::nullopt;
  return d;
}

/// Parses H:MM:SS into seconds after midnight of the service day; hours may exceed 23.
inline std::optional<std::int32_t> parse_time(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  const auto c1 = s.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  const auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos || s.size() - c2 - 1 != 2 || c2 - c1 - 1 != 2) return std::nullopt;
  const auto h = csv::to_int(s.substr(0, c1)), m = csv::to_int(s.substr(c1 + 1, 2)), sec = csv::to_int(s.substr(c2 + 1));
  if (!h || !m || !sec || *h < 0 || *m < 0 || *m > 59 || *sec < 0 || *sec > 59) return std::nullopt;
  return static_cast<std::int32_t>(*h * 3600 + *m * 60 + *sec);
}

struct Stop {
  std::string id;
  std::string name;
  double lat = 0, lon = 0;
};

struct Trip {
  std::string id;
  std::string route;
  std::string service;
};

struct StopTime {
  std::uint32_t trip = 0;  // index into Feed::trips
  std::uint32_t stop = 0;  // index into Feed::stops
  std::int32_t departure = 0;
};

struct Service {
  std::array<bool, 7> weekdays{};  // Monday first
  std::optional<Date> start, end;
  std::set<std::chrono::sys_days> added, removed;

  bool active(Date d) const {
    const std::chrono::sys_days day{d};
    if (removed.count(day)) return false;
    if (added.count(day)) return true;
    if (!start || !end || d < *start || d > *end) return false;
    const unsigned wd = std::chrono::weekday(day).iso_encoding();  // 1 = Monday
    return weekdays[wd - 1];
  }
};

struct Diagnostics {
  std::size_t stops_bad_coordinates = 0;
  std::size_t trips_unknown_service = 0;
  std::size_t stop_times_unknown_trip = 0;
  std::size_t stop_times_unknown_stop = 0;
  std::size_t stop_times_bad_time = 0;
  std::size_t trips_non_monotonic = 0;
  std::size_t calendar_bad_rows = 0;
};

struct Feed {
  std::vector<Stop> stops;
  std::vector<Trip> trips;
  std::vector<StopTime> stop_times;  // grouped by trip, in stop_sequence order
  std::map<std::string, Service> services;
  Diagnostics diagnostics;

  std::optional<std::uint32_t> stop_index(const std::string& id) const {
    auto it = stop_lookup.find(id);
    if (it == stop_lookup.end()) return std::nullopt;
    return it->second;
  }

  std::unordered_map<std::string, std::uint32_t> stop_lookup;
};

namespace detail {

class Source {
 public:
  explicit Source(const std::filesystem::path& path) : path_(path) {
    if (!std::filesystem::exists(path)) throw ParseError("GTFS feed not found: " + path.string());
    if (!std::filesystem::is_directory(path)) archive_.emplace(path);
  }
  std::optional<csv::Table> table(const std::string& file) const {
    if (archive_) {
      auto text = archive_->read(file);
      if (!text) return std::nullopt;
      return csv::read_table(*text, path_.string() + ":" + file);
    }
    const auto p = path_ / file;
    if (!std::filesystem::exists(p)) return std::nullopt;
    return csv::read_file(p.string());
  }
  csv::Table required(const std::string& file) const {
    auto t = table(file);
    if (!t) throw ParseError("GTFS feed " + path_.string() + " lacks " + file);
    return std::move(*t);
  }

 private:
  std::filesystem::path path_;
  std::optional<zip::Archive> archive_;
};

}  // namespace detail

/// Loads stops, trips, stop_times and calendar (plus calendar_dates if present) from a
/// directory or zip. Rows breaking referential integrity are dropped and counted.
inline Feed load_feed(const std::filesystem::path& path) {
  detail::Source src(path);
  Feed feed;
  auto& diag = feed.diagnostics;
  using csv::Table;

  {
    const Table t = src.required("stops.txt");
    const auto cid = t.require("stop_id"), clat = t.require("stop_lat"), clon = t.require("stop_lon");
    const auto cname = t.column("stop_name");
    for (const auto& row : t.rows()) {
      const auto lat = csv::to_double(Table::field(row, clat)), lon = csv::to_double(Table::field(row, clon));
      const std::string id(Table::field(row, cid));
      if (id.empty() || !lat || !lon || std::abs(*lat) > 90 || std::abs(*lon) > 180) {
        ++diag.stops_bad_coordinates;
        continue;
      }
      if (feed.stop_lookup.count(id)) continue;
      feed.stop_lookup.emplace(id, static_cast<std::uint32_t>(feed.stops.size()));
      feed.stops.push_back({id, cname ? std::string(Table::field(row, *cname)) : std::string(), *lat, *lon});
    }
  }

  if (auto cal = src.table("calendar.txt")) {
    static const std::array<const char*, 7> days{"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
    const auto cid = cal->require("service_id"), cs = cal->require("start_date"), ce = cal->require("end_date");
    std::array<std::size_t, 7> cd{};
    for (int i = 0; i < 7; ++i) cd[i] = cal->require(days[i]);
    for (const auto& row : cal->rows()) {
      const auto s = parse_date(Table::field(row, cs)), e = parse_date(Table::field(row, ce));
      if (!s || !e) {
        ++diag.calendar_bad_rows;
        continue;
      }
      Service& svc = feed.services[std::string(Table::field(row, cid))];
      svc.start = s;
      svc.end = e;
      for (int i = 0; i < 7; ++i) svc.weekdays[i] = Table::field(row, cd[i]) == "1";
    }
  }
  if (auto cd = src.table("calendar_dates.txt")) {
    const auto cid = cd->require("service_id"), cdate = cd->require("date"), cx = cd->require("exception_type");
    for (const auto& row : cd->rows()) {
      const auto d = parse_date(Table::field(row, cdate));
      const auto x = csv::to_int(Table::field(row, cx));
      if (!d || !x || (*x != 1 && *x != 2)) {
        ++diag.calendar_bad_rows;
        continue;
      }
      Service& svc = feed.services[std::string(Table::field(row, cid))];
      (*x == 1 ? svc.added : svc.removed).insert(std::chrono::sys_days{*d});
    }
  }

  std::unordered_map<std::string, std::uint32_t> trip_lookup;
  {
    const Table t = src.required("trips.txt");
    const auto cid = t.require("trip_id"), croute = t.require("route_id"), csvc = t.require("service_id");
    for (const auto& row : t.rows()) {
      Trip trip{std::string(Table::field(row, cid)), std::string(Table::field(row, croute)),
                std::string(Table::field(row, csvc))};
      if (!feed.services.count(trip.service)) {
        ++diag.trips_unknown_service;
        continue;
      }
      if (trip_lookup.count(trip.id)) continue;
      trip_lookup.emplace(trip.id, static_cast<std::uint32_t>(feed.trips.size()));
      feed.trips.push_back(std::move(trip));
    }
  }

  {
    const Table t = src.required("stop_times.txt");
    const auto ctrip = t.require("trip_id"), cstop = t.require("stop_id"), cseq = t.require("stop_sequence");
    const auto cdep = t.column("departure_time"), carr = t.column("arrival_time");
    if (!cdep && !carr) throw ParseError("stop_times.txt has neither departure_time nor arrival_time");
    struct Raw {
      StopTime st;
      long long seq;
    };
    std::vector<Raw> raw;
    raw.reserve(t.size());
    for (const auto& row : t.rows()) {
      auto ti = trip_lookup.find(std::string(Table::field(row, ctrip)));
      if (ti == trip_lookup.end()) {
        ++diag.stop_times_unknown_trip;
        continue;
      }
      auto si = feed.stop_lookup.find(std::string(Table::field(row, cstop)));
      if (si == feed.stop_lookup.end()) {
        ++diag.stop_times_unknown_stop;
        continue;
      }
      std::optional<std::int32_t> dep;
      if (cdep) dep = parse_time(Table::field(row, *cdep));
      if (!dep && carr) dep = parse_time(Table::field(row, *carr));
      const auto seq = csv::to_int(Table::field(row, cseq));
      if (!dep || !seq) {
        ++diag.stop_times_bad_time;
        continue;
      }
      raw.push_back({{ti->second, si->second, *dep}, *seq});
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
      return a.st.trip != b.st.trip ? a.st.trip < b.st.trip : a.seq < b.seq;
    });
    for (std::size_t i = 0; i < raw.size();) {
      std::size_t j = i;
      bool monotonic = true;
      while (j < raw.size() && raw[j].st.trip == raw[i].st.trip) {
        if (j > i && raw[j].st.departure < raw[j - 1].st.departure) monotonic = false;
        ++j;
      }
      if (monotonic)
        for (std::size_t k = i; k < j; ++k) feed.stop_times.push_back(raw[k].st);
      else
        ++diag.trips_non_monotonic;
      i = j;
    }
  }
  return feed;
}

/// Mean gap in minutes between departures at a stop within [from_s, to_s] seconds of the
/// service day, on the date in [first, last] with the most departures at that stop
/// (earliest date on ties). None with fewer than two departures.
inline std::optional<double> stop_average_headway(const Feed& feed, const std::string& stop_id, Date first, Date last,
                                                  std::int32_t from_s, std::int32_t to_s) {
  const auto stop = feed.stop_index(stop_id);
  if (!stop) throw Error("unknown GTFS stop id: " + stop_id);
  if (to_s < from_s || to_s - from_s > 86400) throw Error("headway time window must lie within one day");
  if (!first.ok() || !last.ok() || std::chrono::sys_days{last} < std::chrono::sys_days{first})
    throw Error("headway day window is empty");

  std::vector<std::pair<const Service*, std::int32_t>> at_stop;
  for (const StopTime& st : feed.stop_times) {
    if (st.stop != *stop || st.departure < from_s || st.departure > to_s) continue;
    at_stop.emplace_back(&feed.services.at(feed.trips[st.trip].service), st.departure);
  }
  std::vector<std::int32_t> best;
  for (auto day = std::chrono::sys_days{first}; day <= std::chrono::sys_days{last}; day += std::chrono::days{1}) {
    std::vector<std::int32_t> deps;
    for (const auto& [svc, dep] : at_stop)
      if (svc->active(Date{day})) deps.push_back(dep);
    if (deps.size() > best.size()) best = std::move(deps);
  }
  if (best.size() < 2) return std::nullopt;
  std::sort(best.begin(), best.end());
  return (best.back() - best.front()) / 60.0 / static_cast<double>(best.size() - 1);
}

struct StopPoiStats {
  std::size_t outside_region = 0;
  std::size_t unprojectable = 0;
};

/// Stops inside the buffered region as `pt_any` destinations.
inline PoiSet stops_as_pois(const Feed& feed, const BufferedRegion& region, const UtmZone& zone,
                            StopPoiStats* stats = nullptr) {
  PoiSet set{"pt_any", {}};
  StopPoiStats local;
  for (const Stop& s : feed.stops) {
    Point p;
    try {
      p = project(LatLon{s.lat, s.lon}, zone);
    } catch (const Error&) {
      ++local.unprojectable;
      continue;
    }
    if (!region.contains(p)) {
      ++local.outside_region;
      continue;
    }
    set.points.push_back({"gtfs:" + s.id, p, {{"name", s.name}}});
  }
  if (stats) *stats = local;
  return set;
}

}  // namespace pedaccess::gtfs

namespace pedaccess {

/// Adds points from `extra` to `base` unless one already lies within `tolerance` meters.
inline void merge_pois(PoiSet& base, const PoiSet& extra, double tolerance = 10.0) {
  GridIndex<Point> idx(std::max(tolerance, 1.0));
  for (const Poi& p : base.points) idx.insert(p.location);
  for (const Poi& p : extra.points) {
    if (nearest_within(idx, p.location, tolerance)) continue;
    idx.insert(p.location);
    base.points.push_back(p);
  }
}

}  // namespace pedaccess

#endif  // PEDACCESS_AUXDATA_GTFS_HPP
