#ifndef PEDACCESS_VALIDATION_GROUND_TRUTH_HPP
#define PEDACCESS_VALIDATION_GROUND_TRUTH_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pedaccess/auxdata/csv.hpp"
#include "pedaccess/error.hpp"
#include "pedaccess/geometry/point.hpp"

namespace pedaccess {

struct GroundTruthCandidate {
  std::string destination_id;
  std::string destination_class;
  Point location;
  double density = 0.0;  // population density of the destination's hex
};

struct GroundTruthSample {
  std::string destination_id;
  std::string destination_class;
  Point location;
  double density = 0.0;
  int quintile = 1;
};

/// Linear-interpolated percentile (0..100) of sorted values.
inline double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("percentile of an empty set");
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Breakpoints at the 20/40/60/80th percentiles of the candidates' densities.
inline std::array<double, 4> quintile_breaks(const std::vector<GroundTruthCandidate>& dests) {
  std::vector<double> v;
  for (const auto& d : dests) v.push_back(d.density);
  std::sort(v.begin(), v.end());
  return {percentile(v, 20), percentile(v, 40), percentile(v, 60), percentile(v, 80)};
}

/// 1 + the number of breakpoints strictly below the value (a value on a break joins the lower quintile).
inline int quintile_of(double density, const std::array<double, 4>& breaks) {
  int q = 1;
  for (double b : breaks)
    if (density > b) ++q;
  return q;
}

namespace detail {

// Uniform integer in [0, n) by rejection, independent of the standard library's distributions.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % n;
}

}  // namespace detail

/// Up to `per_quintile` destinations drawn uniformly without replacement from each density
/// quintile. Output is ordered by quintile, then draw order.
inline std::vector<GroundTruthSample> quintile_sample(const std::vector<GroundTruthCandidate>& dests,
                                                      std::size_t per_quintile, std::uint64_t seed) {
  if (dests.empty()) throw Error("ground truth sampling needs at least one destination");
  const auto breaks = quintile_breaks(dests);
  std::array<std::vector<std::size_t>, 5> members;
  for (std::size_t i = 0; i < dests.size(); ++i) members[quintile_of(dests[i].density, breaks) - 1].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<GroundTruthSample> out;
  for (int q = 0; q < 5; ++q) {
    auto& m = members[q];
    const std::size_t take = std::min(per_quintile, m.size());
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t j = k + detail::bounded(rng, m.size() - k);
      std::swap(m[k], m[j]);
      const auto& d = dests[m[k]];
      out.push_back({d.destination_id, d.destination_class, d.location, d.density, q + 1});
    }
  }
  return out;
}

/// Verdict over the three virtual services. Street view may be unavailable, in which
/// case both remaining sources must agree on true.
inline bool ground_truth_verdict(bool maps, bool satellite, std::optional<bool> street) {
  if (!street) return maps && satellite;
  return (int(maps) + int(satellite) + int(*street)) >= 2;
}

struct VerdictTally {
  std::size_t reviewed = 0;
  std::size_t verdict_true = 0;
  std::size_t street_unavailable = 0;
  std::size_t pending = 0;  // rows without a complete review
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_class;  // class → (true, reviewed)

  std::optional<double> pct_true() const {
    if (reviewed == 0) return std::nullopt;
    return 100.0 * static_cast<double>(verdict_true) / static_cast<double>(reviewed);
  }
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<bool> parse_flag(std::string_view s) {
  const auto v = lower(s);
  if (v == "true" || v == "t" || v == "yes" || v == "y" || v == "1") return true;
  if (v == "false" || v == "f" || v == "no" || v == "n" || v == "0") return false;
  return std::nullopt;
}

}  // namespace detail

/// Tallies a reviewed sampling sheet with columns maps_view, satellite_view and
/// street_view ("unavailable" allowed for the latter). Incomplete rows count as pending.
inline VerdictTally tally_reviews(const csv::Table& sheet) {
  const auto cm = sheet.require("maps_view"), cs = sheet.require("satellite_view"), cv = sheet.require("street_view");
  const auto cc = sheet.column("destination_class");
  VerdictTally t;
  for (const auto& row : sheet.rows()) {
    const auto maps = detail::parse_flag(csv::Table::field(row, cm));
    const auto sat = detail::parse_flag(csv::Table::field(row, cs));
    const auto street_text = detail::lower(csv::Table::field(row, cv));
    std::optional<bool> street;
    bool street_ok = true;
    if (street_text == "unavailable" || street_text == "na" || street_text == "n/a") {
      ++t.street_unavailable;
    } else {
      street = detail::parse_flag(street_text);
      street_ok = street.has_value();
    }
    if (!maps || !sat || !street_ok) {
      ++t.pending;
      if (street_text == "unavailable" || street_text == "na" || street_text == "n/a") --t.street_unavailable;
      continue;
    }
    const bool v = ground_truth_verdict(*maps, *sat, street);
    ++t.reviewed;
    if (v) ++t.verdict_true;
    auto& c = t.by_class[cc ? std::string(csv::Table::field(row, *cc)) : std::string()];
    ++c.second;
    if (v) ++c.first;
  }
  return t;
}

}  // namespace pedaccess

#endif  // PEDACCESS_VALIDATION_GROUND_TRUTH_HPP
