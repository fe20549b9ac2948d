#include "mcpois/geo.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mcpois/errors.hpp"

namespace mcpois {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRouteSlack = 1e-6;

void check_coords(double lat, double lon, const std::string& what) {
  if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0)
    throw ValidationError(what + ": coordinates out of range (" +
                          std::to_string(lat) + ", " + std::to_string(lon) + ")");
}

}  // namespace

double haversine_miles(double lat_a, double lon_a, double lat_b, double lon_b) {
  check_coords(lat_a, lon_a, "haversine");
  check_coords(lat_b, lon_b, "haversine");
  const double phi_a = lat_a * kDegToRad, phi_b = lat_b * kDegToRad;
  const double dphi = (lat_b - lat_a) * kDegToRad;
  const double dlam = (lon_b - lon_a) * kDegToRad;
  const double s = std::sin(0.5 * dphi), t = std::sin(0.5 * dlam);
  const double h = s * s + std::cos(phi_a) * std::cos(phi_b) * t * t;
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

std::pair<std::string, double> nearest_retailer(
    const Tract& tract, const std::vector<Retailer>& retailers) {
  if (retailers.empty()) throw ValidationError("nearest_retailer: no retailers");
  std::string best_id;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : retailers) {
    const double d =
        haversine_miles(tract.centroid_lat, tract.centroid_lon, r.lat, r.lon);
    if (d < best || (d == best && r.id < best_id)) {
      best = d;
      best_id = r.id;
    }
  }
  return {best_id, best};
}

int discretize_access(double distance, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("discretize_access: threshold must be positive");
  return distance <= threshold ? 1 : 0;
}

AccessTable build_access_table(const std::vector<Tract>& tracts,
                               const std::vector<Retailer>& retailers,
                               const std::vector<double>& thresholds) {
  AccessTable table;
  table.thresholds = thresholds;
  table.rows.reserve(tracts.size());
  for (const auto& t : tracts) {
    check_coords(t.centroid_lat, t.centroid_lon, "tract " + t.id);
    auto [rid, d] = nearest_retailer(t, retailers);
    AccessRow row;
    row.tract_id = t.id;
    row.metro = t.metro;
    row.y_cases = t.y_cases;
    row.population = t.population;
    row.d_haversine = d;
    for (double thr : thresholds) {
      row.xstar.push_back(discretize_access(d, thr));
      row.x.emplace_back(std::nullopt);
    }
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const AccessRow& a, const AccessRow& b) { return a.tract_id < b.tract_id; });
  return table;
}

void merge_route_distances(AccessTable& access,
                           const std::vector<std::pair<std::string, double>>& routes) {
  std::unordered_map<std::string, AccessRow*> by_id;
  for (auto& row : access.rows) by_id[row.tract_id] = &row;

  std::vector<std::string> bad;
  for (const auto& [id, miles] : routes) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw ValidationError("merge_route_distances: unknown tract id " + id);
    AccessRow& row = *it->second;
    if (miles < row.d_haversine - kRouteSlack) {
      bad.push_back(id);
      continue;
    }
    row.d_route = miles;
    for (std::size_t k = 0; k < access.thresholds.size(); ++k)
      row.x[k] = discretize_access(miles, access.thresholds[k]);
  }
  if (!bad.empty()) {
    std::string msg = "route distance shorter than haversine for tracts:";
    for (const auto& id : bad) msg += " " + id;
    throw IntegrityError(msg);
  }
}

std::vector<std::string> draw_query_design(const AccessTable& access,
                                           std::size_t threshold_index, int n,
                                           std::mt19937_64& rng) {
  std::vector<const AccessRow*> metro, nonmetro;
  for (const auto& row : access.rows) {
    if (row.xstar.at(threshold_index) != 1) continue;
    (row.metro ? metro : nonmetro).push_back(&row);
  }
  const int total = static_cast<int>(metro.size() + nonmetro.size());
  if (n > total)
    throw ValidationError("draw_query_design: only " + std::to_string(total) +
                          " xstar=1 tracts available, " + std::to_string(n) +
                          " requested");
  // 50/50 target; metro gets the ceiling, shortfalls spill into the other stratum
  int want_metro = (n + 1) / 2;
  int want_non = n / 2;
  if (want_metro > static_cast<int>(metro.size())) {
    want_non += want_metro - static_cast<int>(metro.size());
    want_metro = static_cast<int>(metro.size());
  }
  if (want_non > static_cast<int>(nonmetro.size())) {
    want_metro += want_non - static_cast<int>(nonmetro.size());
    want_non = static_cast<int>(nonmetro.size());
  }

  auto pick = [&rng](std::vector<const AccessRow*> pool, int k) {
    const int m = static_cast<int>(pool.size());
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> d(i, m - 1);
      std::swap(pool[i], pool[d(rng)]);
    }
    pool.resize(k);
    return pool;
  };
  std::vector<std::string> out;
  for (const auto* row : pick(metro, want_metro)) out.push_back(row->tract_id);
  for (const auto* row : pick(nonmetro, want_non)) out.push_back(row->tract_id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mcpois
