#ifndef MCPOIS_GEO_HPP
#define MCPOIS_GEO_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mcpois {

inline constexpr double kEarthRadiusMiles = 3958.8;

struct Tract {
  std::string id;
  double centroid_lat = 0.0;
  double centroid_lon = 0.0;
  int metro = 0;
  std::int64_t y_cases = 0;
  std::int64_t population = 0;
};

struct Retailer {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

struct AccessRow {
  std::string tract_id;
  int metro = 0;
  std::int64_t y_cases = 0;
  std::int64_t population = 0;
  double d_haversine = 0.0;
  std::optional<double> d_route;
  // indicators per threshold, aligned with AccessTable::thresholds
  std::vector<int> xstar;
  std::vector<std::optional<int>> x;
};

struct AccessTable {
  std::vector<double> thresholds;
  std::vector<AccessRow> rows;
};

double haversine_miles(double lat_a, double lon_a, double lat_b, double lon_b);

// Minimum-distance retailer; ties broken by smallest retailer id.
std::pair<std::string, double> nearest_retailer(const Tract& tract,
                                                const std::vector<Retailer>& retailers);

// I(distance <= threshold); the boundary is inclusive.
int discretize_access(double distance, double threshold);

AccessTable build_access_table(const std::vector<Tract>& tracts,
                               const std::vector<Retailer>& retailers,
                               const std::vector<double>& thresholds);

// Fills d_route and the x indicators from (tract id, miles) pairs; validates
// route >= haversine (1e-6 slack) and that every id is known.
void merge_route_distances(AccessTable& access,
                           const std::vector<std::pair<std::string, double>>& routes);

// Stratified sample from the X*=1 tracts at the given threshold index:
// ceil(n/2) metropolitan, floor(n/2) non-metropolitan, shortfalls reallocated.
std::vector<std::string> draw_query_design(const AccessTable& access,
                                           std::size_t threshold_index, int n,
                                           std::mt19937_64& rng);

}  // namespace mcpois

#endif
