#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcpois/errors.hpp"
#include "mcpois/geo.hpp"

using namespace mcpois;

namespace {

Tract tract(const std::string& id, double lat, double lon, int metro = 0) {
  Tract t;
  t.id = id;
  t.centroid_lat = lat;
  t.centroid_lon = lon;
  t.metro = metro;
  return t;
}

Retailer retailer(const std::string& id, double lat, double lon) {
  return Retailer{id, lat, lon};
}

// spherical law of cosines, an independent route to the same great circle
double sloc_miles(double lat_a, double lon_a, double lat_b, double lon_b) {
  const double d = std::numbers::pi / 180.0;
  const double c = std::sin(lat_a * d) * std::sin(lat_b * d) +
                   std::cos(lat_a * d) * std::cos(lat_b * d) *
                       std::cos((lon_b - lon_a) * d);
  return kEarthRadiusMiles * std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("haversine basics") {
  CHECK(haversine_miles(35.0, -97.0, 35.0, -97.0) == 0.0);
  CHECK(haversine_miles(35.2, -97.4, 36.1, -96.9) ==
        doctest::Approx(haversine_miles(36.1, -96.9, 35.2, -97.4)).epsilon(1e-14));

  // one degree of longitude along the equator
  const double arc = kEarthRadiusMiles * std::numbers::pi / 180.0;
  CHECK(haversine_miles(0.0, 0.0, 0.0, 1.0) == doctest::Approx(arc).epsilon(1e-10));

  // antipodal points: half the circumference
  CHECK(haversine_miles(0.0, 0.0, 0.0, 180.0) ==
        doctest::Approx(kEarthRadiusMiles * std::numbers::pi).epsilon(1e-10));

  CHECK_THROWS_AS(haversine_miles(91.0, 0.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(haversine_miles(0.0, 181.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("haversine agrees with the spherical law of cosines") {
  const double pts[][4] = {
      {35.2, -97.4, 36.1, -96.9}, {40.7, -74.0, 34.1, -118.2},
      {33.5, -86.8, 33.6, -86.7}, {-12.0, 130.9, 51.5, -0.1},
  };
  for (const auto& p : pts)
    CHECK(haversine_miles(p[0], p[1], p[2], p[3]) ==
          doctest::Approx(sloc_miles(p[0], p[1], p[2], p[3])).epsilon(1e-6));
}

TEST_CASE("nearest_retailer brute force and tie break") {
  std::vector<Retailer> rs{retailer("r3", 35.5, -97.1), retailer("r1", 35.2, -97.2),
                           retailer("r2", 36.0, -96.5)};
  Tract t = tract("t", 35.21, -97.21);
  auto [id, dist] = nearest_retailer(t, rs);
  double best = 1e300;
  std::string best_id;
  for (const auto& r : rs) {
    const double d = haversine_miles(t.centroid_lat, t.centroid_lon, r.lat, r.lon);
    if (d < best) {
      best = d;
      best_id = r.id;
    }
  }
  CHECK(id == best_id);
  CHECK(dist == doctest::Approx(best));

  // exact tie: two retailers at the same point, smallest id wins
  std::vector<Retailer> tie{retailer("rb", 35.0, -97.0), retailer("ra", 35.0, -97.0)};
  CHECK(nearest_retailer(t, tie).first == "ra");

  CHECK_THROWS_AS(nearest_retailer(t, {}), ValidationError);
}

TEST_CASE("discretize_access boundary is inclusive") {
  CHECK(discretize_access(0.5, 0.5) == 1);
  CHECK(discretize_access(0.4999, 0.5) == 1);
  CHECK(discretize_access(0.5001, 0.5) == 0);
  CHECK(discretize_access(0.0, 0.5) == 1);
}

TEST_CASE("build_access_table") {
  std::vector<Tract> ts{tract("b", 0.0, 0.30, 1), tract("a", 0.0, 0.0, 0),
                        tract("c", 0.0, 1.0, 0)};
  std::vector<Retailer> rs{retailer("r1", 0.0, 0.0)};
  const double arc = kEarthRadiusMiles * std::numbers::pi / 180.0;  // ~69 mi/deg
  AccessTable at = build_access_table(ts, rs, {25.0, 50.0});

  REQUIRE(at.rows.size() == 3);
  // sorted by tract id
  CHECK(at.rows[0].tract_id == "a");
  CHECK(at.rows[1].tract_id == "b");
  CHECK(at.rows[2].tract_id == "c");
  CHECK(at.rows[0].d_haversine == 0.0);
  CHECK(at.rows[1].d_haversine == doctest::Approx(0.30 * arc).epsilon(1e-10));

  // indicators monotone in the threshold: access at 25 implies access at 50
  for (const auto& row : at.rows) {
    REQUIRE(row.xstar.size() == 2);
    CHECK(row.xstar[0] <= row.xstar[1]);
    CHECK_FALSE(row.d_route.has_value());
    CHECK_FALSE(row.x[0].has_value());
  }
  CHECK(at.rows[0].xstar == std::vector<int>{1, 1});
  CHECK(at.rows[1].xstar == std::vector<int>{1, 1});  // ~20.7 miles
  CHECK(at.rows[2].xstar == std::vector<int>{0, 0});  // ~69 miles
}

TEST_CASE("merge_route_distances") {
  std::vector<Tract> ts{tract("a", 0.0, 0.0), tract("b", 0.0, 0.3)};
  std::vector<Retailer> rs{retailer("r1", 0.0, 0.0)};
  AccessTable at = build_access_table(ts, rs, {25.0});

  SUBCASE("fills route indicators, straight-line left intact") {
    merge_route_distances(at, {{"a", 1.0}, {"b", 30.0}});
    CHECK(at.rows[0].d_route == 1.0);
    CHECK(*at.rows[0].x[0] == 1);
    CHECK(*at.rows[1].x[0] == 0);  // 30 > 25 by road even though 20.7 direct
    CHECK(at.rows[1].xstar[0] == 1);
  }
  SUBCASE("unknown tract id is rejected") {
    CHECK_THROWS_AS(merge_route_distances(at, {{"zzz", 1.0}}), ValidationError);
  }
  SUBCASE("route shorter than the straight line fails integrity") {
    CHECK_THROWS_AS(merge_route_distances(at, {{"b", 10.0}}), IntegrityError);
  }
  SUBCASE("sub-tolerance shortfall is allowed") {
    merge_route_distances(at, {{"a", 0.0}});
    CHECK(at.rows[0].d_route == 0.0);
  }
}

TEST_CASE("draw_query_design stratification") {
  // 80 metro and 40 non-metro tracts with access, plus tracts without access
  std::vector<Tract> ts;
  std::vector<Retailer> rs{retailer("r1", 0.0, 0.0)};
  auto pad = [](int v) {
    std::string s = std::to_string(v);
    return std::string(3 - s.size(), '0') + s;
  };
  int k = 0;
  for (int i = 0; i < 80; ++i) ts.push_back(tract("m" + pad(k++), 0.0, 0.0, 1));
  for (int i = 0; i < 40; ++i) ts.push_back(tract("n" + pad(k++), 0.0, 0.0, 0));
  for (int i = 0; i < 30; ++i) ts.push_back(tract("f" + pad(k++), 0.0, 5.0, 1));
  AccessTable at = build_access_table(ts, rs, {25.0});
  std::mt19937_64 rng(99);

  SUBCASE("even split when both strata are large enough") {
    auto ids = draw_query_design(at, 0, 77, rng);
    CHECK(ids.size() == 77);
    int metro = 0, nonmetro = 0;
    for (const auto& id : ids) {
      CHECK(id[0] != 'f');  // no-access tracts are never queried
      (id[0] == 'm' ? metro : nonmetro) += 1;
    }
    CHECK(metro == 39);  // metropolitan stratum takes the ceiling
    CHECK(nonmetro == 38);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }
  SUBCASE("shortfall in one stratum spills into the other") {
    auto ids = draw_query_design(at, 0, 100, rng);
    CHECK(ids.size() == 100);
    int nonmetro = 0;
    for (const auto& id : ids)
      if (id[0] == 'n') ++nonmetro;
    CHECK(nonmetro == 40);  // whole stratum exhausted, metro covers the rest
  }
  SUBCASE("request beyond the accessible pool is rejected") {
    CHECK_THROWS_AS(draw_query_design(at, 0, 121, rng), ValidationError);
  }
}
