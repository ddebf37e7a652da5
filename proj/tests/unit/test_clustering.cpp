#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <synthetic.hpp>

#include <geohub/clustering.hpp>
#include <geohub/error.hpp>

using namespace geohub;

namespace {

ClusterConfig config(int k, std::uint64_t seed = 42) {
    ClusterConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.workers = 1;
    return cfg;
}

// Test-side haversine; keeps the oracle off the library's distance code.
double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    const double r = std::numbers::pi / 180.0;
    const double dphi = (b.lat - a.lat) * r, dlam = (b.lon - a.lon) * r;
    const double h = std::pow(std::sin(dphi / 2), 2) + std::cos(a.lat * r) * std::cos(b.lat * r) * std::pow(std::sin(dlam / 2), 2);
    return 2 * 6371.0088 * std::asin(std::sqrt(h));
}

// Plain weighted Lloyd started from the given centers.
std::vector<GeoPoint> oracle_lloyd(const std::vector<CityAggregate>& cities, std::vector<GeoPoint> centers) {
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> w(centers.size()), lat(centers.size()), lon(centers.size());
        for (const auto& c : cities) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < centers.size(); ++j)
                if (haversine_km(c.point, centers[j]) < haversine_km(c.point, centers[best])) best = j;
            w[best] += static_cast<double>(c.weight);
            lat[best] += static_cast<double>(c.weight) * c.point.lat;
            lon[best] += static_cast<double>(c.weight) * c.point.lon;
        }
        for (std::size_t j = 0; j < centers.size(); ++j) centers[j] = {lat[j] / w[j], lon[j] / w[j]};
    }
    return centers;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const GeoError& e) {
        return e.code();
    }
    FAIL("expected GeoError");
    return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("k = 1 reduces to the overall centroid") {
    const auto cities = testing::random_cities(3, 120);
    const ClusterModel m = kmeans_fit(cities, config(1));
    const auto points = to_weighted_points(cities);
    const GeoPoint c = planar_centroid(points);
    REQUIRE(m.k() == 1);
    CHECK(std::abs(m.centroids[0].lat - c.lat) <= 1e-12);
    CHECK(std::abs(m.centroids[0].lon - c.lon) <= 1e-12);
    CHECK(m.overall_rms.in_meters() ==
          doctest::Approx(rms_dispersion(points, c, Metric::kVincenty).in_meters()).epsilon(1e-12));
    CHECK(m.cluster_weight[0] == total_weight(cities));
}

TEST_CASE("k = n gives zero dispersion") {
    const auto cities = testing::random_cities(4, 15);
    const ClusterModel m = kmeans_fit(cities, config(15));
    CHECK(m.overall_rms.in_meters() == 0.0);
    std::vector<int> seen(m.assignment);
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("two blobs are recovered") {
    const auto blobs = testing::two_blobs(17);
    const auto oracle = oracle_lloyd(blobs.cities, {blobs.mean_a, blobs.mean_b});
    CHECK(haversine_km(oracle[0], blobs.mean_a) < 1e-9);
    CHECK(haversine_km(oracle[1], blobs.mean_b) < 1e-9);

    const ClusterModel m = kmeans_fit(blobs.cities, config(2));
    for (const GeoPoint& truth : oracle) {
        const double nearest = std::min(haversine_km(m.centroids[0], truth), haversine_km(m.centroids[1], truth));
        CHECK(nearest < 1.0);
    }
    // Cluster labels are consistent with blob labels.
    const int first = m.assignment[0];
    for (std::size_t i = 0; i < blobs.cities.size(); ++i)
        CHECK((m.assignment[i] == first) == (blobs.label[i] == blobs.label[0]));
}

TEST_CASE("input validation") {
    CHECK(code_of([] { kmeans_fit({}, config(1)); }) == ErrorCode::kEmptyInput);
    const auto cities = testing::random_cities(1, 5);
    CHECK(code_of([&] { kmeans_fit(cities, config(6)); }) == ErrorCode::kKTooLarge);
    CHECK(code_of([&] { kmeans_fit(cities, config(0)); }) == ErrorCode::kInvalidArgument);
    auto cfg = config(2);
    cfg.restarts = 0;
    CHECK(code_of([&] { kmeans_fit(cities, cfg); }) == ErrorCode::kInvalidArgument);
    const std::vector<CityAggregate> world{{"a", {0, -170}, 1}, {"b", {0, 170}, 1}};
    CHECK(code_of([&] { kmeans_fit(world, config(1)); }) == ErrorCode::kAntimeridianStraddle);
}

TEST_CASE("every city sits with its nearest centroid") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto cities = testing::random_cities(seed, 200);
        const ClusterModel m = kmeans_fit(cities, config(5, seed));
        for (std::size_t i = 0; i < cities.size(); ++i) {
            const double own =
                vincenty_distance(cities[i].point, m.centroids[static_cast<std::size_t>(m.assignment[i])]).distance.in_meters();
            for (const auto& c : m.centroids)
                CHECK(own <= vincenty_distance(cities[i].point, c).distance.in_meters() + 1e-6);
        }
        std::int64_t total = 0;
        for (auto w : m.cluster_weight) {
            CHECK(w > 0);
            total += w;
        }
        CHECK(total == total_weight(cities));
    }
}

TEST_CASE("doubling every weight changes nothing") {
    const auto cities = testing::random_cities(9, 150);
    auto doubled = cities;
    for (auto& c : doubled) c.weight *= 2;
    const ClusterModel a = kmeans_fit(cities, config(4));
    const ClusterModel b = kmeans_fit(doubled, config(4));
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignment == b.assignment);
    CHECK(a.overall_rms == b.overall_rms);
}

TEST_CASE("results do not depend on the worker count") {
    const auto cities = testing::random_cities(21, 5000);
    auto cfg = config(6);
    cfg.restarts = 3;
    const ClusterModel a = kmeans_fit(cities, cfg);
    cfg.workers = 4;
    const ClusterModel b = kmeans_fit(cities, cfg);
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignment == b.assignment);
    CHECK(a.overall_rms == b.overall_rms);
    CHECK(a.overall_mean == b.overall_mean);
}

TEST_CASE("coincident starting centroids are repaired") {
    const auto cities = testing::random_cities(2, 60);
    const std::vector<GeoPoint> start(3, cities[0].point);
    const ClusterModel m = kmeans_refine(cities, start, config(3));
    for (auto w : m.cluster_weight) CHECK(w > 0);
}

TEST_CASE("assignment ties go to the lowest index") {
    const std::vector<CityAggregate> cities{{"mid", {0, 0}, 1}};
    const std::vector<GeoPoint> centroids{{0, 1}, {0, -1}};
    const Assignment a = assign_nearest(cities, centroids, Metric::kGreatCircle);
    CHECK(a.cluster[0] == 0);
}

TEST_CASE("great-circle metric and spherical centroids") {
    const auto blobs = testing::two_blobs(5);
    auto cfg = config(2);
    cfg.metric = Metric::kGreatCircle;
    cfg.centroid_rule = CentroidRule::kSphericalMean;
    const ClusterModel m = kmeans_fit(blobs.cities, cfg);
    const double nearest =
        std::min(haversine_km(m.centroids[0], blobs.mean_a), haversine_km(m.centroids[1], blobs.mean_a));
    CHECK(nearest < 5.0);  // spherical and planar means differ slightly
}

TEST_CASE("dispersion curve basics") {
    const auto cities = testing::random_cities(8, 80);
    const DispersionCurve one = dispersion_curve(cities, 1, config(1));
    REQUIRE(one.entries.size() == 1);
    const auto points = to_weighted_points(cities);
    CHECK(one.entries[0].rms.in_meters() ==
          doctest::Approx(rms_dispersion(points, planar_centroid(points), Metric::kVincenty).in_meters()).epsilon(1e-12));

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cfg = config(1, seed);
        cfg.restarts = 3;
        const DispersionCurve c = dispersion_curve(testing::random_cities(seed * 31, 60), 8, cfg);
        REQUIRE(c.entries.size() == 8);
        for (std::size_t i = 1; i < c.entries.size(); ++i) {
            CHECK(c.entries[i].k == static_cast<int>(i) + 1);
            CHECK(c.entries[i].centroids.size() == i + 1);
            CHECK(c.entries[i].rms <= c.entries[i - 1].rms);
        }
    }
    CHECK(code_of([&] { dispersion_curve(cities, 81, config(1)); }) == ErrorCode::kKTooLarge);
}

TEST_CASE("two-blob dispersion curve has its elbow at 2") {
    // With gaussian spread sigma per axis, the RMS radius within a blob is
    // sigma*sqrt(2) ~ 42 km; at k = 1 the 500 km half-separation dominates.
    const auto blobs = testing::two_blobs(23);
    const DispersionCurve c = dispersion_curve(blobs.cities, 3, config(1));
    const double k1 = c.entries[0].rms.in_kilometers();
    const double k2 = c.entries[1].rms.in_kilometers();
    const double k3 = c.entries[2].rms.in_kilometers();
    CHECK(k1 == doctest::Approx(std::sqrt(500.0 * 500.0 + 2 * 30.0 * 30.0)).epsilon(0.1));
    CHECK(k2 == doctest::Approx(30.0 * std::sqrt(2.0)).epsilon(0.35));
    CHECK(k2 - k3 < 0.1 * (k1 - k2));
}

TEST_CASE("select_k rules") {
    DispersionCurve curve;
    const double miles[] = {500, 200, 120, 95, 80, 48};
    for (int k = 1; k <= 6; ++k)
        curve.entries.push_back({k, Distance::miles(miles[k - 1]), Distance::miles(miles[k - 1] * 0.8), {}});
    CHECK(select_k(curve, SelectMode::kRadius, Distance::miles(100)) == 4);
    CHECK(select_k(curve, SelectMode::kRadius, Distance::miles(50)) == 6);
    CHECK(select_k(curve, SelectMode::kDelta, Distance::miles(30)) == 3);
    CHECK(select_k(curve, SelectMode::kRadius, Distance::miles(40)) == std::nullopt);
    CHECK(select_k(curve, SelectMode::kDelta, Distance::miles(10)) == std::nullopt);
    // mean column: 400, 160, 96, ...
    CHECK(select_k(curve, SelectMode::kRadius, Distance::miles(100), CurveStat::kMean) == 3);
    CHECK(code_of([&] { select_k(curve, SelectMode::kRadius, Distance::meters(0)); }) ==
          ErrorCode::kInvalidThreshold);
}

}  // TEST_SUITE
