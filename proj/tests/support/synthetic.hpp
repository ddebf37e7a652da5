#pragma once

// Test-only corpus generators. Offsets use a local flat-earth approximation,
// which is independent of the library's geodesic code.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <geohub/corpus.hpp>

namespace geohub::testing {

inline constexpr double kKmPerDegree = 111.32;

inline GeoPoint offset_km(const GeoPoint& origin, double east_km, double north_km) {
    const double lat = origin.lat + north_km / kKmPerDegree;
    const double lon = origin.lon + east_km / (kKmPerDegree * std::cos(origin.lat * std::numbers::pi / 180.0));
    return {lat, lon};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline double gaussian(std::mt19937_64& rng) {
    // Box-Muller; std::normal_distribution is not specified bit-for-bit.
    const double u1 = std::max(1e-300, uniform(rng, 0.0, 1.0));
    const double u2 = uniform(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct TwoBlobs {
    std::vector<CityAggregate> cities;
    GeoPoint mean_a, mean_b;  // weighted planar means of each blob's members
    std::vector<int> label;   // 0 or 1
};

/// Two blobs of `per_blob` cities, `separation_km` apart east-west, each city
/// within `spread_km` (gaussian sigma) of its blob center.
inline TwoBlobs two_blobs(std::uint64_t seed, int per_blob = 50, double separation_km = 1000.0,
                          double spread_km = 30.0, GeoPoint center = {39.0, -95.0}) {
    std::mt19937_64 rng(seed);
    TwoBlobs out;
    const GeoPoint centers[2] = {offset_km(center, -separation_km / 2, 0), offset_km(center, separation_km / 2, 0)};
    double sw[2] = {0, 0}, slat[2] = {0, 0}, slon[2] = {0, 0};
    for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < per_blob; ++i) {
            const GeoPoint p = offset_km(centers[b], spread_km * gaussian(rng), spread_km * gaussian(rng));
            const auto w = static_cast<std::int64_t>(1 + rng() % 20);
            out.cities.push_back({"blob" + std::to_string(b) + "_" + std::to_string(i), p, w});
            out.label.push_back(b);
            sw[b] += static_cast<double>(w);
            slat[b] += static_cast<double>(w) * p.lat;
            slon[b] += static_cast<double>(w) * p.lon;
        }
    }
    out.mean_a = {slat[0] / sw[0], slon[0] / sw[0]};
    out.mean_b = {slat[1] / sw[1], slon[1] / sw[1]};
    return out;
}

/// Random weighted cities inside a lower-48-sized box.
inline std::vector<CityAggregate> random_cities(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::vector<CityAggregate> out;
    for (int i = 0; i < n; ++i) {
        const GeoPoint p{uniform(rng, 25.0, 49.0), uniform(rng, -124.0, -67.0)};
        out.push_back({"c" + std::to_string(i), p, static_cast<std::int64_t>(1 + rng() % 50)});
    }
    return out;
}

struct Metro {
    const char* name;
    const char* admin1;
    GeoPoint center;
    int papers;  // relative output
};

/// Eight large US research metros.
inline const std::vector<Metro>& us_metros() {
    static const std::vector<Metro> metros = {
        {"Boston", "MA", {42.3601, -71.0589}, 50}, {"New York", "NY", {40.7128, -74.0060}, 55},
        {"Baltimore", "MD", {39.2904, -76.6122}, 27}, {"Philadelphia", "PA", {39.9526, -75.1652}, 27},
        {"Los Angeles", "CA", {34.0522, -118.2437}, 26}, {"San Francisco", "CA", {37.7749, -122.4194}, 22},
        {"Chicago", "IL", {41.8781, -87.6298}, 20}, {"Houston", "TX", {29.7604, -95.3698}, 18},
    };
    return metros;
}

/// Cities scattered (sigma `spread_km`) around the eight metros, each with a
/// paper count proportional to its metro's weight.
inline std::vector<CityAggregate> metro_cities(std::uint64_t seed, int cities_per_metro = 25,
                                               double spread_km = 40.0) {
    std::mt19937_64 rng(seed);
    std::vector<CityAggregate> out;
    for (const auto& m : us_metros()) {
        for (int i = 0; i < cities_per_metro; ++i) {
            const GeoPoint p = offset_km(m.center, spread_km * gaussian(rng), spread_km * gaussian(rng));
            const auto w = static_cast<std::int64_t>(1 + (rng() % static_cast<std::uint64_t>(4 * m.papers)));
            out.push_back({std::string(m.name) + "_" + std::to_string(i) + "|" + m.admin1 + "|US", p, w});
        }
    }
    return out;
}

/// Random publication records across US states (including territories) and
/// China, with coauthor duplicates.
inline std::vector<PublicationRecord> random_records(std::uint64_t seed, int papers, int year_lo = 1988,
                                                     int year_hi = 2016) {
    struct Place {
        const char* city;
        const char* admin1;
        const char* country;
        GeoPoint point;
    };
    static const Place places[] = {
        {"Boston", "MA", "US", {42.3601, -71.0589}},     {"New York", "NY", "US", {40.7128, -74.0060}},
        {"Chicago", "IL", "US", {41.8781, -87.6298}},    {"Houston", "TX", "US", {29.7604, -95.3698}},
        {"Seattle", "WA", "US", {47.6062, -122.3321}},   {"Honolulu", "HI", "US", {21.3069, -157.8583}},
        {"Anchorage", "AK", "US", {61.2181, -149.9003}}, {"San Juan", "PR", "US", {18.4655, -66.1057}},
        {"Beijing", "BJ", "CN", {39.9042, 116.4074}},    {"Shanghai", "SH", "CN", {31.2304, 121.4737}},
        {"Wuhan", "HB", "CN", {30.5928, 114.3055}},      {"Hong Kong", "HK", "CN", {22.3193, 114.1694}},
        {"Taipei", "TW", "CN", {25.0330, 121.5654}},     {"London", "ENG", "GB", {51.5074, -0.1278}},
    };
    std::mt19937_64 rng(seed);
    std::vector<PublicationRecord> out;
    for (int p = 0; p < papers; ++p) {
        const int year = year_lo + static_cast<int>(rng() % static_cast<std::uint64_t>(year_hi - year_lo + 1));
        const int authors = 1 + static_cast<int>(rng() % 4);
        for (int a = 0; a < authors; ++a) {
            const Place& pl = places[rng() % std::size(places)];
            PublicationRecord r;
            r.paper_id = "P" + std::to_string(seed) + "_" + std::to_string(p);
            r.year = year;
            r.city_key = std::string(pl.city) + "|" + pl.admin1 + "|" + pl.country;
            r.admin1 = pl.admin1;
            r.country = pl.country;
            r.point = pl.point;
            out.push_back(r);
        }
    }
    return out;
}

/// Records whose per-year weighted mean latitude moves by `lat_per_year`
/// degrees; longitude has no trend. Each year uses the same 20 cities with a
/// fixed paper count, shifted rigidly and jittered by `jitter_km` (sigma).
inline std::vector<PublicationRecord> drifting_records(std::uint64_t seed, int first_year, int years,
                                                       double lat_per_year, double jitter_km = 5.0,
                                                       GeoPoint origin = {38.7, -89.2}) {
    std::mt19937_64 rng(seed);
    std::vector<GeoPoint> base;
    std::vector<int> papers;
    for (int c = 0; c < 20; ++c) {
        base.push_back(offset_km(origin, uniform(rng, -900, 900), uniform(rng, -500, 500)));
        papers.push_back(1 + static_cast<int>(rng() % 30));
    }
    std::vector<PublicationRecord> out;
    for (int y = 0; y < years; ++y) {
        for (int c = 0; c < 20; ++c) {
            const GeoPoint shifted{base[static_cast<std::size_t>(c)].lat + lat_per_year * y,
                                   base[static_cast<std::size_t>(c)].lon};
            const GeoPoint where = offset_km(shifted, jitter_km * gaussian(rng), jitter_km * gaussian(rng));
            for (int k = 0; k < papers[static_cast<std::size_t>(c)]; ++k) {
                PublicationRecord r;
                r.paper_id = "Y" + std::to_string(y) + "C" + std::to_string(c) + "K" + std::to_string(k);
                r.year = first_year + y;
                // A moved city is a different geocode, so it gets a per-year key.
                r.city_key = "city" + std::to_string(c) + "_" + std::to_string(y) + "|IL|US";
                r.admin1 = "IL";
                r.country = "US";
                r.point = where;
                out.push_back(r);
            }
        }
    }
    return out;
}

}  // namespace geohub::testing
