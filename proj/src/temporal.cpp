#include <geohub/temporal.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <atomic>
#include <exception>
#include <thread>

#include <geohub/parallel.hpp>

#include <geohub/error.hpp>

namespace geohub {

TrendSeries yearly_centroids(std::span<const PublicationRecord> records, const RegionFilter& region, YearRange years,
                             Metric metric, bool great_circle_fallback, int workers) {
    if (years.first > years.last) throw GeoError(ErrorCode::kInvalidArgument, "year range is reversed");

    PaperCityDeduper dedup;
    std::map<int, CityAggregator> per_year;
    for (const auto& r : records) {
        if (!years.contains(r.year) || !region.accepts(r) || !dedup.admit(r)) continue;
        per_year.try_emplace(r.year).first->second.add(r);
    }

    TrendSeries series;
    series.region = region;
    series.entries.resize(per_year.size());
    std::vector<std::pair<int, const CityAggregator*>> slices;
    for (const auto& [year, agg] : per_year) slices.emplace_back(year, &agg);

    // Years are independent; each writes its own slot.
    std::vector<std::exception_ptr> errors(slices.size());
    auto one_year = [&](std::size_t i) {
        const auto cities = slices[i].second->cities();
        const auto points = to_weighted_points(cities);
        TrendEntry& e = series.entries[i];
        e.year = slices[i].first;
        e.centroid = planar_centroid(points);
        e.rms = rms_dispersion(points, e.centroid, metric, great_circle_fallback);
        e.total_weight = total_weight(cities);
    };
    const int threads = std::min<int>(resolve_workers(workers), static_cast<int>(slices.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < slices.size(); ++i) one_year(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            for (std::size_t i = next.fetch_add(1); i < slices.size(); i = next.fetch_add(1)) {
                try {
                    one_year(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(body);
        body();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return series;
}

namespace {

double ols_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double x_bar = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double y_bar = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - x_bar) * (y[i] - y_bar);
        sxx += (x[i] - x_bar) * (x[i] - x_bar);
    }
    return sxy / sxx;
}

}  // namespace

DriftReport drift_stats(const TrendSeries& series) {
    const auto& e = series.entries;
    if (e.size() < 2) throw GeoError(ErrorCode::kTooFewYears, "drift needs at least two years");
    std::vector<double> year, lat, lon;
    for (const auto& entry : e) {
        year.push_back(entry.year);
        lat.push_back(entry.centroid.lat);
        lon.push_back(entry.centroid.lon);
    }
    DriftReport r;
    r.delta_lat = e.back().centroid.lat - e.front().centroid.lat;
    r.delta_lon = e.back().centroid.lon - e.front().centroid.lon;
    r.lat_slope = ols_slope(year, lat);
    r.lon_slope = ols_slope(year, lon);
    return r;
}

StabilityReport cluster_stability(const ClusterModel& a, const ClusterModel& b, Metric metric,
                                  bool great_circle_fallback) {
    if (a.k() != b.k())
        throw GeoError(ErrorCode::kKMismatch,
                       "cannot match k=" + std::to_string(a.k()) + " against k=" + std::to_string(b.k()));
    struct Pair {
        double d;
        int i, j;
    };
    // Evaluate each pair in a fixed point order so swapping a and b gives identical distances.
    auto canonical_distance = [&](const GeoPoint& p, const GeoPoint& q) {
        const bool swap = std::tie(q.lat, q.lon) < std::tie(p.lat, p.lon);
        return distance(swap ? q : p, swap ? p : q, metric, great_circle_fallback).in_meters();
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < a.k(); ++i)
        for (int j = 0; j < b.k(); ++j)
            pairs.push_back({canonical_distance(a.centroids[static_cast<std::size_t>(i)],
                                                b.centroids[static_cast<std::size_t>(j)]),
                             i, j});
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& x, const Pair& y) { return std::tie(x.d, x.i, x.j) < std::tie(y.d, y.i, y.j); });

    StabilityReport report;
    std::vector<bool> used_a(static_cast<std::size_t>(a.k())), used_b(static_cast<std::size_t>(b.k()));
    for (const auto& p : pairs) {
        if (used_a[static_cast<std::size_t>(p.i)] || used_b[static_cast<std::size_t>(p.j)]) continue;
        used_a[static_cast<std::size_t>(p.i)] = used_b[static_cast<std::size_t>(p.j)] = true;
        report.matches.push_back({p.i, p.j, Distance::meters(p.d)});
        report.max_displacement = std::max(report.max_displacement, Distance::meters(p.d));
    }
    return report;
}

}  // namespace geohub
