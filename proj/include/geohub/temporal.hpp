#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <geohub/clustering.hpp>
#include <geohub/corpus.hpp>
#include <geohub/geodesy.hpp>

namespace geohub {

struct TrendEntry {
    int year = 0;
    GeoPoint centroid;
    Distance rms;
    std::int64_t total_weight = 0;
};

struct TrendSeries {
    std::vector<TrendEntry> entries;  // strictly increasing years
    RegionFilter region = RegionFilter::all();
};

/// Per-year planar centroid and RMS dispersion. Records are deduplicated per
/// (paper, city) and filtered before aggregation; empty years are omitted.
TrendSeries yearly_centroids(std::span<const PublicationRecord> records, const RegionFilter& region,
                             YearRange years, Metric metric = Metric::kVincenty,
                             bool great_circle_fallback = false, int workers = 0);

struct DriftReport {
    double delta_lat = 0.0;  // degrees, last minus first
    double delta_lon = 0.0;
    double lat_slope = 0.0;  // degrees per year, ordinary least squares
    double lon_slope = 0.0;
};

/// Throws kTooFewYears for fewer than two entries.
DriftReport drift_stats(const TrendSeries& series);

struct CentroidMatch {
    int index_a = 0;
    int index_b = 0;
    Distance displacement;
};

struct StabilityReport {
    std::vector<CentroidMatch> matches;  // in matching order
    Distance max_displacement;
};

/// Greedy closest-pair matching of two centroid sets. Throws kKMismatch.
StabilityReport cluster_stability(const ClusterModel& a, const ClusterModel& b,
                                  Metric metric = Metric::kVincenty,
                                  bool great_circle_fallback = false);

}  // namespace geohub
