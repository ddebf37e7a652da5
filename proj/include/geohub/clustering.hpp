#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <geohub/corpus.hpp>
#include <geohub/geodesy.hpp>

namespace geohub {

struct ClusterConfig {
    int k = 1;
    int restarts = 10;
    int max_iterations = 500;
    std::uint64_t seed = 42;
    Metric metric = Metric::kVincenty;
    CentroidRule centroid_rule = CentroidRule::kPlanarMean;
    bool great_circle_fallback = false;
    int workers = 0;  // <= 0: hardware concurrency, capped by GEOHUB_THREADS

    /// Throws kInvalidArgument for non-positive counts.
    void validate() const;
};

/// Nearest-centroid assignment of every city with the distance to it.
struct Assignment {
    std::vector<int> cluster;
    std::vector<double> distance_m;
    Distance rms;
    Distance mean;
};

/// Assigns each city to its nearest centroid (ties to the lowest index) and
/// reduces the weighted RMS and mean distance in a fixed chunk order.
Assignment assign_nearest(std::span<const CityAggregate> cities, std::span<const GeoPoint> centroids,
                          Metric metric, bool great_circle_fallback = false, int workers = 0);

struct ClusterModel {
    std::vector<GeoPoint> centroids;
    std::vector<std::string> city_keys;  // input order
    std::vector<int> assignment;         // parallel to city_keys
    std::vector<std::int64_t> cluster_weight;
    std::vector<Distance> per_cluster_rms;
    std::vector<Distance> per_cluster_mean;
    Distance overall_rms;
    Distance overall_mean;
    int iterations_used = 0;
    int restart_index_of_best = 0;

    int k() const noexcept { return static_cast<int>(centroids.size()); }
    std::optional<int> cluster_of(std::string_view city_key) const;
};

/// Weighted k-means with geodesic assignment and k-means++ seeding.
///
/// Runs cfg.restarts Lloyd iterations seeded from cfg.seed, cfg.seed + 1, ...
/// and keeps the run with the smallest weighted RMS. Throws kEmptyInput,
/// kKTooLarge, or propagates kNonConvergence.
ClusterModel kmeans_fit(std::span<const CityAggregate> cities, const ClusterConfig& cfg);

/// Lloyd iteration from the given starting centroids.
ClusterModel kmeans_refine(std::span<const CityAggregate> cities, std::span<const GeoPoint> initial,
                           const ClusterConfig& cfg);

struct CurveEntry {
    int k = 0;
    Distance rms;
    Distance mean;
    std::vector<GeoPoint> centroids;
};

struct DispersionCurve {
    std::vector<CurveEntry> entries;  // k = 1 .. k_max
};

/// RMS of nearest-centroid distance for k = 1..k_max. Each k keeps the best
/// of the k-means restarts and a warm start that adds the worst-served city
/// to the k-1 winner, so RMS never increases with k.
DispersionCurve dispersion_curve(std::span<const CityAggregate> cities, int k_max,
                                 const ClusterConfig& cfg);

enum class SelectMode { kDelta, kRadius };
enum class CurveStat { kRms, kMean };

/// Delta: smallest k with curve(k) - curve(k+1) < threshold.
/// Radius: smallest k with curve(k) < threshold.
/// Throws kInvalidThreshold for threshold <= 0.
std::optional<int> select_k(const DispersionCurve& curve, SelectMode mode, Distance threshold,
                            CurveStat stat = CurveStat::kRms);

}  // namespace geohub
