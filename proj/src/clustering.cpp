#include <geohub/clustering.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <geohub/error.hpp>
#include <geohub/parallel.hpp>

namespace geohub {

void ClusterConfig::validate() const {
    if (k < 1) throw GeoError(ErrorCode::kInvalidArgument, "k must be positive");
    if (restarts < 1) throw GeoError(ErrorCode::kInvalidArgument, "restarts must be positive");
    if (max_iterations < 1) throw GeoError(ErrorCode::kInvalidArgument, "max_iterations must be positive");
}

std::optional<int> ClusterModel::cluster_of(std::string_view city_key) const {
    for (std::size_t i = 0; i < city_keys.size(); ++i)
        if (city_keys[i] == city_key) return assignment[i];
    return std::nullopt;
}

Assignment assign_nearest(std::span<const CityAggregate> cities, std::span<const GeoPoint> centroids, Metric metric,
                          bool great_circle_fallback, int workers) {
    if (cities.empty()) throw GeoError(ErrorCode::kEmptyInput, "no cities");
    if (centroids.empty()) throw GeoError(ErrorCode::kInvalidArgument, "no centroids");

    Assignment out;
    out.cluster.resize(cities.size());
    out.distance_m.resize(cities.size());
    struct Partial {
        double w = 0, d = 0, d2 = 0;
    };
    std::vector<Partial> partials(chunk_count(cities.size()));

    for_each_chunk(cities.size(), workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Partial part;
        for (std::size_t i = begin; i < end; ++i) {
            int best = 0;
            double best_d = distance(cities[i].point, centroids[0], metric, great_circle_fallback).in_meters();
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                const double d = distance(cities[i].point, centroids[c], metric, great_circle_fallback).in_meters();
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            out.cluster[i] = best;
            out.distance_m[i] = best_d;
            const double w = static_cast<double>(cities[i].weight);
            part.w += w;
            part.d += w * best_d;
            part.d2 += w * best_d * best_d;
        }
        partials[chunk] = part;
    });

    Partial total;
    for (const auto& p : partials) {
        total.w += p.w;
        total.d += p.d;
        total.d2 += p.d2;
    }
    if (!(total.w > 0.0)) throw GeoError(ErrorCode::kInvalidArgument, "total weight must be positive");
    out.rms = Distance::meters(std::sqrt(total.d2 / total.w));
    out.mean = Distance::meters(total.d / total.w);
    return out;
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index i with cumulative weight exceeding u * total; skips zero-weight entries.
std::size_t sample_index(std::span<const double> weights, double total, std::mt19937_64& rng) {
    const double target = uniform01(rng) * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        cumulative += weights[i];
        last_positive = i;
        if (cumulative > target) return i;
    }
    return last_positive;
}

std::vector<GeoPoint> seed_plus_plus(std::span<const CityAggregate> cities, const ClusterConfig& cfg,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = cities.size();
    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = static_cast<double>(cities[i].weight);
        total += weights[i];
    }
    std::vector<GeoPoint> centers;
    std::vector<bool> chosen(n, false);
    std::size_t first = sample_index(weights, total, rng);
    centers.push_back(cities[first].point);
    chosen[first] = true;

    std::vector<double> nearest(n);
    for_each_chunk(n, cfg.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            nearest[i] = distance(cities[i].point, centers[0], cfg.metric, cfg.great_circle_fallback).in_meters();
    });

    std::vector<double> score(n);
    while (centers.size() < static_cast<std::size_t>(cfg.k)) {
        double score_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            score[i] = weights[i] * nearest[i] * nearest[i];
            score_total += score[i];
        }
        std::size_t pick;
        if (score_total > 0.0) {
            pick = sample_index(score, score_total, rng);
        } else {
            // Every city already sits on a center.
            pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        }
        chosen[pick] = true;
        const GeoPoint center = cities[pick].point;
        centers.push_back(center);
        for_each_chunk(n, cfg.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double d = distance(cities[i].point, center, cfg.metric, cfg.great_circle_fallback).in_meters();
                nearest[i] = std::min(nearest[i], d);
            }
        });
    }
    return centers;
}

// Hands each empty cluster the city farthest from its current centroid,
// taken from a cluster that keeps at least one other member.
void repair_empty(std::span<const CityAggregate> cities, std::vector<GeoPoint>& centroids, Assignment& asg) {
    const std::size_t k = centroids.size();
    std::vector<std::size_t> members(k, 0);
    for (int c : asg.cluster) ++members[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < k; ++j) {
        if (members[j] != 0) continue;
        std::size_t victim = cities.size();
        double farthest = -1.0;
        for (std::size_t i = 0; i < cities.size(); ++i) {
            if (members[static_cast<std::size_t>(asg.cluster[i])] < 2) continue;
            if (asg.distance_m[i] > farthest) {
                farthest = asg.distance_m[i];
                victim = i;
            }
        }
        if (victim == cities.size()) return;  // fewer cities than clusters
        --members[static_cast<std::size_t>(asg.cluster[victim])];
        ++members[j];
        asg.cluster[victim] = static_cast<int>(j);
        asg.distance_m[victim] = 0.0;
        centroids[j] = cities[victim].point;
    }
}

// Recomputes every centroid from its members with chunk-ordered sums.
void update_centroids(std::span<const CityAggregate> cities, const Assignment& asg, CentroidRule rule,
                      int workers, std::vector<GeoPoint>& centroids) {
    const std::size_t k = centroids.size();
    // Planar: (w, w*lat, w*lon, -, count, last member). Spherical: (w, x, y, z, count, last member).
    constexpr std::size_t kStride = 6;
    std::vector<std::vector<double>> partials(chunk_count(cities.size()), std::vector<double>(k * kStride, 0.0));
    for_each_chunk(cities.size(), workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& acc = partials[chunk];
        for (std::size_t i = begin; i < end; ++i) {
            double* slot = &acc[static_cast<std::size_t>(asg.cluster[i]) * kStride];
            const double w = static_cast<double>(cities[i].weight);
            const GeoPoint& p = cities[i].point;
            slot[0] += w;
            slot[4] += 1.0;
            slot[5] = static_cast<double>(i);
            if (rule == CentroidRule::kPlanarMean) {
                slot[1] += w * p.lat;
                slot[2] += w * p.lon;
            } else {
                const double phi = p.lat * kDegToRad;
                const double lam = p.lon * kDegToRad;
                slot[1] += w * std::cos(phi) * std::cos(lam);
                slot[2] += w * std::cos(phi) * std::sin(lam);
                slot[3] += w * std::sin(phi);
            }
        }
    });
    std::vector<double> total(k * kStride, 0.0);
    for (const auto& part : partials) {
        for (std::size_t j = 0; j < total.size(); ++j) {
            if (j % kStride == 5) {
                if (part[j - 1] > 0.0) total[j] = part[j];
            } else {
                total[j] += part[j];
            }
        }
    }

    for (std::size_t c = 0; c < k; ++c) {
        const double* s = &total[c * kStride];
        if (!(s[0] > 0.0)) continue;
        if (s[4] == 1.0) {
            // w * x / w is not always x in floating point.
            centroids[c] = cities[static_cast<std::size_t>(s[5])].point;
            continue;
        }
        if (rule == CentroidRule::kPlanarMean) {
            centroids[c] = {std::clamp(s[1] / s[0], -90.0, 90.0), std::clamp(s[2] / s[0], -180.0, 180.0)};
        } else {
            const double norm = std::sqrt(s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
            if (norm < 1e-12) continue;
            centroids[c] = {std::asin(std::clamp(s[3] / norm, -1.0, 1.0)) * kRadToDeg,
                            std::atan2(s[2], s[1]) * kRadToDeg};
        }
    }
}

struct LloydRun {
    std::vector<GeoPoint> centroids;
    Assignment assignment;
    int iterations = 0;
};

LloydRun lloyd(std::span<const CityAggregate> cities, std::vector<GeoPoint> centroids, const ClusterConfig& cfg) {
    LloydRun run;
    Assignment asg = assign_nearest(cities, centroids, cfg.metric, cfg.great_circle_fallback, cfg.workers);
    while (run.iterations < cfg.max_iterations) {
        ++run.iterations;
        repair_empty(cities, centroids, asg);
        update_centroids(cities, asg, cfg.centroid_rule, cfg.workers, centroids);
        Assignment next = assign_nearest(cities, centroids, cfg.metric, cfg.great_circle_fallback, cfg.workers);
        const bool stable = next.cluster == asg.cluster;
        asg = std::move(next);
        if (stable) break;
    }
    run.centroids = std::move(centroids);
    run.assignment = std::move(asg);
    return run;
}

bool has_empty_cluster(const Assignment& asg, std::size_t k) {
    std::vector<bool> used(k, false);
    for (int c : asg.cluster) used[static_cast<std::size_t>(c)] = true;
    return std::find(used.begin(), used.end(), false) != used.end();
}

void require_clusterable(std::span<const CityAggregate> cities, const ClusterConfig& cfg) {
    cfg.validate();
    if (cities.empty()) throw GeoError(ErrorCode::kEmptyInput, "no cities to cluster");
    if (static_cast<std::size_t>(cfg.k) > cities.size())
        throw GeoError(ErrorCode::kKTooLarge, "k=" + std::to_string(cfg.k) + " exceeds " +
                                                  std::to_string(cities.size()) + " distinct cities");
    for (const auto& c : cities)
        if (c.weight < 1) throw GeoError(ErrorCode::kInvalidArgument, "city weights must be at least 1");
    if (cfg.centroid_rule == CentroidRule::kPlanarMean) {
        const auto [lo, hi] = std::minmax_element(cities.begin(), cities.end(), [](const auto& a, const auto& b) {
            return a.point.lon < b.point.lon;
        });
        if (hi->point.lon - lo->point.lon > 180.0)
            throw GeoError(ErrorCode::kAntimeridianStraddle, "cities span more than 180 degrees of longitude");
    }
}

ClusterModel finish_model(std::span<const CityAggregate> cities, LloydRun run, const ClusterConfig& cfg,
                          int restart_index) {
    const std::size_t k = run.centroids.size();
    Assignment asg = assign_nearest(cities, run.centroids, cfg.metric, cfg.great_circle_fallback, cfg.workers);
    for (std::size_t attempt = 0; attempt < k && has_empty_cluster(asg, k); ++attempt) {
        repair_empty(cities, run.centroids, asg);
        asg = assign_nearest(cities, run.centroids, cfg.metric, cfg.great_circle_fallback, cfg.workers);
    }

    ClusterModel model;
    model.centroids = std::move(run.centroids);
    model.iterations_used = run.iterations;
    model.restart_index_of_best = restart_index;
    model.city_keys.reserve(cities.size());
    for (const auto& c : cities) model.city_keys.push_back(c.city_key);

    std::vector<double> sw(k, 0.0), sd(k, 0.0), sd2(k, 0.0);
    model.cluster_weight.assign(k, 0);
    for (std::size_t i = 0; i < cities.size(); ++i) {
        const auto c = static_cast<std::size_t>(asg.cluster[i]);
        const double w = static_cast<double>(cities[i].weight);
        const double d = asg.distance_m[i];
        model.cluster_weight[c] += cities[i].weight;
        sw[c] += w;
        sd[c] += w * d;
        sd2[c] += w * d * d;
    }
    for (std::size_t c = 0; c < k; ++c) {
        model.per_cluster_rms.push_back(sw[c] > 0 ? Distance::meters(std::sqrt(sd2[c] / sw[c])) : Distance{});
        model.per_cluster_mean.push_back(sw[c] > 0 ? Distance::meters(sd[c] / sw[c]) : Distance{});
    }
    model.overall_rms = asg.rms;
    model.overall_mean = asg.mean;
    model.assignment = std::move(asg.cluster);
    return model;
}

}  // namespace

ClusterModel kmeans_refine(std::span<const CityAggregate> cities, std::span<const GeoPoint> initial,
                           const ClusterConfig& cfg) {
    require_clusterable(cities, cfg);
    if (initial.empty()) throw GeoError(ErrorCode::kInvalidArgument, "no initial centroids");
    return finish_model(cities, lloyd(cities, {initial.begin(), initial.end()}, cfg), cfg, 0);
}

ClusterModel kmeans_fit(std::span<const CityAggregate> cities, const ClusterConfig& cfg) {
    require_clusterable(cities, cfg);
    std::optional<LloydRun> best;
    int best_restart = 0;
    for (int r = 0; r < cfg.restarts; ++r) {
        LloydRun run = lloyd(cities, seed_plus_plus(cities, cfg, cfg.seed + static_cast<std::uint64_t>(r)), cfg);
        if (!best || run.assignment.rms < best->assignment.rms) {
            best = std::move(run);
            best_restart = r;
        }
    }
    return finish_model(cities, std::move(*best), cfg, best_restart);
}

DispersionCurve dispersion_curve(std::span<const CityAggregate> cities, int k_max, const ClusterConfig& cfg) {
    if (cities.empty()) throw GeoError(ErrorCode::kEmptyInput, "no cities to cluster");
    if (k_max < 1) throw GeoError(ErrorCode::kInvalidArgument, "k_max must be positive");
    if (static_cast<std::size_t>(k_max) > cities.size())
        throw GeoError(ErrorCode::kKTooLarge, "k_max exceeds distinct-city count");

    DispersionCurve curve;
    Assignment previous;
    for (int k = 1; k <= k_max; ++k) {
        ClusterConfig kcfg = cfg;
        kcfg.k = k;
        const ClusterModel fitted = kmeans_fit(cities, kcfg);
        std::vector<GeoPoint> best = fitted.centroids;
        Assignment best_asg = assign_nearest(cities, best, cfg.metric, cfg.great_circle_fallback, cfg.workers);

        if (k > 1) {
            const auto worst = static_cast<std::size_t>(
                std::max_element(previous.distance_m.begin(), previous.distance_m.end()) -
                previous.distance_m.begin());
            std::vector<GeoPoint> warm = curve.entries.back().centroids;
            warm.push_back(cities[worst].point);

            Assignment warm_asg = assign_nearest(cities, warm, cfg.metric, cfg.great_circle_fallback, cfg.workers);
            if (warm_asg.rms < best_asg.rms) {
                best = warm;
                best_asg = std::move(warm_asg);
            }
            const ClusterModel refined = kmeans_refine(cities, warm, kcfg);
            Assignment refined_asg =
                assign_nearest(cities, refined.centroids, cfg.metric, cfg.great_circle_fallback, cfg.workers);
            if (refined_asg.rms < best_asg.rms) {
                best = refined.centroids;
                best_asg = std::move(refined_asg);
            }
        }
        curve.entries.push_back({k, best_asg.rms, best_asg.mean, std::move(best)});
        previous = std::move(best_asg);
    }
    return curve;
}

std::optional<int> select_k(const DispersionCurve& curve, SelectMode mode, Distance threshold, CurveStat stat) {
    if (!(threshold.in_meters() > 0.0)) throw GeoError(ErrorCode::kInvalidThreshold, "threshold must be positive");
    if (curve.entries.empty()) throw GeoError(ErrorCode::kEmptyInput, "empty dispersion curve");
    for (std::size_t i = 0; i < curve.entries.size(); ++i)
        if (curve.entries[i].k != static_cast<int>(i) + 1)
            throw GeoError(ErrorCode::kInvalidArgument, "curve k values must run 1, 2, ... without gaps");

    auto value = [&](std::size_t i) {
        const CurveEntry& e = curve.entries[i];
        return (stat == CurveStat::kRms ? e.rms : e.mean).in_meters();
    };
    const double t = threshold.in_meters();
    if (mode == SelectMode::kRadius) {
        for (std::size_t i = 0; i < curve.entries.size(); ++i)
            if (value(i) < t) return curve.entries[i].k;
    } else {
        for (std::size_t i = 0; i + 1 < curve.entries.size(); ++i)
            if (value(i) - value(i + 1) < t) return curve.entries[i].k;
    }
    return std::nullopt;
}

}  // namespace geohub
