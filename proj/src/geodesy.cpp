#include <geohub/geodesy.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <geohub/error.hpp>
#include <geohub/parallel.hpp>

namespace geohub {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "InvalidArgument";
        case ErrorCode::kNonConvergence: return "NonConvergence";
        case ErrorCode::kEmptyInput: return "EmptyInput";
        case ErrorCode::kAntimeridianStraddle: return "AntimeridianStraddle";
        case ErrorCode::kFatalFormat: return "FatalFormat";
        case ErrorCode::kInvalidBBox: return "InvalidBBox";
        case ErrorCode::kGeocodeConflict: return "GeocodeConflict";
        case ErrorCode::kKTooLarge: return "KTooLarge";
        case ErrorCode::kInvalidThreshold: return "InvalidThreshold";
        case ErrorCode::kTooFewYears: return "TooFewYears";
        case ErrorCode::kKMismatch: return "KMismatch";
        case ErrorCode::kInvalidGrid: return "InvalidGrid";
    }
    return "Unknown";
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

bool GeoPoint::valid() const noexcept {
    return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

GeoPoint GeoPoint::checked(double lat, double lon) {
    GeoPoint p{lat, lon};
    if (!p.valid())
        throw GeoError(ErrorCode::kInvalidArgument,
                       "coordinate out of range: lat=" + std::to_string(lat) + " lon=" + std::to_string(lon));
    return p;
}

bool Ellipsoid::valid() const noexcept {
    return semi_major_axis > 0.0 && flattening >= 0.0 && flattening < 1.0;
}

Distance Distance::meters(double m) {
    if (!(m >= 0.0)) throw GeoError(ErrorCode::kInvalidArgument, "negative or NaN distance");
    return Distance(m);
}

void BBox::validate() const {
    if (!(lat_min <= lat_max) || !(lon_min <= lon_max))
        throw GeoError(ErrorCode::kInvalidBBox, "bbox minimum exceeds maximum");
}

Distance great_circle_distance(const GeoPoint& p, const GeoPoint& q) {
    const double phi1 = p.lat * kDegToRad;
    const double phi2 = q.lat * kDegToRad;
    const double s_dphi = std::sin((phi2 - phi1) / 2.0);
    const double s_dlam = std::sin((q.lon - p.lon) * kDegToRad / 2.0);
    double h = s_dphi * s_dphi + std::cos(phi1) * std::cos(phi2) * s_dlam * s_dlam;
    h = std::clamp(h, 0.0, 1.0);
    const double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
    return Distance::meters(kMeanEarthRadius * c);
}

VincentyResult vincenty_distance(const GeoPoint& p, const GeoPoint& q, const Ellipsoid& ellipsoid,
                                 bool great_circle_fallback) {
    if (!p.valid() || !q.valid()) throw GeoError(ErrorCode::kInvalidArgument, "invalid GeoPoint");
    if (!ellipsoid.valid()) throw GeoError(ErrorCode::kInvalidArgument, "invalid ellipsoid");
    if (p == q) return {};

    const double a = ellipsoid.semi_major_axis;
    const double f = ellipsoid.flattening;
    const double b = ellipsoid.semi_minor_axis();

    // Longitude difference in (-pi, pi].
    double L = std::remainder((q.lon - p.lon) * kDegToRad, 2.0 * std::numbers::pi);

    // Reduced latitudes.
    const double tan_u1 = (1.0 - f) * std::tan(p.lat * kDegToRad);
    const double tan_u2 = (1.0 - f) * std::tan(q.lat * kDegToRad);
    const double cos_u1 = 1.0 / std::sqrt(1.0 + tan_u1 * tan_u1);
    const double cos_u2 = 1.0 / std::sqrt(1.0 + tan_u2 * tan_u2);
    const double sin_u1 = tan_u1 * cos_u1;
    const double sin_u2 = tan_u2 * cos_u2;

    double lambda = L;
    double sin_sigma = 0, cos_sigma = 0, sigma = 0, cos2_alpha = 0, cos_2sigma_m = 0;
    int iter = 0;
    bool converged = false;
    while (iter < kVincentyMaxIterations) {
        ++iter;
        const double sin_lambda = std::sin(lambda);
        const double cos_lambda = std::cos(lambda);
        const double t1 = cos_u2 * sin_lambda;
        const double t2 = cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda;
        sin_sigma = std::sqrt(t1 * t1 + t2 * t2);
        if (sin_sigma == 0.0) return {Distance{}, iter, false};  // coincident after reduction
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
        sigma = std::atan2(sin_sigma, cos_sigma);
        const double sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
        cos2_alpha = 1.0 - sin_alpha * sin_alpha;
        // Equatorial line: cos2_alpha == 0.
        cos_2sigma_m = cos2_alpha != 0.0 ? cos_sigma - 2.0 * sin_u1 * sin_u2 / cos2_alpha : 0.0;
        const double C = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
        const double previous = lambda;
        lambda = L + (1.0 - C) * f * sin_alpha *
                         (sigma + C * sin_sigma *
                                      (cos_2sigma_m + C * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        if (std::abs(lambda) > std::numbers::pi) break;
        if (std::abs(lambda - previous) < kVincentyTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        if (great_circle_fallback) return {great_circle_distance(p, q), iter, true};
        throw GeoError(ErrorCode::kNonConvergence,
                       "Vincenty inverse did not converge after " + std::to_string(iter) + " iterations");
    }

    const double u2 = cos2_alpha * (a * a - b * b) / (b * b);
    const double A = 1.0 + u2 / 16384.0 * (4096.0 + u2 * (-768.0 + u2 * (320.0 - 175.0 * u2)));
    const double B = u2 / 1024.0 * (256.0 + u2 * (-128.0 + u2 * (74.0 - 47.0 * u2)));
    const double c2 = cos_2sigma_m * cos_2sigma_m;
    const double delta_sigma =
        B * sin_sigma *
        (cos_2sigma_m + B / 4.0 *
                            (cos_sigma * (-1.0 + 2.0 * c2) -
                             B / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma * sin_sigma) * (-3.0 + 4.0 * c2)));
    const double s = b * A * (sigma - delta_sigma);
    return {Distance::meters(std::max(0.0, s)), iter, false};
}

Distance distance(const GeoPoint& p, const GeoPoint& q, Metric metric, bool great_circle_fallback) {
    if (metric == Metric::kGreatCircle) return great_circle_distance(p, q);
    return vincenty_distance(p, q, Ellipsoid::wgs84(), great_circle_fallback).distance;
}

namespace {

void require_points(std::span<const WeightedPoint> points) {
    if (points.empty()) throw GeoError(ErrorCode::kEmptyInput, "no points");
    for (const auto& wp : points) {
        if (!(wp.weight > 0.0)) throw GeoError(ErrorCode::kInvalidArgument, "weights must be positive");
        if (!wp.point.valid()) throw GeoError(ErrorCode::kInvalidArgument, "invalid GeoPoint");
    }
}

// Chunk-ordered weighted sums so that results match whatever the caller's
// partitioning looks like elsewhere in the library.
struct PlanarSums {
    double w = 0, lat = 0, lon = 0;
};

PlanarSums planar_sums(std::span<const WeightedPoint> points) {
    PlanarSums total;
    for (std::size_t begin = 0; begin < points.size(); begin += kChunkSize) {
        const std::size_t end = std::min(points.size(), begin + kChunkSize);
        PlanarSums part;
        for (std::size_t i = begin; i < end; ++i) {
            part.w += points[i].weight;
            part.lat += points[i].weight * points[i].point.lat;
            part.lon += points[i].weight * points[i].point.lon;
        }
        total.w += part.w;
        total.lat += part.lat;
        total.lon += part.lon;
    }
    return total;
}

}  // namespace

GeoPoint planar_centroid(std::span<const WeightedPoint> points) {
    require_points(points);
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(), [](const auto& x, const auto& y) {
        return x.point.lon < y.point.lon;
    });
    if (hi->point.lon - lo->point.lon > 180.0)
        throw GeoError(ErrorCode::kAntimeridianStraddle, "longitude span exceeds 180 degrees");
    if (points.size() == 1) return points[0].point;
    const PlanarSums s = planar_sums(points);
    GeoPoint c{s.lat / s.w, s.lon / s.w};
    // Rounding can push a mean of boundary values a hair outside the range.
    c.lat = std::clamp(c.lat, -90.0, 90.0);
    c.lon = std::clamp(c.lon, -180.0, 180.0);
    return c;
}

GeoPoint spherical_centroid(std::span<const WeightedPoint> points) {
    require_points(points);
    double x = 0, y = 0, z = 0;
    for (const auto& wp : points) {
        const double phi = wp.point.lat * kDegToRad;
        const double lam = wp.point.lon * kDegToRad;
        x += wp.weight * std::cos(phi) * std::cos(lam);
        y += wp.weight * std::cos(phi) * std::sin(lam);
        z += wp.weight * std::sin(phi);
    }
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (norm < 1e-12) return planar_centroid(points);
    return {std::asin(std::clamp(z / norm, -1.0, 1.0)) * kRadToDeg, std::atan2(y, x) * kRadToDeg};
}

GeoPoint centroid(std::span<const WeightedPoint> points, CentroidRule rule) {
    return rule == CentroidRule::kSphericalMean ? spherical_centroid(points) : planar_centroid(points);
}

DistanceMoments weighted_moments(std::span<const double> distances, std::span<const double> weights) {
    if (distances.size() != weights.size())
        throw GeoError(ErrorCode::kInvalidArgument, "distance and weight counts differ");
    if (distances.empty()) throw GeoError(ErrorCode::kEmptyInput, "no distances");
    double w = 0, d = 0, d2 = 0;
    for (std::size_t begin = 0; begin < distances.size(); begin += kChunkSize) {
        const std::size_t end = std::min(distances.size(), begin + kChunkSize);
        double pw = 0, pd = 0, pd2 = 0;
        for (std::size_t i = begin; i < end; ++i) {
            pw += weights[i];
            pd += weights[i] * distances[i];
            pd2 += weights[i] * distances[i] * distances[i];
        }
        w += pw;
        d += pd;
        d2 += pd2;
    }
    if (!(w > 0.0)) throw GeoError(ErrorCode::kInvalidArgument, "total weight must be positive");
    return {std::sqrt(d2 / w), d / w};
}

namespace {

DistanceMoments distance_moments(std::span<const WeightedPoint> points, const GeoPoint& center, Metric metric,
                                 bool fallback) {
    require_points(points);
    std::vector<double> r(points.size());
    std::vector<double> w(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        r[i] = distance(points[i].point, center, metric, fallback).in_meters();
        w[i] = points[i].weight;
    }
    return weighted_moments(r, w);
}

}  // namespace

Distance rms_dispersion(std::span<const WeightedPoint> points, const GeoPoint& center, Metric metric,
                        bool great_circle_fallback) {
    return Distance::meters(distance_moments(points, center, metric, great_circle_fallback).rms);
}

Distance mean_distance(std::span<const WeightedPoint> points, const GeoPoint& center, Metric metric,
                       bool great_circle_fallback) {
    return Distance::meters(distance_moments(points, center, metric, great_circle_fallback).mean);
}

}  // namespace geohub
