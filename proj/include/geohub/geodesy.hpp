#pragma once

#include <compare>
#include <span>

namespace geohub {

/// Latitude/longitude pair in degrees on WGS-84.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    bool valid() const noexcept;

    /// Builds a point, throwing kInvalidArgument when out of range or NaN.
    static GeoPoint checked(double lat, double lon);

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Ellipsoid {
    double semi_major_axis = 6378137.0;
    double flattening = 1.0 / 298.257223563;

    static constexpr Ellipsoid wgs84() noexcept { return {}; }
    double semi_minor_axis() const noexcept { return semi_major_axis * (1.0 - flattening); }
    bool valid() const noexcept;
};

/// Nonnegative length. Canonical unit is meters.
class Distance {
public:
    static constexpr double kMetersPerMile = 1609.344;
    static constexpr double kMetersPerKilometer = 1000.0;

    constexpr Distance() = default;

    static Distance meters(double m);
    static Distance miles(double mi) { return meters(mi * kMetersPerMile); }
    static Distance kilometers(double km) { return meters(km * kMetersPerKilometer); }

    constexpr double in_meters() const noexcept { return meters_; }
    constexpr double in_miles() const noexcept { return meters_ / kMetersPerMile; }
    constexpr double in_kilometers() const noexcept { return meters_ / kMetersPerKilometer; }

    friend constexpr auto operator<=>(const Distance&, const Distance&) = default;

private:
    constexpr explicit Distance(double m) : meters_(m) {}
    double meters_ = 0.0;
};

enum class Metric { kVincenty, kGreatCircle };

/// Mean Earth radius used by the spherical (haversine) metric.
inline constexpr double kMeanEarthRadius = 6371008.8;

inline constexpr double kVincentyTolerance = 1e-12;
inline constexpr int kVincentyMaxIterations = 200;

struct VincentyResult {
    Distance distance;
    int iterations = 0;
    // Set when Vincenty failed to converge and the great-circle value was substituted.
    bool used_fallback = false;
};

/// Inverse geodesic distance by Vincenty's iteration.
///
/// Throws GeoError(kNonConvergence) for near-antipodal pairs unless
/// `great_circle_fallback` is set, in which case the haversine distance is
/// returned and `used_fallback` is true.
VincentyResult vincenty_distance(const GeoPoint& p, const GeoPoint& q,
                                 const Ellipsoid& ellipsoid = Ellipsoid::wgs84(),
                                 bool great_circle_fallback = false);

/// Haversine arc length on a sphere of radius kMeanEarthRadius.
Distance great_circle_distance(const GeoPoint& p, const GeoPoint& q);

/// Dispatches on `metric` (WGS-84 for Vincenty).
Distance distance(const GeoPoint& p, const GeoPoint& q, Metric metric,
                  bool great_circle_fallback = false);

struct WeightedPoint {
    GeoPoint point;
    double weight = 1.0;
};

enum class CentroidRule { kPlanarMean, kSphericalMean };

/// Weighted mean of latitudes and of longitudes, taken independently.
/// Throws kEmptyInput, kInvalidArgument (weight <= 0) or
/// kAntimeridianStraddle (longitude span above 180 degrees).
GeoPoint planar_centroid(std::span<const WeightedPoint> points);

/// Normalized weighted mean of unit vectors. Sensitivity-check alternative
/// to planar_centroid; falls back to the planar mean for a degenerate sum.
GeoPoint spherical_centroid(std::span<const WeightedPoint> points);

GeoPoint centroid(std::span<const WeightedPoint> points, CentroidRule rule);

struct DistanceMoments {
    double rms = 0.0;
    double mean = 0.0;
};

/// Weighted RMS and arithmetic mean of raw distances, summed in fixed-size
/// chunks. Unit weights give sqrt(sum r_i^2 / n).
DistanceMoments weighted_moments(std::span<const double> distances, std::span<const double> weights);

/// sqrt(sum w_i r_i^2 / sum w_i), r_i the distance from point i to `center`.
Distance rms_dispersion(std::span<const WeightedPoint> points, const GeoPoint& center,
                        Metric metric, bool great_circle_fallback = false);

/// Weighted arithmetic mean of the same distances rms_dispersion squares.
Distance mean_distance(std::span<const WeightedPoint> points, const GeoPoint& center,
                       Metric metric, bool great_circle_fallback = false);

/// Inclusive latitude/longitude box in degrees.
struct BBox {
    double lat_min = -90.0;
    double lat_max = 90.0;
    double lon_min = -180.0;
    double lon_max = 180.0;

    /// Throws kInvalidBBox when a minimum exceeds its maximum.
    void validate() const;
    bool contains(const GeoPoint& p) const noexcept {
        return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
    }
};

}  // namespace geohub
