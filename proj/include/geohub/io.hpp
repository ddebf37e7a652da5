#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <geohub/clustering.hpp>
#include <geohub/corpus.hpp>
#include <geohub/raster.hpp>
#include <geohub/temporal.hpp>

namespace geohub {

enum class Units { kMiles, kKilometers };

double in_units(Distance d, Units units);
std::string_view to_string(Units units);

/// Trailing "# ..." line carried by every CSV output.
struct RunMetadata {
    std::uint64_t seed = 42;
    std::size_t records = 0;
    std::size_t rejects = 0;
};

void write_metadata_line(std::ostream& out, const RunMetadata& meta);

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

struct CentroidRow {
    int k = 1;
    int cluster_id = 0;
    GeoPoint centroid;
    std::int64_t weight = 0;
    Distance rms;
    Distance mean;
};

/// Header: k,cluster_id,lat,lon,weight,rms,mean,units
void write_centroid_csv(std::ostream& out, std::span<const CentroidRow> rows, Units units,
                        const RunMetadata& meta);
void write_centroid_csv(std::ostream& out, const ClusterModel& model, Units units, const RunMetadata& meta);

/// FeatureCollection of centroid points followed by city points tagged
/// with their cluster.
void write_cluster_geojson(std::ostream& out, const ClusterModel& model,
                           std::span<const CityAggregate> cities, Units units);

/// Header: k,rms,mean,units, then a closing "selected_k" row.
void write_curve_csv(std::ostream& out, const DispersionCurve& curve, std::optional<int> selected_k,
                     Units units, const RunMetadata& meta);

/// Header: year,lat,lon,rms,total_weight,units
void write_trend_csv(std::ostream& out, const TrendSeries& series, Units units, const RunMetadata& meta);

/// Header: delta_lat,delta_lon,lat_slope,lon_slope
void write_drift_csv(std::ostream& out, const DriftReport& drift, const RunMetadata& meta);

/// ESRI ASCII grid, rows north to south, NODATA_value -1. Non-square cells
/// are written with dx/dy in place of cellsize.
void write_ascii_grid(std::ostream& out, const BBox& bbox, int n_rows, int n_cols,
                      std::span<const double> values);
void write_ascii_grid(std::ostream& out, const DensityGrid& grid);

/// Header c0..c{n-1}, then one line per grid row, north to south.
void write_csv_matrix(std::ostream& out, int n_rows, int n_cols, std::span<const double> values,
                      const RunMetadata& meta);

}  // namespace geohub
