#include <geohub/io.hpp>

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include <geohub/error.hpp>

namespace geohub {

double in_units(Distance d, Units units) {
    return units == Units::kMiles ? d.in_miles() : d.in_kilometers();
}

std::string_view to_string(Units units) { return units == Units::kMiles ? "miles" : "km"; }

std::string format_number(double value) { return fmt::format("{}", value); }

void write_metadata_line(std::ostream& out, const RunMetadata& meta) {
    out << fmt::format("# geohub version={} seed={} records={} rejects={}\n", GEOHUB_VERSION, meta.seed,
                       meta.records, meta.rejects);
}

void write_centroid_csv(std::ostream& out, std::span<const CentroidRow> rows, Units units, const RunMetadata& meta) {
    out << "k,cluster_id,lat,lon,weight,rms,mean,units\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{}\n", r.k, r.cluster_id, format_number(r.centroid.lat),
                           format_number(r.centroid.lon), r.weight, format_number(in_units(r.rms, units)),
                           format_number(in_units(r.mean, units)), to_string(units));
    }
    write_metadata_line(out, meta);
}

void write_centroid_csv(std::ostream& out, const ClusterModel& model, Units units, const RunMetadata& meta) {
    std::vector<CentroidRow> rows;
    for (int c = 0; c < model.k(); ++c) {
        const auto i = static_cast<std::size_t>(c);
        rows.push_back({model.k(), c, model.centroids[i], model.cluster_weight[i], model.per_cluster_rms[i],
                        model.per_cluster_mean[i]});
    }
    write_centroid_csv(out, rows, units, meta);
}

void write_cluster_geojson(std::ostream& out, const ClusterModel& model, std::span<const CityAggregate> cities,
                           Units units) {
    using nlohmann::ordered_json;
    if (cities.size() != model.assignment.size())
        throw GeoError(ErrorCode::kInvalidArgument, "model was fitted on a different city list");

    auto point = [](const GeoPoint& p) {
        return ordered_json{{"type", "Point"}, {"coordinates", {p.lon, p.lat}}};
    };
    ordered_json features = ordered_json::array();
    for (int c = 0; c < model.k(); ++c) {
        const auto i = static_cast<std::size_t>(c);
        features.push_back({{"type", "Feature"},
                            {"geometry", point(model.centroids[i])},
                            {"properties",
                             {{"kind", "centroid"},
                              {"k", model.k()},
                              {"cluster_id", c},
                              {"weight", model.cluster_weight[i]},
                              {"rms", in_units(model.per_cluster_rms[i], units)},
                              {"mean", in_units(model.per_cluster_mean[i], units)},
                              {"units", to_string(units)}}}});
    }
    for (std::size_t i = 0; i < cities.size(); ++i) {
        features.push_back({{"type", "Feature"},
                            {"geometry", point(cities[i].point)},
                            {"properties",
                             {{"kind", "city"},
                              {"city_key", cities[i].city_key},
                              {"cluster_id", model.assignment[i]},
                              {"weight", cities[i].weight}}}});
    }
    ordered_json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
    out << doc.dump() << '\n';
}

void write_curve_csv(std::ostream& out, const DispersionCurve& curve, std::optional<int> selected_k, Units units,
                     const RunMetadata& meta) {
    out << "k,rms,mean,units\n";
    for (const auto& e : curve.entries)
        out << fmt::format("{},{},{},{}\n", e.k, format_number(in_units(e.rms, units)),
                           format_number(in_units(e.mean, units)), to_string(units));
    out << "selected_k," << (selected_k ? std::to_string(*selected_k) : std::string("none")) << ",,"
        << to_string(units) << '\n';
    write_metadata_line(out, meta);
}

void write_trend_csv(std::ostream& out, const TrendSeries& series, Units units, const RunMetadata& meta) {
    out << "year,lat,lon,rms,total_weight,units\n";
    for (const auto& e : series.entries)
        out << fmt::format("{},{},{},{},{},{}\n", e.year, format_number(e.centroid.lat),
                           format_number(e.centroid.lon), format_number(in_units(e.rms, units)), e.total_weight,
                           to_string(units));
    write_metadata_line(out, meta);
}

void write_drift_csv(std::ostream& out, const DriftReport& drift, const RunMetadata& meta) {
    out << "delta_lat,delta_lon,lat_slope,lon_slope\n";
    out << fmt::format("{},{},{},{}\n", format_number(drift.delta_lat), format_number(drift.delta_lon),
                       format_number(drift.lat_slope), format_number(drift.lon_slope));
    write_metadata_line(out, meta);
}

void write_ascii_grid(std::ostream& out, const BBox& bbox, int n_rows, int n_cols, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw GeoError(ErrorCode::kInvalidGrid, "value count does not match grid dimensions");
    const double dx = (bbox.lon_max - bbox.lon_min) / n_cols;
    const double dy = (bbox.lat_max - bbox.lat_min) / n_rows;
    out << "ncols " << n_cols << '\n' << "nrows " << n_rows << '\n';
    out << "xllcorner " << format_number(bbox.lon_min) << '\n';
    out << "yllcorner " << format_number(bbox.lat_min) << '\n';
    if (std::abs(dx - dy) <= 1e-12 * std::max(dx, dy)) {
        out << "cellsize " << format_number(dx) << '\n';
    } else {
        out << "dx " << format_number(dx) << '\n' << "dy " << format_number(dy) << '\n';
    }
    out << "NODATA_value -1\n";
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            if (c) out << ' ';
            out << format_number(values[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                                        static_cast<std::size_t>(c)]);
        }
        out << '\n';
    }
}

void write_ascii_grid(std::ostream& out, const DensityGrid& grid) {
    std::vector<double> values(grid.cells.begin(), grid.cells.end());
    write_ascii_grid(out, grid.bbox, grid.n_rows, grid.n_cols, values);
}

void write_csv_matrix(std::ostream& out, int n_rows, int n_cols, std::span<const double> values,
                      const RunMetadata& meta) {
    if (values.size() != static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw GeoError(ErrorCode::kInvalidGrid, "value count does not match grid dimensions");
    for (int c = 0; c < n_cols; ++c) out << (c ? ",c" : "c") << c;
    out << '\n';
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            if (c) out << ',';
            out << format_number(values[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                                        static_cast<std::size_t>(c)]);
        }
        out << '\n';
    }
    write_metadata_line(out, meta);
}

}  // namespace geohub
