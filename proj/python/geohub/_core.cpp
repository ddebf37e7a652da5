#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include <geohub/clustering.hpp>
#include <geohub/corpus.hpp>
#include <geohub/error.hpp>
#include <geohub/geodesy.hpp>
#include <geohub/raster.hpp>
#include <geohub/temporal.hpp>

namespace py = pybind11;
using namespace geohub;

namespace {

std::vector<WeightedPoint> weighted(const std::vector<std::tuple<double, double, double>>& points) {
    std::vector<WeightedPoint> out;
    for (const auto& [lat, lon, w] : points) out.push_back({{lat, lon}, w});
    return out;
}

Metric metric_from(const std::string& name) {
    if (name == "vincenty") return Metric::kVincenty;
    if (name == "great_circle" || name == "great-circle") return Metric::kGreatCircle;
    throw py::value_error("metric must be 'vincenty' or 'great_circle'");
}

RegionFilter region_from(const std::string& name, std::optional<std::tuple<double, double, double, double>> box) {
    if (name == "lower48") return RegionFilter::lower48();
    if (name == "china") return RegionFilter::mainland_china();
    if (name == "all") return RegionFilter::all();
    if (name == "bbox" && box) {
        const auto& [a, b, c, d] = *box;
        return RegionFilter::bbox({a, b, c, d});
    }
    throw py::value_error("region must be lower48, china, all, or bbox with a box");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Geodesic centroids, dispersion and k-means regions for geocoded publication records.";

    static py::exception<GeoError> geo_error(m, "GeoError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const GeoError& e) {
            geo_error(e.what());
        }
    });

    py::class_<GeoPoint>(m, "GeoPoint")
        .def(py::init([](double lat, double lon) { return GeoPoint::checked(lat, lon); }), py::arg("lat"),
             py::arg("lon"))
        .def_readonly("lat", &GeoPoint::lat)
        .def_readonly("lon", &GeoPoint::lon)
        .def("__repr__", [](const GeoPoint& p) {
            std::ostringstream s;
            s.precision(17);
            s << "GeoPoint(lat=" << p.lat << ", lon=" << p.lon << ")";
            return s.str();
        });

    py::class_<CityAggregate>(m, "CityAggregate")
        .def(py::init([](std::string key, double lat, double lon, std::int64_t weight) {
                 return CityAggregate{std::move(key), GeoPoint::checked(lat, lon), weight};
             }),
             py::arg("city_key"), py::arg("lat"), py::arg("lon"), py::arg("weight"))
        .def_readonly("city_key", &CityAggregate::city_key)
        .def_readonly("point", &CityAggregate::point)
        .def_readonly("weight", &CityAggregate::weight);

    py::class_<PublicationRecord>(m, "PublicationRecord")
        .def_readonly("paper_id", &PublicationRecord::paper_id)
        .def_readonly("year", &PublicationRecord::year)
        .def_readonly("city_key", &PublicationRecord::city_key)
        .def_readonly("admin1", &PublicationRecord::admin1)
        .def_readonly("country", &PublicationRecord::country)
        .def_readonly("point", &PublicationRecord::point);

    // Distances are returned in meters.
    m.def(
        "vincenty_distance",
        [](double lat1, double lon1, double lat2, double lon2, bool fallback) {
            const auto r = vincenty_distance({lat1, lon1}, {lat2, lon2}, Ellipsoid::wgs84(), fallback);
            return py::make_tuple(r.distance.in_meters(), r.used_fallback);
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"), py::arg("fallback") = false,
        "Returns (meters, used_fallback).");
    m.def(
        "great_circle_distance",
        [](double lat1, double lon1, double lat2, double lon2) {
            return great_circle_distance({lat1, lon1}, {lat2, lon2}).in_meters();
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));
    m.def(
        "planar_centroid", [](const std::vector<std::tuple<double, double, double>>& pts) {
            return planar_centroid(weighted(pts));
        },
        py::arg("points"), "points: list of (lat, lon, weight)");
    m.def(
        "rms_dispersion",
        [](const std::vector<std::tuple<double, double, double>>& pts, const GeoPoint& center,
           const std::string& metric, bool fallback) {
            return rms_dispersion(weighted(pts), center, metric_from(metric), fallback).in_meters();
        },
        py::arg("points"), py::arg("center"), py::arg("metric") = "vincenty", py::arg("fallback") = false);

    m.def(
        "read_records",
        [](const std::string& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw py::value_error("cannot open " + path);
            std::vector<Reject> rejects;
            auto records = parse_records(in, {}, &rejects);
            std::vector<std::pair<std::size_t, std::string>> rej;
            for (auto& r : rejects) rej.emplace_back(r.line_no, r.reason);
            return py::make_tuple(std::move(records), std::move(rej));
        },
        py::arg("path"), "Returns (records, [(line_no, reason), ...]).");
    m.def("dedupe_paper_city", [](const std::vector<PublicationRecord>& r) { return dedupe_paper_city(r); });
    m.def(
        "filter_region",
        [](const std::vector<PublicationRecord>& r, const std::string& region,
           std::optional<std::tuple<double, double, double, double>> bbox) {
            return filter_region(r, region_from(region, bbox));
        },
        py::arg("records"), py::arg("region"), py::arg("bbox") = std::nullopt);
    m.def(
        "aggregate_cities",
        [](const std::vector<PublicationRecord>& r, std::optional<std::pair<int, int>> years) {
            std::optional<YearRange> yr;
            if (years) yr = YearRange{years->first, years->second};
            return aggregate_cities(r, yr);
        },
        py::arg("records"), py::arg("years") = std::nullopt);

    py::class_<ClusterModel>(m, "ClusterModel")
        .def_readonly("centroids", &ClusterModel::centroids)
        .def_readonly("city_keys", &ClusterModel::city_keys)
        .def_readonly("assignment", &ClusterModel::assignment)
        .def_readonly("cluster_weight", &ClusterModel::cluster_weight)
        .def_property_readonly("per_cluster_rms",
                               [](const ClusterModel& m) {
                                   std::vector<double> v;
                                   for (auto d : m.per_cluster_rms) v.push_back(d.in_meters());
                                   return v;
                               })
        .def_property_readonly("overall_rms", [](const ClusterModel& m) { return m.overall_rms.in_meters(); })
        .def_property_readonly("overall_mean", [](const ClusterModel& m) { return m.overall_mean.in_meters(); })
        .def_readonly("iterations_used", &ClusterModel::iterations_used)
        .def_readonly("restart_index_of_best", &ClusterModel::restart_index_of_best);

    auto make_cfg = [](int k, int restarts, int max_iterations, std::uint64_t seed, const std::string& metric,
                       const std::string& centroid_rule, bool fallback, int workers) {
        ClusterConfig cfg;
        cfg.k = k;
        cfg.restarts = restarts;
        cfg.max_iterations = max_iterations;
        cfg.seed = seed;
        cfg.metric = metric_from(metric);
        if (centroid_rule != "planar" && centroid_rule != "spherical")
            throw py::value_error("centroid_rule must be 'planar' or 'spherical'");
        cfg.centroid_rule = centroid_rule == "spherical" ? CentroidRule::kSphericalMean : CentroidRule::kPlanarMean;
        cfg.great_circle_fallback = fallback;
        cfg.workers = workers;
        return cfg;
    };

    m.def(
        "kmeans_fit",
        [make_cfg](const std::vector<CityAggregate>& cities, int k, int restarts, int max_iterations,
                   std::uint64_t seed, const std::string& metric, const std::string& centroid_rule, bool fallback,
                   int workers) {
            return kmeans_fit(cities, make_cfg(k, restarts, max_iterations, seed, metric, centroid_rule, fallback,
                                               workers));
        },
        py::arg("cities"), py::arg("k"), py::arg("restarts") = 10, py::arg("max_iterations") = 500,
        py::arg("seed") = 42, py::arg("metric") = "vincenty", py::arg("centroid_rule") = "planar",
        py::arg("fallback") = false, py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    m.def(
        "dispersion_curve",
        [make_cfg](const std::vector<CityAggregate>& cities, int k_max, int restarts, std::uint64_t seed,
                   const std::string& metric, int workers) {
            const auto curve = dispersion_curve(
                cities, k_max, make_cfg(1, restarts, 500, seed, metric, "planar", false, workers));
            std::vector<std::tuple<int, double, double>> out;
            for (const auto& e : curve.entries) out.emplace_back(e.k, e.rms.in_meters(), e.mean.in_meters());
            return out;
        },
        py::arg("cities"), py::arg("k_max"), py::arg("restarts") = 10, py::arg("seed") = 42,
        py::arg("metric") = "vincenty", py::arg("workers") = 0,
        "Returns [(k, rms_m, mean_m), ...].");

    m.def(
        "select_k",
        [](const std::vector<double>& values_m, const std::string& mode, double threshold_m) -> std::optional<int> {
            DispersionCurve c;
            for (std::size_t i = 0; i < values_m.size(); ++i)
                c.entries.push_back({static_cast<int>(i) + 1, Distance::meters(values_m[i]),
                                     Distance::meters(values_m[i]), {}});
            if (mode != "delta" && mode != "radius") throw py::value_error("mode must be 'delta' or 'radius'");
            return select_k(c, mode == "delta" ? SelectMode::kDelta : SelectMode::kRadius,
                            Distance::meters(threshold_m));
        },
        py::arg("values_m"), py::arg("mode"), py::arg("threshold_m"),
        "values_m[i] is the curve value for k = i + 1, in meters.");

    m.def(
        "yearly_centroids",
        [](const std::vector<PublicationRecord>& records, const std::string& region, int first, int last,
           const std::string& metric) {
            const auto s = yearly_centroids(records, region_from(region, std::nullopt), {first, last},
                                            metric_from(metric));
            std::vector<std::tuple<int, double, double, double, std::int64_t>> out;
            for (const auto& e : s.entries)
                out.emplace_back(e.year, e.centroid.lat, e.centroid.lon, e.rms.in_meters(), e.total_weight);
            return out;
        },
        py::arg("records"), py::arg("region"), py::arg("first_year"), py::arg("last_year"),
        py::arg("metric") = "vincenty", "Returns [(year, lat, lon, rms_m, total_weight), ...].");

    m.def(
        "drift_stats",
        [](const std::vector<std::tuple<int, double, double>>& entries) {
            TrendSeries s;
            for (const auto& [y, lat, lon] : entries) s.entries.push_back({y, {lat, lon}, Distance{}, 1});
            const DriftReport d = drift_stats(s);
            py::dict out;
            out["delta_lat"] = d.delta_lat;
            out["delta_lon"] = d.delta_lon;
            out["lat_slope"] = d.lat_slope;
            out["lon_slope"] = d.lon_slope;
            return out;
        },
        py::arg("entries"), "entries: [(year, lat, lon), ...] in ascending year order.");

    m.def(
        "cluster_stability",
        [](const ClusterModel& a, const ClusterModel& b, const std::string& metric) {
            const auto r = cluster_stability(a, b, metric_from(metric));
            std::vector<std::tuple<int, int, double>> matches;
            for (const auto& mm : r.matches) matches.emplace_back(mm.index_a, mm.index_b, mm.displacement.in_meters());
            return py::make_tuple(matches, r.max_displacement.in_meters());
        },
        py::arg("a"), py::arg("b"), py::arg("metric") = "vincenty");

    m.def(
        "density_grid",
        [](const std::vector<CityAggregate>& cities, std::tuple<double, double, double, double> bbox, int rows,
           int cols) {
            const auto& [a, b, c, d] = bbox;
            const DensityGrid g = density_grid(cities, {a, b, c, d}, rows, cols);
            std::vector<std::vector<std::int64_t>> cells(static_cast<std::size_t>(rows));
            for (int r = 0; r < rows; ++r)
                for (int col = 0; col < cols; ++col) cells[static_cast<std::size_t>(r)].push_back(g.at(r, col));
            return py::make_tuple(cells, g.overflow);
        },
        py::arg("cities"), py::arg("bbox"), py::arg("rows") = kDefaultGridRows, py::arg("cols") = kDefaultGridCols,
        "bbox is (lat_min, lat_max, lon_min, lon_max); returns (rows north-to-south, overflow).");

    m.def(
        "log_display",
        [](const std::vector<std::vector<std::int64_t>>& cells) {
            std::vector<std::vector<double>> out;
            for (const auto& row : cells) {
                DensityGrid g;
                g.n_rows = 1;
                g.n_cols = static_cast<int>(row.size());
                g.cells = row;
                out.push_back(log_display(g).values);
            }
            return out;
        },
        py::arg("cells"));

    m.attr("__version__") = GEOHUB_VERSION;
}
