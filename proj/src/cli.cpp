#include <geohub/cli.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <geohub/clustering.hpp>
#include <geohub/corpus.hpp>
#include <geohub/error.hpp>
#include <geohub/io.hpp>
#include <geohub/raster.hpp>
#include <geohub/temporal.hpp>

namespace geohub {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string output;
    std::string region = "lower48";
    std::string bbox;
    std::string years;
    std::string units = "miles";
    std::string format = "asciigrid";
    std::string metric = "vincenty";
    std::string centroid_rule = "planar";
    std::uint64_t seed = 42;
    bool fallback = false;
    int workers = 0;

    int k = 6;
    int k_max = 10;
    int restarts = 10;
    int max_iterations = 500;
    std::string mode = "radius";
    std::string stat = "rms";
    double threshold = 100.0;

    int rows = kDefaultGridRows;
    int cols = kDefaultGridCols;
    std::string grid_bbox;
};

BBox parse_bbox(const std::string& text) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        try {
            std::size_t used = 0;
            const std::string part = text.substr(start, comma - start);
            v.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("bbox must be lat_min,lat_max,lon_min,lon_max: " + text);
        }
        start = comma + 1;
    }
    if (v.size() != 4) throw UsageError("bbox must be lat_min,lat_max,lon_min,lon_max: " + text);
    BBox box{v[0], v[1], v[2], v[3]};
    if (!(box.lat_min <= box.lat_max) || !(box.lon_min <= box.lon_max)) throw UsageError("bbox minimum exceeds maximum");
    return box;
}

std::optional<YearRange> parse_years(const std::string& text) {
    if (text.empty()) return std::nullopt;
    try {
        const auto colon = text.find(':');
        YearRange r;
        std::size_t used = 0;
        if (colon == std::string::npos) {
            r.first = r.last = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
            r.first = std::stoi(a, &used);
            if (used != a.size()) throw std::invalid_argument(text);
            r.last = std::stoi(b, &used);
            if (used != b.size()) throw std::invalid_argument(text);
        }
        if (r.first > r.last) throw std::invalid_argument(text);
        return r;
    } catch (const std::exception&) {
        throw UsageError("years must be Y0:Y1 with Y0 <= Y1: " + text);
    }
}

RegionFilter parse_region(const Options& o) {
    if (o.region == "lower48") return RegionFilter::lower48();
    if (o.region == "china") return RegionFilter::mainland_china();
    if (o.region == "all") return RegionFilter::all();
    if (o.region == "bbox") {
        if (o.bbox.empty()) throw UsageError("--region bbox requires --bbox");
        return RegionFilter::bbox(parse_bbox(o.bbox));
    }
    throw UsageError("unknown region: " + o.region);
}

Units parse_units(const std::string& s) {
    if (s == "miles") return Units::kMiles;
    if (s == "km") return Units::kKilometers;
    throw UsageError("units must be miles or km");
}

Distance threshold_distance(double value, Units units) {
    if (!(value > 0.0)) throw UsageError("threshold must be positive");
    return units == Units::kMiles ? Distance::miles(value) : Distance::kilometers(value);
}

ClusterConfig cluster_config(const Options& o) {
    ClusterConfig cfg;
    cfg.k = o.k;
    cfg.restarts = o.restarts;
    cfg.max_iterations = o.max_iterations;
    cfg.seed = o.seed;
    cfg.metric = o.metric == "great-circle" ? Metric::kGreatCircle : Metric::kVincenty;
    cfg.centroid_rule = o.centroid_rule == "spherical" ? CentroidRule::kSphericalMean : CentroidRule::kPlanarMean;
    cfg.great_circle_fallback = o.fallback;
    cfg.workers = o.workers;
    if (cfg.k < 1 || cfg.restarts < 1 || cfg.max_iterations < 1)
        throw UsageError("k, restarts and max-iterations must be positive");
    return cfg;
}

BBox default_grid_bbox(const RegionFilter& region) {
    switch (region.kind()) {
        case RegionFilter::Kind::kLower48: return {24.0, 50.0, -125.0, -66.0};
        case RegionFilter::Kind::kMainlandChina: return {18.0, 54.0, 73.0, 135.0};
        case RegionFilter::Kind::kBBox: return *region.box();
        case RegionFilter::Kind::kAll: break;
    }
    return {};
}

std::filesystem::path sibling(const std::string& output, const std::string& suffix) {
    std::filesystem::path p(output);
    p.replace_extension(suffix);
    return p;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw GeoError(ErrorCode::kInvalidArgument, "cannot open output file " + path.string());
    return f;
}

struct Ingest {
    std::vector<PublicationRecord> records;  // kept only when asked for
    std::vector<CityAggregate> cities;
    std::size_t parsed = 0;
    std::vector<Reject> rejects;
};

// Parse -> region filter -> (paper, city) dedup -> year window -> city table.
Ingest ingest(const Options& o, const RegionFilter& region, std::optional<YearRange> years, bool keep_records) {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw GeoError(ErrorCode::kFatalFormat, "cannot open input file " + o.input);
    RecordReader reader(in);
    PaperCityDeduper dedup;
    CityAggregator agg(years);
    Ingest result;
    while (auto rec = reader.next()) {
        if (!region.accepts(*rec) || !dedup.admit(*rec)) continue;
        if (agg.add(*rec) && keep_records) result.records.push_back(std::move(*rec));
    }
    result.parsed = reader.records_read();
    result.rejects = reader.rejects();
    result.cities = agg.cities();
    return result;
}

void write_rejects(const Options& o, const Ingest& data) {
    auto f = open_output(sibling(o.output, ".rejects.tsv"));
    write_reject_report(f, data.rejects);
}

RunMetadata metadata(const Options& o, const Ingest& data) { return {o.seed, data.parsed, data.rejects.size()}; }

int cmd_centroid(const Options& o, std::ostream& out) {
    const RegionFilter region = parse_region(o);
    const Units units = parse_units(o.units);
    const ClusterConfig cfg = cluster_config(o);
    const Ingest data = ingest(o, region, parse_years(o.years), false);
    write_rejects(o, data);
    if (data.cities.empty()) throw GeoError(ErrorCode::kEmptyInput, "no records survive the region and year filters");

    const auto points = to_weighted_points(data.cities);
    const GeoPoint c = centroid(points, cfg.centroid_rule);
    const CentroidRow row{1, 0, c, total_weight(data.cities),
                          rms_dispersion(points, c, cfg.metric, cfg.great_circle_fallback),
                          mean_distance(points, c, cfg.metric, cfg.great_circle_fallback)};
    auto f = open_output(o.output);
    write_centroid_csv(f, std::span(&row, 1), units, metadata(o, data));
    out << fmt::format("centroid lat={} lon={} rms={} {}\n", format_number(c.lat), format_number(c.lon),
                       format_number(in_units(row.rms, units)), to_string(units));
    return kExitOk;
}

int cmd_cluster(const Options& o, std::ostream& out) {
    const RegionFilter region = parse_region(o);
    const Units units = parse_units(o.units);
    const ClusterConfig cfg = cluster_config(o);
    const Ingest data = ingest(o, region, parse_years(o.years), false);
    write_rejects(o, data);

    const ClusterModel model = kmeans_fit(data.cities, cfg);
    {
        auto f = open_output(o.output);
        write_centroid_csv(f, model, units, metadata(o, data));
    }
    auto g = open_output(sibling(o.output, ".geojson"));
    write_cluster_geojson(g, model, data.cities, units);
    out << fmt::format("k={} rms={} mean={} {}\n", model.k(), format_number(in_units(model.overall_rms, units)),
                       format_number(in_units(model.overall_mean, units)), to_string(units));
    return kExitOk;
}

int cmd_elbow(const Options& o, std::ostream& out) {
    const RegionFilter region = parse_region(o);
    const Units units = parse_units(o.units);
    const ClusterConfig cfg = cluster_config(o);
    if (o.mode != "radius" && o.mode != "delta") throw UsageError("mode must be radius or delta");
    if (o.stat != "rms" && o.stat != "mean") throw UsageError("stat must be rms or mean");
    if (o.k_max < 1) throw UsageError("k-max must be positive");
    const Distance threshold = threshold_distance(o.threshold, units);
    const Ingest data = ingest(o, region, parse_years(o.years), false);
    write_rejects(o, data);

    const DispersionCurve curve = dispersion_curve(data.cities, o.k_max, cfg);
    const auto selected = select_k(curve, o.mode == "radius" ? SelectMode::kRadius : SelectMode::kDelta, threshold,
                                   o.stat == "rms" ? CurveStat::kRms : CurveStat::kMean);
    auto f = open_output(o.output);
    write_curve_csv(f, curve, selected, units, metadata(o, data));
    out << "selected_k=" << (selected ? std::to_string(*selected) : std::string("none")) << '\n';
    return kExitOk;
}

int cmd_trend(const Options& o, std::ostream& out) {
    const RegionFilter region = parse_region(o);
    const Units units = parse_units(o.units);
    const ClusterConfig cfg = cluster_config(o);
    const auto years = parse_years(o.years).value_or(YearRange{});
    const Ingest data = ingest(o, region, years, true);
    write_rejects(o, data);

    const TrendSeries series =
        yearly_centroids(data.records, region, years, cfg.metric, cfg.great_circle_fallback, cfg.workers);
    {
        auto f = open_output(o.output);
        write_trend_csv(f, series, units, metadata(o, data));
    }
    if (series.entries.size() >= 2) {
        const DriftReport drift = drift_stats(series);
        auto f = open_output(sibling(o.output, ".drift.csv"));
        write_drift_csv(f, drift, metadata(o, data));
        out << fmt::format("years={} delta_lat={} lat_slope={}\n", series.entries.size(),
                           format_number(drift.delta_lat), format_number(drift.lat_slope));
    } else {
        out << fmt::format("years={} (drift needs at least two years)\n", series.entries.size());
    }
    return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out) {
    const RegionFilter region = parse_region(o);
    if (o.format != "asciigrid" && o.format != "csv") throw UsageError("density format must be asciigrid or csv");
    if (o.rows < 1 || o.cols < 1) throw UsageError("rows and cols must be positive");
    const BBox box = o.grid_bbox.empty() ? default_grid_bbox(region) : parse_bbox(o.grid_bbox);
    if (box.lat_min == box.lat_max || box.lon_min == box.lon_max) throw UsageError("grid bbox has zero extent");
    const Ingest data = ingest(o, region, parse_years(o.years), false);
    write_rejects(o, data);

    const DensityGrid grid = density_grid(data.cities, box, o.rows, o.cols);
    const DisplayMatrix display = log_display(grid);
    const std::vector<double> raw(grid.cells.begin(), grid.cells.end());
    const std::string ext = o.format == "csv" ? ".csv" : ".asc";
    auto emit = [&](const std::filesystem::path& path, std::span<const double> values) {
        auto f = open_output(path);
        if (o.format == "csv")
            write_csv_matrix(f, grid.n_rows, grid.n_cols, values, metadata(o, data));
        else
            write_ascii_grid(f, grid.bbox, grid.n_rows, grid.n_cols, values);
    };
    emit(o.output, raw);
    emit(sibling(o.output, ".log" + ext), display.values);
    out << fmt::format("grid {}x{} sum={} overflow={}\n", grid.n_rows, grid.n_cols, grid.sum(), grid.overflow);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"geohub: centroids, dispersion and k-means regions of geocoded publication records", "geohub"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input,-i", o.input, "Geocoded TSV extract")->required();
        sub->add_option("--output,-o", o.output, "Primary output file")->required();
        sub->add_option("--region", o.region, "lower48 | china | all | bbox")->capture_default_str();
        sub->add_option("--bbox", o.bbox, "lat_min,lat_max,lon_min,lon_max for --region bbox");
        sub->add_option("--years", o.years, "Inclusive year window Y0:Y1");
        sub->add_option("--units", o.units, "miles | km")->capture_default_str();
        sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
        sub->add_option("--metric", o.metric, "vincenty | great-circle")
            ->check(CLI::IsMember({"vincenty", "great-circle"}))
            ->capture_default_str();
        sub->add_flag("--fallback", o.fallback, "Use great-circle distance where Vincenty does not converge");
        sub->add_option("--workers", o.workers, "Worker threads (0: all cores; GEOHUB_THREADS caps)");
        sub->add_option("--centroid-rule", o.centroid_rule, "planar | spherical")
            ->check(CLI::IsMember({"planar", "spherical"}))
            ->capture_default_str();
    };
    auto kmeans_opts = [&](CLI::App* sub) {
        sub->add_option("--restarts", o.restarts, "k-means restarts")->capture_default_str();
        sub->add_option("--max-iterations", o.max_iterations, "Lloyd iteration cap")->capture_default_str();
    };

    auto* centroid_cmd = app.add_subcommand("centroid", "Overall centroid and RMS dispersion");
    common(centroid_cmd);
    auto* cluster_cmd = app.add_subcommand("cluster", "Weighted geodesic k-means");
    common(cluster_cmd);
    kmeans_opts(cluster_cmd);
    cluster_cmd->add_option("--k", o.k, "Number of clusters")->capture_default_str();
    auto* elbow_cmd = app.add_subcommand("elbow", "Dispersion curve and k selection");
    common(elbow_cmd);
    kmeans_opts(elbow_cmd);
    elbow_cmd->add_option("--k-max", o.k_max, "Largest k evaluated")->capture_default_str();
    elbow_cmd->add_option("--mode", o.mode, "radius | delta")->capture_default_str();
    elbow_cmd->add_option("--threshold", o.threshold, "Threshold in --units")->capture_default_str();
    elbow_cmd->add_option("--stat", o.stat, "rms | mean")->capture_default_str();
    auto* trend_cmd = app.add_subcommand("trend", "Per-year centroids and drift");
    common(trend_cmd);
    auto* density_cmd = app.add_subcommand("density", "Publication density grid");
    common(density_cmd);
    density_cmd->add_option("--rows", o.rows, "Grid rows")->capture_default_str();
    density_cmd->add_option("--cols", o.cols, "Grid columns")->capture_default_str();
    density_cmd->add_option("--grid-bbox", o.grid_bbox, "Grid extent lat_min,lat_max,lon_min,lon_max");
    density_cmd->add_option("--format", o.format, "asciigrid | csv")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*centroid_cmd) return cmd_centroid(o, out);
        if (*cluster_cmd) return cmd_cluster(o, out);
        if (*elbow_cmd) return cmd_elbow(o, out);
        if (*trend_cmd) return cmd_trend(o, out);
        return cmd_density(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const GeoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace geohub
