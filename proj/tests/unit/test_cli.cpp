#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <synthetic.hpp>

#include <geohub/cli.hpp>

using namespace geohub;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("geohub_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_corpus(const std::string& path, std::uint64_t seed, int papers) {
    std::ofstream out(path, std::ios::binary);
    out << "paper_id\tyear\tcity\tadmin1\tcountry\tlat\tlon\n";
    for (const auto& r : testing::random_records(seed, papers)) {
        const std::string city = r.city_key.substr(0, r.city_key.find('|'));
        out << r.paper_id << '\t' << r.year << '\t' << city << '\t' << r.admin1 << '\t' << r.country << '\t'
            << r.point.lat << '\t' << r.point.lon << '\n';
    }
    out << "bad\tline\n";
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("centroid subcommand") {
    TempDir dir;
    write_corpus(dir / "us.tsv", 1, 300);
    CHECK(run({"centroid", "--input", dir / "us.tsv", "--region", "lower48", "--years", "1988:2016", "--output",
               dir / "centroid.csv"}) == kExitOk);
    const std::string csv = slurp(dir / "centroid.csv");
    CHECK(csv.rfind("k,cluster_id,lat,lon,weight,rms,mean,units\n1,0,", 0) == 0);
    CHECK(csv.find("rejects=1\n") != std::string::npos);
    CHECK(slurp(dir / "centroid.rejects.tsv") == "line_no\treason\n" + std::to_string(2 + [&] {
              int lines = 0;
              for (char c : slurp(dir / "us.tsv")) lines += c == '\n';
              return lines - 2;
          }()) + "\texpected at least 7 fields, found 2\n");
}

TEST_CASE("cluster, elbow, trend and density subcommands") {
    TempDir dir;
    write_corpus(dir / "us.tsv", 2, 500);
    CHECK(run({"cluster", "--input", dir / "us.tsv", "--k", "3", "--output", dir / "cl.csv"}) == kExitOk);
    CHECK(slurp(dir / "cl.geojson").find("\"FeatureCollection\"") != std::string::npos);

    CHECK(run({"elbow", "--input", dir / "us.tsv", "--k-max", "4", "--mode", "radius", "--threshold", "100",
               "--units", "miles", "--output", dir / "elbow.csv"}) == kExitOk);
    CHECK(slurp(dir / "elbow.csv").find("\nselected_k,") != std::string::npos);

    CHECK(run({"trend", "--input", dir / "us.tsv", "--region", "china", "--years", "1988:2016", "--output",
               dir / "trend.csv"}) == kExitOk);
    CHECK(slurp(dir / "trend.drift.csv").rfind("delta_lat,delta_lon,lat_slope,lon_slope\n", 0) == 0);

    CHECK(run({"density", "--input", dir / "us.tsv", "--rows", "20", "--cols", "40", "--output", dir / "d.asc"}) ==
          kExitOk);
    CHECK(slurp(dir / "d.asc").rfind("ncols 40\nnrows 20\n", 0) == 0);
    CHECK(fs::exists(dir / "d.log.asc"));
    CHECK(run({"density", "--input", dir / "us.tsv", "--format", "csv", "--output", dir / "d.csv"}) == kExitOk);
    CHECK(fs::exists(dir / "d.log.csv"));
}

TEST_CASE("identical runs give identical bytes") {
    TempDir dir;
    write_corpus(dir / "us.tsv", 3, 400);
    for (const char* name : {"a.csv", "b.csv"})
        REQUIRE(run({"cluster", "--input", dir / "us.tsv", "--k", "3", "--seed", "9", "--output", dir / name}) ==
                kExitOk);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.geojson") == slurp(dir / "b.geojson"));
}

TEST_CASE("usage and data errors") {
    TempDir dir;
    std::string err;
    CHECK(run({"frobnicate"}, &err) == kExitUsage);
    CHECK(err.find("Usage") != std::string::npos);
    CHECK(run({}, &err) == kExitUsage);
    CHECK(run({"centroid", "--output", dir / "x.csv"}) == kExitUsage);
    CHECK(run({"elbow", "--input", "x", "--output", dir / "x.csv", "--threshold", "-3"}) == kExitUsage);
    CHECK(run({"centroid", "--input", dir / "missing.tsv", "--output", dir / "x.csv"}) == kExitData);

    write_corpus(dir / "us.tsv", 4, 20);
    CHECK(run({"cluster", "--input", dir / "us.tsv", "--k", "50", "--output", dir / "x.csv"}) == kExitData);
}

}  // TEST_SUITE
