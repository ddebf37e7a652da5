#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <geohub/geodesy.hpp>

namespace geohub::testing {

struct GeodesicCase {
    GeoPoint p, q;
    double s12_m;
};

/// Karney inverse-geodesic reference distances (see fixtures/gen_geodesic_oracle.py).
inline std::vector<GeodesicCase> load_geodesic_cases() {
    std::ifstream in(std::string(GEOHUB_FIXTURE_DIR) + "/geodesic_pairs.tsv");
    if (!in) throw std::runtime_error("missing geodesic_pairs.tsv fixture");
    std::string line;
    std::getline(in, line);
    std::vector<GeodesicCase> cases;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        GeodesicCase c;
        row >> c.p.lat >> c.p.lon >> c.q.lat >> c.q.lon >> c.s12_m;
        cases.push_back(c);
    }
    return cases;
}

}  // namespace geohub::testing
