#include <geohub/raster.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <geohub/error.hpp>

namespace geohub {

std::int64_t DensityGrid::sum() const { return std::accumulate(cells.begin(), cells.end(), std::int64_t{0}); }

namespace {

// Bin along one axis counted from the low edge; a value on an interior edge
// belongs to the lower bin.
int lower_bin(double value, double lo, double hi, int bins) {
    const double t = (value - lo) / (hi - lo) * bins;
    const int idx = static_cast<int>(std::ceil(t)) - 1;
    return std::clamp(idx, 0, bins - 1);
}

}  // namespace

DensityGrid density_grid(std::span<const CityAggregate> cities, const BBox& bbox, int n_rows, int n_cols) {
    if (n_rows < 1 || n_cols < 1) throw GeoError(ErrorCode::kInvalidGrid, "grid dimensions must be positive");
    bbox.validate();
    if (bbox.lat_min == bbox.lat_max || bbox.lon_min == bbox.lon_max)
        throw GeoError(ErrorCode::kInvalidGrid, "bbox has zero extent");

    DensityGrid grid;
    grid.bbox = bbox;
    grid.n_rows = n_rows;
    grid.n_cols = n_cols;
    grid.cells.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), 0);
    for (const auto& city : cities) {
        if (!bbox.contains(city.point)) {
            grid.overflow += city.weight;
            continue;
        }
        const int from_south = lower_bin(city.point.lat, bbox.lat_min, bbox.lat_max, n_rows);
        const int col = lower_bin(city.point.lon, bbox.lon_min, bbox.lon_max, n_cols);
        const int row = n_rows - 1 - from_south;
        grid.cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) + static_cast<std::size_t>(col)] +=
            city.weight;
    }
    return grid;
}

DisplayMatrix log_display(const DensityGrid& grid) {
    DisplayMatrix m;
    m.n_rows = grid.n_rows;
    m.n_cols = grid.n_cols;
    m.values.reserve(grid.cells.size());
    for (const auto c : grid.cells) m.values.push_back(c == 0 ? 0.0 : std::log10(1.0 + static_cast<double>(c)));
    return m;
}

}  // namespace geohub
