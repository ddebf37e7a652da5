#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <geohub/corpus.hpp>
#include <geohub/geodesy.hpp>

namespace geohub {

/// Row-major publication counts over an equirectangular grid; row 0 is the
/// northernmost row.
struct DensityGrid {
    BBox bbox;
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::int64_t> cells;
    std::int64_t overflow = 0;  // weight of cities outside bbox

    std::int64_t at(int row, int col) const { return cells[static_cast<std::size_t>(row) * n_cols + col]; }
    std::int64_t sum() const;
    double cell_height() const { return (bbox.lat_max - bbox.lat_min) / n_rows; }
    double cell_width() const { return (bbox.lon_max - bbox.lon_min) / n_cols; }
};

inline constexpr int kDefaultGridRows = 200;
inline constexpr int kDefaultGridCols = 400;

/// Bins each city's full weight into the cell containing it. Points on an
/// interior edge go to the southern/western cell. Throws kInvalidGrid or
/// kInvalidBBox.
DensityGrid density_grid(std::span<const CityAggregate> cities, const BBox& bbox, int n_rows, int n_cols);

struct DisplayMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> values;
};

/// log10(1 + count) per cell.
DisplayMatrix log_display(const DensityGrid& grid);

}  // namespace geohub
