#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nfsim/analysis.hpp"
#include "nfsim/grid.hpp"
#include "nfsim/solver.hpp"

namespace nfsim {

/// 17 significant digits, enough to round-trip binary64.
std::string format_double(double v);

/// Columns: t, max, min, v_x1, v_x2 and r_a when the run tracked activity.
void write_trace_csv(const std::filesystem::path& path, const Trajectory& trajectory);
void write_radius_csv(const std::filesystem::path& path, std::span<const RadiusSample> series);
/// (x, y, V) per node in index order.
void write_snapshot_csv(const std::filesystem::path& path, const Grid& grid, std::span<const double> values);
/// V column of a snapshot file.
std::vector<double> read_snapshot_csv(const std::filesystem::path& path);

/// Binary PGM bytes: P5, maxval 255, raster min/max in a comment line,
/// linear map of [min, max] onto [0, 255], constant rasters at 128.
std::vector<std::uint8_t> encode_pgm(const Raster& raster);
void write_heatmap_pgm(const std::filesystem::path& path, const Raster& raster);

}  // namespace nfsim
