#include "nfsim/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nfsim/error.hpp"

namespace nfsim {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{}) fail(ErrorKind::Io, "number formatting failed");
    return {buf, end};
}

void write_trace_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    const bool radius = !trajectory.traces.empty() && trajectory.traces.front().radius.has_value();
    auto out = open_out(path);
    out << "t,max,min,v_x1,v_x2" << (radius ? ",r_a" : "") << '\n';
    for (const auto& r : trajectory.traces) {
        out << format_double(r.t) << ',' << format_double(r.max) << ',' << format_double(r.min) << ','
            << format_double(r.probe1) << ',' << format_double(r.probe2);
        if (radius) out << ',' << format_double(r.radius.value_or(0.0));
        out << '\n';
    }
    finish(out, path);
}

void write_radius_csv(const std::filesystem::path& path, std::span<const RadiusSample> series) {
    auto out = open_out(path);
    out << "t,r_a\n";
    for (const auto& s : series) out << format_double(s.t) << ',' << format_double(s.radius) << '\n';
    finish(out, path);
}

void write_snapshot_csv(const std::filesystem::path& path, const Grid& grid, std::span<const double> values) {
    if (values.size() != grid.size()) fail(ErrorKind::DimensionMismatch, "snapshot size does not match the grid");
    auto out = open_out(path);
    out << "x,y,V\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << format_double(grid.x(i)) << ',' << format_double(grid.y(i)) << ',' << format_double(values[i]) << '\n';
    finish(out, path);
}

std::vector<double> read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        double v = 0.0;
        const char* first = line.data() + comma + 1;
        const auto [end, ec] = std::from_chars(first, line.data() + line.size(), v);
        if (comma == std::string::npos || ec != std::errc{})
            fail(ErrorKind::Io, "malformed snapshot row in " + path.string());
        values.push_back(v);
    }
    return values;
}

std::vector<std::uint8_t> encode_pgm(const Raster& raster) {
    if (raster.pixels.size() != raster.width * raster.height)
        fail(ErrorKind::DimensionMismatch, "raster size does not match its dimensions");
    double lo = 0.0;
    double hi = 0.0;
    if (!raster.pixels.empty()) {
        const auto [a, b] = std::minmax_element(raster.pixels.begin(), raster.pixels.end());
        lo = *a;
        hi = *b;
    }
    std::ostringstream head;
    head << "P5\n# min " << format_double(lo) << " max " << format_double(hi) << '\n'
         << raster.width << ' ' << raster.height << "\n255\n";
    const std::string h = head.str();
    std::vector<std::uint8_t> bytes(h.begin(), h.end());
    bytes.reserve(bytes.size() + raster.pixels.size());
    const double span = hi - lo;
    for (double v : raster.pixels) {
        if (!(span > 0.0)) {
            bytes.push_back(128);
            continue;
        }
        const double q = std::round(255.0 * (v - lo) / span);
        bytes.push_back(static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0)));
    }
    return bytes;
}

void write_heatmap_pgm(const std::filesystem::path& path, const Raster& raster) {
    const auto bytes = encode_pgm(raster);
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    finish(out, path);
}

}  // namespace nfsim
