#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "affperc/carpet.hpp"
#include "affperc/serial.hpp"

namespace affperc {

enum class RenderFormat { svg, pgm };

struct RenderSpec {
    int level = 1;
    RenderFormat format = RenderFormat::svg;
    int width_px = 800;
    std::string fill_color = "#15405f";
    std::string empty_color = "#ffffff";
    bool draw_gridlines = false;
};

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline int gray_of_color(const std::string& hex) {
    if (hex.size() != 7 || hex[0] != '#') throw std::domain_error("colors must be '#rrggbb'");
    const auto comp = [&](int i) {
        return static_cast<int>(std::stoul(hex.substr(static_cast<std::size_t>(i), 2), nullptr, 16));
    };
    const double y = 0.2126 * comp(1) + 0.7152 * comp(3) + 0.0722 * comp(5);
    return static_cast<int>(std::lround(y));
}

}  // namespace detail

// One exact-coordinate rectangle per selected cell on a unit-square viewBox.
// Row 0 sits at the bottom (the y axis is flipped relative to SVG's), matching
// the mathematical orientation of the carpet.
inline std::string render_svg(const Realization& r, const RenderSpec& spec) {
    const std::int64_t w = r.params.cols_at(spec.level);
    const std::int64_t h = r.params.rows_at(spec.level);
    const double cw = 1.0 / static_cast<double>(w);
    const double ch = 1.0 / static_cast<double>(h);
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width_px) +
           "\" height=\"" + std::to_string(spec.width_px) + "\" viewBox=\"0 0 1 1\">\n";
    out += "<rect width=\"1\" height=\"1\" fill=\"" + spec.empty_color + "\"/>\n";
    for (const Cell& c : r.cells_at(spec.level)) {
        out += "<rect class=\"cell\" x=\"" + detail::fmt_coord(c.col * cw) + "\" y=\"" +
               detail::fmt_coord(1.0 - (c.row + 1) * ch) + "\" width=\"" + detail::fmt_coord(cw) +
               "\" height=\"" + detail::fmt_coord(ch) + "\" fill=\"" + spec.fill_color + "\"/>\n";
    }
    if (spec.draw_gridlines) {
        const std::string style = " stroke=\"#888888\" stroke-width=\"0.0005\"";
        for (std::int64_t c = 0; c <= w; ++c)
            out += "<line x1=\"" + detail::fmt_coord(c * cw) + "\" y1=\"0\" x2=\"" +
                   detail::fmt_coord(c * cw) + "\" y2=\"1\"" + style + "/>\n";
        for (std::int64_t rr = 0; rr <= h; ++rr)
            out += "<line x1=\"0\" y1=\"" + detail::fmt_coord(rr * ch) + "\" x2=\"1\" y2=\"" +
                   detail::fmt_coord(rr * ch) + "\"" + style + "/>\n";
    }
    out += "</svg>\n";
    return out;
}

// Cell-aligned grayscale raster: every cell maps to an integer pixel block, so
// no cell is split or lost to rounding.
inline std::string render_pgm(const Realization& r, const RenderSpec& spec) {
    const std::int64_t w = r.params.cols_at(spec.level);
    const std::int64_t h = r.params.rows_at(spec.level);
    if (spec.width_px < w)
        throw std::domain_error("width_px must be at least n^level so each cell gets a pixel");
    const std::int64_t cw = spec.width_px / w;
    const std::int64_t img_w = cw * w;
    const std::int64_t ch = std::max<std::int64_t>(1, (img_w + h / 2) / h);
    const std::int64_t img_h = ch * h;
    const char fill = static_cast<char>(detail::gray_of_color(spec.fill_color));
    const char empty = static_cast<char>(detail::gray_of_color(spec.empty_color));
    std::string pixels(static_cast<std::size_t>(img_w * img_h), empty);
    for (const Cell& c : r.cells_at(spec.level)) {
        const std::int64_t x0 = c.col * cw;
        const std::int64_t y0 = (h - 1 - c.row) * ch;  // row 0 at the bottom
        for (std::int64_t y = y0; y < y0 + ch; ++y)
            for (std::int64_t x = x0; x < x0 + cw; ++x)
                pixels[static_cast<std::size_t>(y * img_w + x)] = fill;
    }
    std::string out = "P5\n" + std::to_string(img_w) + " " + std::to_string(img_h) + "\n255\n";
    out += pixels;
    return out;
}

inline void render(const Realization& r, const RenderSpec& spec, const std::filesystem::path& out) {
    if (spec.level < 1 || spec.level > r.depth)
        throw std::domain_error("render level must lie in [1, depth]");
    if (spec.width_px < 1) throw std::domain_error("width_px must be positive");
    const std::string content =
        spec.format == RenderFormat::svg ? render_svg(r, spec) : render_pgm(r, spec);
    write_file_atomic(out, content);
}

}  // namespace affperc
