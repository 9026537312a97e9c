// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small raster plotter: log/linear line plots and heat maps, enough to render
// the benchmark figures without an external plotting stack.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "jsac/png.hpp"

namespace jsac::plot {

struct Rgb {
    std::uint8_t r, g, b;
};

inline const std::array<Rgb, 6>& palette() {
    static const std::array<Rgb, 6> p{{{31, 119, 180},
                                       {214, 39, 40},
                                       {44, 160, 44},
                                       {148, 103, 189},
                                       {255, 127, 14},
                                       {23, 190, 207}}};
    return p;
}

namespace detail {

/// 5x7 glyphs as string art; uppercase-only charset for axis labels.
inline const std::map<char, std::array<const char*, 7>>& font() {
    static const std::map<char, std::array<const char*, 7>> f = {
        {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
        {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
        {'2', {" ### ", "#   #", "    #", "  ## ", " #   ", "#    ", "#####"}},
        {'3', {" ### ", "#   #", "    #", "  ## ", "    #", "#   #", " ### "}},
        {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
        {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
        {'6', {" ### ", "#    ", "#    ", "#### ", "#   #", "#   #", " ### "}},
        {'7', {"#####", "    #", "   # ", "  #  ", "  #  ", "  #  ", "  #  "}},
        {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
        {'9', {" ### ", "#   #", "#   #", " ####", "    #", "    #", " ### "}},
        {'A', {" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
        {'B', {"#### ", "#   #", "#   #", "#### ", "#   #", "#   #", "#### "}},
        {'C', {" ### ", "#   #", "#    ", "#    ", "#    ", "#   #", " ### "}},
        {'D', {"#### ", "#   #", "#   #", "#   #", "#   #", "#   #", "#### "}},
        {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
        {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
        {'G', {" ### ", "#   #", "#    ", "# ###", "#   #", "#   #", " ### "}},
        {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
        {'I', {" ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
        {'K', {"#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #"}},
        {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
        {'M', {"#   #", "## ##", "# # #", "# # #", "#   #", "#   #", "#   #"}},
        {'N', {"#   #", "##  #", "# # #", "#  ##", "#   #", "#   #", "#   #"}},
        {'O', {" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
        {'P', {"#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    "}},
        {'R', {"#### ", "#   #", "#   #", "#### ", "# #  ", "#  # ", "#   #"}},
        {'S', {" ####", "#    ", "#    ", " ### ", "    #", "    #", "#### "}},
        {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
        {'U', {"#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
        {'V', {"#   #", "#   #", "#   #", "#   #", "#   #", " # # ", "  #  "}},
        {'W', {"#   #", "#   #", "#   #", "# # #", "# # #", "## ##", "#   #"}},
        {'Y', {"#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  "}},
        {'-', {"     ", "     ", "     ", "#####", "     ", "     ", "     "}},
        {'+', {"     ", "  #  ", "  #  ", "#####", "  #  ", "  #  ", "     "}},
        {'.', {"     ", "     ", "     ", "     ", "     ", " ##  ", " ##  "}},
        {',', {"     ", "     ", "     ", "     ", " ##  ", "  #  ", " #   "}},
        {'/', {"    #", "    #", "   # ", "  #  ", " #   ", "#    ", "#    "}},
        {'(', {"   # ", "  #  ", " #   ", " #   ", " #   ", "  #  ", "   # "}},
        {')', {" #   ", "  #  ", "   # ", "   # ", "   # ", "  #  ", " #   "}},
        {'=', {"     ", "     ", "#####", "     ", "#####", "     ", "     "}},
        {' ', {"     ", "     ", "     ", "     ", "     ", "     ", "     "}},
    };
    return f;
}

inline void draw_text(Image& img, long long x, long long y, const std::string& text, Rgb c) {
    const auto& f = font();
    long long cx = x;
    for (char raw : text) {
        const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
        auto it = f.find(ch);
        if (it != f.end()) {
            for (int row = 0; row < 7; ++row)
                for (int col = 0; col < 5; ++col)
                    if (it->second[static_cast<std::size_t>(row)][col] == '#')
                        img.set(cx + col, y + row, c.r, c.g, c.b);
        }
        cx += 6;
    }
}

inline void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
    const double dx = x1 - x0, dy = y1 - y0;
    const int steps = std::max(2, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        img.set(std::llround(x0 + t * dx), std::llround(y0 + t * dy), c.r, c.g, c.b);
    }
}

inline void draw_marker(Image& img, double x, double y, Rgb c) {
    for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy)
            img.set(std::llround(x) + dx, std::llround(y) + dy, c.r, c.g, c.b);
}

inline std::string fmt_tick(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) < 1e-2 || std::abs(v) >= 1e4))
        std::snprintf(buf, sizeof(buf), "%.0E", v);
    else
        std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct LinePlotSpec {
    std::string title, xlabel, ylabel;
    bool log_y = false;
    std::size_t width = 720, height = 520;
};

/// Renders labeled line series with markers; log-y drops non-positive points.
inline void line_plot(const std::vector<Series>& series, const LinePlotSpec& spec,
                      const std::string& path) {
    require(!series.empty(), "line_plot: no series");
    const long long ml = 70, mr = 20, mt = 30, mb = 50;
    const long long pw = static_cast<long long>(spec.width) - ml - mr;
    const long long ph = static_cast<long long>(spec.height) - mt - mb;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (spec.log_y) {
                if (yv <= 0.0) continue;
                yv = std::log10(yv);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    const double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    Image img(spec.width, spec.height);
    const Rgb black{0, 0, 0}, grey{200, 200, 200};
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        detail::draw_line(img, px(xv), mt, px(xv), mt + ph, grey);
        detail::draw_line(img, ml, py(yv), ml + pw, py(yv), grey);
        detail::draw_text(img, static_cast<long long>(px(xv)) - 12, mt + ph + 8,
                          detail::fmt_tick(xv), black);
        const std::string ylab =
            spec.log_y ? ("1E" + detail::fmt_tick(yv)) : detail::fmt_tick(yv);
        detail::draw_text(img, 4, static_cast<long long>(py(yv)) - 3, ylab, black);
    }
    detail::draw_line(img, ml, mt, ml, mt + ph, black);
    detail::draw_line(img, ml, mt + ph, ml + pw, mt + ph, black);
    detail::draw_text(img, ml, 10, spec.title, black);
    detail::draw_text(img, ml + pw / 2 - 3 * static_cast<long long>(spec.xlabel.size()),
                      static_cast<long long>(spec.height) - 14, spec.xlabel, black);
    detail::draw_text(img, 4, mt - 14, spec.ylabel, black);

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Rgb c = palette()[si % palette().size()];
        const auto& s = series[si];
        double lx = 0, ly = 0;
        bool have_last = false;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (spec.log_y) {
                if (yv <= 0.0) { have_last = false; continue; }
                yv = std::log10(yv);
            }
            const double X = px(s.x[i]), Y = py(yv);
            if (have_last) detail::draw_line(img, lx, ly, X, Y, c);
            detail::draw_marker(img, X, Y, c);
            lx = X; ly = Y; have_last = true;
        }
        // legend
        const long long leg_y = mt + 8 + 12 * static_cast<long long>(si);
        detail::draw_line(img, ml + pw - 110, leg_y + 3, ml + pw - 95, leg_y + 3, c);
        detail::draw_text(img, ml + pw - 90, leg_y, s.label, black);
    }
    img.write(path);
}

struct HeatmapSpec {
    std::string title, xlabel, ylabel;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  // axis ranges
    bool log_magnitude = true;
    std::size_t width = 720, height = 560;
};

/// values in row-major [ny][nx]; rendered with y increasing upward.
inline void heatmap(const std::vector<double>& values, std::size_t nx, std::size_t ny,
                    const HeatmapSpec& spec, const std::string& path) {
    require(values.size() == nx * ny && nx > 0 && ny > 0, "heatmap: bad dimensions");
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;
    const double floor_db = -60.0;

    const long long ml = 70, mr = 20, mt = 30, mb = 50;
    const long long pw = static_cast<long long>(spec.width) - ml - mr;
    const long long ph = static_cast<long long>(spec.height) - mt - mb;
    Image img(spec.width, spec.height);
    const Rgb black{0, 0, 0};
    for (long long yy = 0; yy < ph; ++yy) {
        for (long long xx = 0; xx < pw; ++xx) {
            const std::size_t ix = std::min(nx - 1, static_cast<std::size_t>(
                                                        static_cast<double>(xx) / pw * nx));
            const std::size_t iy = std::min(
                ny - 1,
                static_cast<std::size_t>((1.0 - static_cast<double>(yy + 1) / ph) * ny));
            double t;
            if (spec.log_magnitude) {
                const double db =
                    20.0 * std::log10(std::max(values[iy * nx + ix] / vmax, 1e-12));
                t = std::clamp(1.0 - db / floor_db, 0.0, 1.0);
            } else {
                t = std::clamp(values[iy * nx + ix] / vmax, 0.0, 1.0);
            }
            // dark blue -> yellow
            const auto r = static_cast<std::uint8_t>(20 + 235 * t);
            const auto g = static_cast<std::uint8_t>(20 + 215 * t);
            const auto b = static_cast<std::uint8_t>(90 + 60 * (1.0 - t));
            img.set(ml + xx, mt + yy, r, g, b);
        }
    }
    detail::draw_line(img, ml, mt, ml, mt + ph, black);
    detail::draw_line(img, ml, mt + ph, ml + pw, mt + ph, black);
    for (int i = 0; i <= 5; ++i) {
        const double xv = spec.x0 + (spec.x1 - spec.x0) * i / 5.0;
        const double yv = spec.y0 + (spec.y1 - spec.y0) * i / 5.0;
        detail::draw_text(img, ml + pw * i / 5 - 12, mt + ph + 8, detail::fmt_tick(xv), black);
        detail::draw_text(img, 4, mt + ph - ph * i / 5 - 3, detail::fmt_tick(yv), black);
    }
    detail::draw_text(img, ml, 10, spec.title, black);
    detail::draw_text(img, ml + pw / 2 - 3 * static_cast<long long>(spec.xlabel.size()),
                      static_cast<long long>(spec.height) - 14, spec.xlabel, black);
    detail::draw_text(img, 4, mt - 14, spec.ylabel, black);
    img.write(path);
}

}  // namespace jsac::plot
