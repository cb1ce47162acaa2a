// SPDX-License-Identifier: Apache-2.0

#include "glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghostsim::detail {

std::vector<Segment> xgi_skeleton(double scene_mm, double letter_h_mm) {
    const double h = letter_h_mm;
    const double wl = 0.5 * h;   // letter width
    const double gap = 0.12 * h; // spacing between letter boxes
    const double total = 3.0 * wl + 2.0 * gap;
    const double cx = 0.5 * scene_mm;
    const double cy = 0.5 * scene_mm;
    const double ty = cy - 0.5 * h; // top
    const double by = cy + 0.5 * h; // bottom

    const double x0 = cx - 0.5 * total;       // X box left
    const double x1 = x0 + wl + gap;          // G box left
    const double x2 = x1 + wl + gap;          // I box left

    std::vector<Segment> s;
    // X: the two diagonals.
    s.push_back({x0, ty, x0 + wl, by});
    s.push_back({x0, by, x0 + wl, ty});
    // G: block letter from five strokes.
    s.push_back({x1, ty, x1 + wl, ty});            // top
    s.push_back({x1, ty, x1, by});                 // left
    s.push_back({x1, by, x1 + wl, by});            // bottom
    s.push_back({x1 + wl, by, x1 + wl, cy});       // right, lower half
    s.push_back({x1 + wl, cy, x1 + 0.5 * wl, cy}); // inward bar
    // I: stem plus serifs.
    const double ic = x2 + 0.5 * wl;
    s.push_back({ic, ty, ic, by});
    s.push_back({x2 + 0.15 * wl, ty, x2 + 0.85 * wl, ty});
    s.push_back({x2 + 0.15 * wl, by, x2 + 0.85 * wl, by});
    return s;
}

double skeleton_distance(const std::vector<Segment>& segments, double x, double y) {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments) {
        const double dx = s.x1 - s.x0;
        const double dy = s.y1 - s.y0;
        const double len_sq = dx * dx + dy * dy;
        double t = len_sq > 0.0 ? ((x - s.x0) * dx + (y - s.y0) * dy) / len_sq : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double px = s.x0 + t * dx;
        const double py = s.y0 + t * dy;
        best = std::min(best, std::hypot(x - px, y - py));
    }
    return best;
}

} // namespace ghostsim::detail
