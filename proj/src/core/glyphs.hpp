// SPDX-License-Identifier: Apache-2.0
//
// Internal renderer for the "XGI" block-letter glyphs used by the test
// stencils.  Glyphs are defined as a segment skeleton in physical (mm)
// coordinates; callers rasterize them at any stroke width.

#pragma once

#include <vector>

namespace ghostsim::detail {

struct Segment {
    double x0, y0, x1, y1;
};

/// Segment skeleton of the letters X G I, horizontally centered in a square
/// scene of side scene_mm with letters letter_h_mm tall.
std::vector<Segment> xgi_skeleton(double scene_mm, double letter_h_mm);

/// Euclidean distance from (x, y) to the nearest skeleton segment.
double skeleton_distance(const std::vector<Segment>& segments, double x, double y);

} // namespace ghostsim::detail
