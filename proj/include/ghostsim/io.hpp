// SPDX-License-Identifier: Apache-2.0
//
// Deterministic file formats: 16-bit PGM images with an embedded scale
// window, and the sweep CSV table.  All numeric formatting uses shortest
// round-trip representations so reruns are byte-identical.

#pragma once

#include <string>
#include <vector>

#include "ghostsim/analysis.hpp"
#include "ghostsim/core.hpp"

namespace ghostsim {

/// Shortest round-trip decimal representation of a double (std::to_chars).
std::string format_double(double v);

/// Write a 16-bit big-endian binary PGM.  Values are mapped linearly from
/// [lo, hi] to [0, 65535] (clamped); the window is recorded in a header
/// comment so the mapping can be inverted.  Passing lo == hi selects the
/// image's own min/max (or [0,1] for a constant image in that range).
void write_pgm16(const Image& img, const std::string& path, double lo = 0.0,
                 double hi = 1.0);

struct PgmImage {
    Image image;
    double lo = 0.0;
    double hi = 1.0;
};

/// Read back a PGM written by write_pgm16, undoing the scale window.
PgmImage read_pgm16(const std::string& path);

/// Exact header of the sweep CSV table.
extern const char* const kSweepCsvHeader;

std::string sweep_csv_string(const std::vector<SnrRecord>& records);
void write_sweep_csv(const std::vector<SnrRecord>& records, const std::string& path);

} // namespace ghostsim
