// SPDX-License-Identifier: Apache-2.0
//
// Internal ensemble helpers shared by the reconstruction and analysis
// modules.

#pragma once

#include <vector>

#include "ghostsim/masks.hpp"

namespace ghostsim::detail {

/// Per-pixel ensemble mean map m(x) = (1/J) sum_j A_j(x).
std::vector<double> ensemble_mean_map(const MaskEnsemble& ens);

/// out(x) = sum_j A_j(x) w_j, computed with fixed chunking over masks and
/// partials combined in chunk order so the result is bit-identical for any
/// thread count.
std::vector<double> accumulate_weighted_masks(const MaskEnsemble& ens,
                                              const std::vector<double>& w);

} // namespace ghostsim::detail
