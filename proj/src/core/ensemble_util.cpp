// SPDX-License-Identifier: Apache-2.0

#include "ensemble_util.hpp"

#include "ghostsim/parallel.hpp"

namespace ghostsim::detail {

std::vector<double> ensemble_mean_map(const MaskEnsemble& ens) {
    const size_t px = ens.masks.front().size();
    std::vector<double> mean(px, 0.0);
    for (const Image& m : ens.masks)
        for (size_t i = 0; i < px; ++i) mean[i] += m.data()[i];
    for (double& v : mean) v /= static_cast<double>(ens.masks.size());
    return mean;
}

std::vector<double> accumulate_weighted_masks(const MaskEnsemble& ens,
                                              const std::vector<double>& w) {
    const size_t px = ens.masks.front().size();
    const int64_t J = static_cast<int64_t>(ens.masks.size());
    const int64_t chunk = 256;
    const int64_t n_chunks = (J + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial(n_chunks);
    parallel_for(J, chunk, [&](int64_t begin, int64_t end) {
        std::vector<double> acc(px, 0.0);
        for (int64_t j = begin; j < end; ++j) {
            const std::vector<double>& a = ens.masks[j].data();
            const double wj = w[j];
            for (size_t x = 0; x < px; ++x) acc[x] += a[x] * wj;
        }
        partial[begin / chunk] = std::move(acc);
    });
    std::vector<double> out(px, 0.0);
    for (const auto& acc : partial)
        for (size_t x = 0; x < px; ++x) out[x] += acc[x];
    return out;
}

} // namespace ghostsim::detail
