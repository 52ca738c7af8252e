// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "invren/volren.h"

#include <algorithm>

namespace invren {

void adaptive_resample(const std::vector<double>& depths, const std::vector<double>& weights, uint32_t n,
                       std::vector<double>& merged) {
    merged = depths;
    if (n == 0 || depths.size() < 2) return;

    double total = 0.0;
    for (double w : weights) total += w;

    std::vector<double> extra(n);
    if (total <= 1e-12) {
        // Degenerate CDF: fall back to uniform placement over the range.
        const double t0 = depths.front(), t1 = depths.back();
        for (uint32_t i = 0; i < n; ++i) extra[i] = t0 + (i + 0.5) / n * (t1 - t0);
    } else {
        // Stratified inverse-CDF draw over segments [t_j, t_{j+1}].
        std::vector<double> cdf(weights.size() + 1, 0.0);
        for (size_t j = 0; j < weights.size(); ++j) cdf[j + 1] = cdf[j] + weights[j] / total;
        cdf.back() = 1.0;
        for (uint32_t i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            size_t j = std::min<size_t>(weights.size() - 1, static_cast<size_t>(it - cdf.begin()) - 1);
            const double span = cdf[j + 1] - cdf[j];
            const double frac = span > 0.0 ? (u - cdf[j]) / span : 0.5;
            extra[i] = depths[j] + frac * (depths[j + 1] - depths[j]);
        }
    }
    merged.insert(merged.end(), extra.begin(), extra.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
}

}  // namespace invren
