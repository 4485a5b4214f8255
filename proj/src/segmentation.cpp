#include "roadseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace roadseg {

namespace {

template <bool Parallel>
Histogram256 build_histogram_impl(const TransformedMap& t) {
    const DisparityMap& map = t.map;
    const std::int64_t npx = static_cast<std::int64_t>(map.values.size());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) if (Parallel)
    for (std::int64_t i = 0; i < npx; ++i) {
        if (!map.valid[i]) continue;
        lo = std::min(lo, map.values[i]);
        hi = std::max(hi, map.values[i]);
    }
    if (!std::isfinite(lo)) throw EmptySelection("build_histogram: no valid pixel");

    Histogram256 h;
    h.lo = lo;
    h.hi = (hi > lo) ? hi : lo + 1.0;  // degenerate range: all mass lands in bin 0

    std::vector<std::uint64_t> partial(static_cast<std::size_t>(map.height) * 256, 0);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < map.height; ++v) {
        std::uint64_t* bins = partial.data() + static_cast<std::size_t>(v) * 256;
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        for (int u = 0; u < map.width; ++u) {
            const std::size_t i = base + u;
            if (!map.valid[i]) continue;
            ++bins[h.bin_of(map.values[i])];
        }
    }
    for (int v = 0; v < map.height; ++v) {
        const std::uint64_t* bins = partial.data() + static_cast<std::size_t>(v) * 256;
        for (int b = 0; b < 256; ++b) h.counts[b] += bins[b];
    }
    return h;
}

}  // namespace

Histogram256 build_histogram(const TransformedMap& t) { return build_histogram_impl<true>(t); }

namespace serial {
Histogram256 build_histogram(const TransformedMap& t) { return build_histogram_impl<false>(t); }
}  // namespace serial

OtsuResult otsu_threshold(const Histogram256& h) {
    const std::int64_t total = static_cast<std::int64_t>(h.total());
    if (total < 2) throw DegenerateHistogram("otsu_threshold: fewer than 2 samples");

    std::int64_t weighted_total = 0;  // sum of bin * count
    for (int b = 0; b < 256; ++b) weighted_total += static_cast<std::int64_t>(b) * h.counts[b];

    // Between-class variance for the split "bins <= k vs bins > k":
    //   w0 w1 (mu0 - mu1)^2 = (m0*W - M*w0)^2 / (W^2 w0 (W - w0)).
    // The numerator difference is integer-exact, which keeps tie-breaking
    // deterministic.
    std::int64_t w0 = 0, m0 = 0;
    double best_var = -1.0;
    int best_bin = -1;
    for (int k = 0; k < 256; ++k) {
        w0 += static_cast<std::int64_t>(h.counts[k]);
        m0 += static_cast<std::int64_t>(k) * static_cast<std::int64_t>(h.counts[k]);
        const std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double diff = static_cast<double>(m0 * total - weighted_total * w0);
        const double var = diff * diff / (static_cast<double>(total) * static_cast<double>(total) *
                                          static_cast<double>(w0) * static_cast<double>(w1));
        if (var > best_var) {
            best_var = var;
            best_bin = k;
        }
    }
    if (best_bin < 0)
        throw DegenerateHistogram("otsu_threshold: all mass in a single bin");
    return OtsuResult{best_bin, best_var};
}

SegmentationResult segment(const TransformedMap& t, Polarity polarity) {
    const DisparityMap& map = t.map;
    SegmentationResult r;
    r.width = map.width;
    r.height = map.height;
    r.polarity = polarity;
    r.region = map.valid;
    r.damage.assign(map.values.size(), 0);

    const Histogram256 h = build_histogram(t);
    OtsuResult otsu;
    try {
        otsu = otsu_threshold(h);
    } catch (const DegenerateHistogram&) {
        r.degenerate = true;
        r.threshold = h.lo;
        r.n_undamaged = static_cast<std::int64_t>(h.total());
        return r;
    }

    const double bin_width = (h.hi - h.lo) / 256.0;
    r.threshold = h.upper_edge(otsu.bin);
    r.otsu_variance = otsu.variance * bin_width * bin_width;

    const std::int64_t npx = static_cast<std::int64_t>(map.values.size());
    std::int64_t damaged = 0;
#pragma omp parallel for schedule(static) reduction(+ : damaged)
    for (std::int64_t i = 0; i < npx; ++i) {
        if (!r.region[i]) continue;
        const bool dmg = (polarity == Polarity::Below) ? (map.values[i] < r.threshold)
                                                       : (map.values[i] >= r.threshold);
        if (dmg) {
            r.damage[i] = 1;
            ++damaged;
        }
    }
    r.n_damaged = damaged;
    r.n_undamaged = static_cast<std::int64_t>(h.total()) - damaged;
    return r;
}

SegmentationResult clean_mask(const SegmentationResult& s, int min_area) {
    SegmentationResult r = s;
    if (min_area <= 0) return r;

    const int w = r.width, h = r.height;
    std::vector<std::uint8_t> visited(r.damage.size(), 0);
    std::vector<std::size_t> component, stack;

    for (std::size_t start = 0; start < r.damage.size(); ++start) {
        if (!r.damage[start] || visited[start]) continue;
        component.clear();
        stack.clear();
        stack.push_back(start);
        visited[start] = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            component.push_back(i);
            const int u = static_cast<int>(i % w);
            const int v = static_cast<int>(i / w);
            const std::size_t nb[4] = {i - 1, i + 1, i - static_cast<std::size_t>(w),
                                       i + static_cast<std::size_t>(w)};
            const bool in[4] = {u > 0, u + 1 < w, v > 0, v + 1 < h};
            for (int k = 0; k < 4; ++k) {
                if (!in[k]) continue;
                const std::size_t j = nb[k];
                if (r.damage[j] && !visited[j]) {
                    visited[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        if (static_cast<int>(component.size()) < min_area) {
            for (std::size_t i : component) r.damage[i] = 0;
            r.n_damaged -= static_cast<std::int64_t>(component.size());
            r.n_undamaged += static_cast<std::int64_t>(component.size());
        }
    }
    return r;
}

}  // namespace roadseg
