#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "roadseg/transform.hpp"

namespace roadseg {

/// 256-bin linear quantization of the valid masked transformed disparities.
struct Histogram256 {
    std::array<std::uint64_t, 256> counts{};
    double lo = 0.0;
    double hi = 1.0;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    int bin_of(double x) const {
        int b = static_cast<int>((x - lo) / (hi - lo) * 256.0);
        return b < 0 ? 0 : (b > 255 ? 255 : b);
    }
    /// Upper edge of bin b; splitting at bin b puts bins <= b below the value.
    double upper_edge(int b) const { return lo + (b + 1) * (hi - lo) / 256.0; }
};

struct OtsuResult {
    int bin = 0;
    double variance = 0.0;  // between-class variance at the split, bin units
};

enum class Polarity {
    Below,  // damage sits below the threshold (depressions: potholes)
    Above,  // damage sits above the threshold (protrusions)
};

struct SegmentationResult {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> damage;  // 1 = damaged
    std::vector<std::uint8_t> region;  // 1 = evaluated (valid masked) pixel
    double threshold = 0.0;            // transformed-disparity units
    double otsu_variance = 0.0;
    std::int64_t n_damaged = 0;
    std::int64_t n_undamaged = 0;
    bool degenerate = false;  // histogram had no structure; nothing labeled damaged
    Polarity polarity = Polarity::Below;
};

/// Quantizes the valid masked values of t into 256 bins over [min, max]. A
/// constant map puts all mass into bin 0 with hi = lo + 1. Throws
/// EmptySelection when t has no valid pixel.
Histogram256 build_histogram(const TransformedMap& t);

/// Exhaustive scan of all 256 split candidates for the maximum between-class
/// variance; ties break toward the lower bin. Throws DegenerateHistogram when
/// all mass sits in a single bin (or the histogram holds < 2 samples).
OtsuResult otsu_threshold(const Histogram256& h);

/// Otsu split of the transformed map. Damaged pixels are those strictly below
/// the de-quantized threshold (Polarity::Below) or at/above it
/// (Polarity::Above). A degenerate histogram yields an all-undamaged result
/// with the degenerate flag set.
SegmentationResult segment(const TransformedMap& t, Polarity polarity = Polarity::Below);

/// Removes 4-connected damage components smaller than min_area pixels.
/// min_area = 0 returns the input unchanged.
SegmentationResult clean_mask(const SegmentationResult& s, int min_area);

namespace serial {

Histogram256 build_histogram(const TransformedMap& t);

}  // namespace serial

}  // namespace roadseg
