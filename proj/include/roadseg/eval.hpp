#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadseg/baselines.hpp"
#include "roadseg/segmentation.hpp"
#include "roadseg/transform.hpp"

namespace roadseg {

/// Population standard deviation of the valid transformed disparities.
struct SigmaReport {
    double sigma = 0.0;
    std::int64_t m = 0;
};

SigmaReport sigma(const TransformedMap& t);

namespace serial {
SigmaReport sigma(const TransformedMap& t);
}  // namespace serial

/// Pixel-level confusion counts and derived ratios, restricted to a domain
/// mask. A ratio with zero denominator reports 1 when its error count is also
/// zero, else 0.
struct PixelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double iou = 0.0;
    double accuracy = 0.0;
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

PixelMetrics pixel_metrics(const RoadMask& pred, const RoadMask& truth, const RoadMask& domain);

/// Ratios from raw counts (shared by pixel_metrics and the property tests).
PixelMetrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn);

/// |estimated - actual| in degrees under the pi-periodic angle distance.
double delta_theta(double estimated_rad, double actual_rad);

/// Per-row disparity histogram; planar roads project to a line in it.
struct VDisparity {
    int rows = 0;
    int bins = 0;
    double lo = 0.0;  // disparity range mapped onto the bins
    double hi = 1.0;
    std::vector<std::uint32_t> counts;  // rows x bins, row-major

    std::uint32_t at(int row, int bin) const { return counts[static_cast<std::size_t>(row) * bins + bin]; }
};

VDisparity v_disparity(const DisparityMap& map, const RoadMask& mask, int bins);

/// One row of the method comparison table. elapsed is the median wall-clock
/// seconds of the model-solve stage (w coefficients -> angle -> fit) given the
/// accumulated moments; accumulate_seconds reports the shared single-pass
/// accumulation cost once.
struct BenchRow {
    std::string method;  // "closed-form", "gd" or "gss"
    double sigma = 0.0;
    double elapsed = 0.0;
    double theta = 0.0;
    int evaluations = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double accumulate_seconds = 0.0;
    std::int64_t n_pixels = 0;
};

/// Runs the closed-form solver and both iterative baselines on the same map,
/// single-threaded, and reports sigma of the transformed map plus median
/// solve times over `repeats` samples (one warm-up excluded).
BenchReport bench(const DisparityMap& map, const RoadMask& mask, int repeats);

/// CSV / aligned-text emission for metric tables.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

}  // namespace roadseg
