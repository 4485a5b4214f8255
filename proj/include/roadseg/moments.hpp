#pragma once

#include <cmath>
#include <cstdint>

#include "roadseg/core.hpp"

namespace roadseg {

/// Masked sums over the road pixels. All closed-form fitting formulas are
/// functions of these ten numbers, so one pass over the map is enough.
struct Moments {
    std::int64_t n = 0;  // pixel count
    double su = 0.0;     // sum u
    double sv = 0.0;     // sum v
    double sd = 0.0;     // sum d
    double suu = 0.0;    // sum u*u
    double svv = 0.0;    // sum v*v
    double suv = 0.0;    // sum u*v
    double sdu = 0.0;    // sum d*u
    double sdv = 0.0;    // sum d*v
    double sdd = 0.0;    // sum d*d
};

/// Component-wise sum; accumulating two tiles and merging equals
/// accumulating their union.
Moments merge(const Moments& a, const Moments& b);

/// Sums over all pixels with valid && member set. Rows are accumulated in
/// parallel and merged in row order with compensated addition, so the result
/// does not depend on the thread count.
/// Throws DimensionMismatch on shape mismatch, EmptySelection if no pixel
/// qualifies.
Moments accumulate(const DisparityMap& map, const RoadMask& mask);

/// Adds one sample to a Moments value (plain summation; used for tiny
/// hand-built fixtures and by the serial reference).
void add_sample(Moments& m, double u, double v, double d);

namespace serial {

/// Reference implementation: one compensated pass in row-major order.
Moments accumulate(const DisparityMap& map, const RoadMask& mask);

}  // namespace serial

/// Neumaier-compensated scalar accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace roadseg
