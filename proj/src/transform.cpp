#include "roadseg/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roadseg {

double road_disparity(const RoadModel& model, double u, double v) {
    return model.a0 + model.a1 * (-u * std::sin(model.theta) + v * std::cos(model.theta));
}

double road_disparity(const RoadModel& model, const PixelCoord& p) {
    return road_disparity(model, static_cast<double>(p.u), static_cast<double>(p.v));
}

namespace {

// Shared per-pixel arithmetic; both passes and both execution paths must
// compute the residual identically so the minimum shift is exact. The row
// base a0 + a1 v cos(theta) is hoisted out of the inner loop.
struct PlaneTerms {
    double sin_t, cos_t, a0, a1, du;
    explicit PlaneTerms(const RoadModel& m)
        : sin_t(std::sin(m.theta)), cos_t(std::cos(m.theta)), a0(m.a0), a1(m.a1),
          du(-m.a1 * sin_t) {}
    double row_base(int v) const { return a0 + a1 * cos_t * static_cast<double>(v); }
    double residual(double d, double base_v, int u) const {
        return d - (base_v + du * static_cast<double>(u));
    }
};

template <bool Parallel>
TransformedMap transform_impl(const DisparityMap& map, const RoadMask& mask, const RoadModel& model,
                              const TransformOptions& options) {
    require_same_shape(map.width, map.height, mask.width, mask.height, "transform_map");
    const PlaneTerms plane(model);

    double min_res = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : min_res) if (Parallel)
    for (int v = 0; v < map.height; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        const double base_v = plane.row_base(v);
        for (int u = 0; u < map.width; ++u) {
            const std::size_t i = base + u;
            if (!map.valid[i] || !mask.member[i]) continue;
            min_res = std::min(min_res, plane.residual(map.values[i], base_v, u));
        }
    }

    double delta;
    if (options.policy == DeltaPolicy::Auto) {
        delta = std::isfinite(min_res) ? std::max(0.0, -min_res) : 0.0;
    } else {
        delta = options.fixed_delta;
    }
    const bool clamp = options.policy == DeltaPolicy::Fixed;

    TransformedMap out;
    out.delta = delta;
    out.model = model;
    out.map = DisparityMap(map.width, map.height);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < map.height; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * map.width;
        const double base_v = plane.row_base(v);
        for (int u = 0; u < map.width; ++u) {
            const std::size_t i = base + u;
            if (!map.valid[i]) continue;
            if (mask.member[i]) {
                double t = plane.residual(map.values[i], base_v, u) + delta;
                if (clamp) t = std::max(0.0, t);
                out.map.values[i] = t;
                out.map.valid[i] = 1;
            } else if (options.include_offroad) {
                out.map.values[i] = std::max(0.0, plane.residual(map.values[i], base_v, u) + delta);
                out.map.valid[i] = 1;
            }
        }
    }
    return out;
}

}  // namespace

TransformedMap transform_map(const DisparityMap& map, const RoadMask& mask, const RoadModel& model,
                             const TransformOptions& options) {
    return transform_impl<true>(map, mask, model, options);
}

namespace serial {

TransformedMap transform_map(const DisparityMap& map, const RoadMask& mask, const RoadModel& model,
                             const TransformOptions& options) {
    return transform_impl<false>(map, mask, model, options);
}

}  // namespace serial

}  // namespace roadseg
