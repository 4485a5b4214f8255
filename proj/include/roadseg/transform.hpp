#pragma once

#include "roadseg/roll_solver.hpp"

namespace roadseg {

enum class DeltaPolicy {
    Auto,   // delta = max(0, -min residual): smallest transformed value is 0
    Fixed,  // caller-supplied delta, values clamped at 0 for comparability
};

struct TransformOptions {
    DeltaPolicy policy = DeltaPolicy::Auto;
    double fixed_delta = 0.0;
    // Also transform valid pixels outside the road mask (visualization only;
    // they never enter estimation or statistics).
    bool include_offroad = false;
};

/// Disparity map with the fitted road plane removed: every road pixel of an
/// undamaged surface collapses to the constant delta.
struct TransformedMap {
    DisparityMap map;
    double delta = 0.0;
    RoadModel model;
};

/// Expected road disparity at pixel p: a0 + a1 * (-u sin(theta) + v cos(theta)).
double road_disparity(const RoadModel& model, double u, double v);
double road_disparity(const RoadModel& model, const PixelCoord& p);

/// Subtracts the model from every valid masked pixel and shifts by delta so
/// values stay non-negative. Off-mask and invalid pixels stay invalid unless
/// include_offroad is set.
TransformedMap transform_map(const DisparityMap& map, const RoadMask& mask, const RoadModel& model,
                             const TransformOptions& options = {});

namespace serial {

TransformedMap transform_map(const DisparityMap& map, const RoadMask& mask, const RoadModel& model,
                             const TransformOptions& options = {});

}  // namespace serial

}  // namespace roadseg
