#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "roadseg/errors.hpp"

namespace roadseg {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi/2, pi/2]. The fit objective has period pi, so
/// every roll angle reported by the library lives in this interval.
inline double normalize_half_pi(double theta) {
    while (theta > kPi / 2.0) theta -= kPi;
    while (theta <= -kPi / 2.0) theta += kPi;
    return theta;
}

/// Integer pixel position; u is the column index, v the row index.
struct PixelCoord {
    int u = 0;
    int v = 0;
};

/// Image coordinates after an in-plane rotation. The road model is fit
/// against the rotated ordinate t.
struct RotatedCoord {
    double s = 0.0;
    double t = 0.0;
};

/// Rotates (u, v) about the coordinate origin:
///   s =  u cos(theta) + v sin(theta)
///   t = -u sin(theta) + v cos(theta)
/// Translating the rotation center only shifts the fitted intercept, so the
/// origin is used throughout.
inline RotatedCoord rotate_point(double u, double v, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return RotatedCoord{u * c + v * s, -u * s + v * c};
}

/// Shorthand for the rotated ordinate used by the road disparity model.
inline double rotated_ordinate(double u, double v, double theta) {
    return -u * std::sin(theta) + v * std::cos(theta);
}

/// Dense or sparse disparity map. Invalid pixels carry value 0 and
/// valid = 0; every valid disparity is finite and non-negative.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;         // row-major, disparity in pixels
    std::vector<std::uint8_t> valid;    // row-major, 1 = usable pixel

    DisparityMap() = default;

    DisparityMap(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) throw Error("DisparityMap: width and height must be >= 1");
        values.assign(static_cast<std::size_t>(w) * h, 0.0);
        valid.assign(static_cast<std::size_t>(w) * h, 0);
    }

    std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width + u; }

    double at(int u, int v) const { return values[index(u, v)]; }
    bool is_valid(int u, int v) const { return valid[index(u, v)] != 0; }

    void set(int u, int v, double d) {
        values[index(u, v)] = d;
        valid[index(u, v)] = 1;
    }
    void set_invalid(int u, int v) {
        values[index(u, v)] = 0.0;
        valid[index(u, v)] = 0;
    }

    std::int64_t valid_count() const {
        std::int64_t n = 0;
        for (auto f : valid) n += f;
        return n;
    }
};

/// Binary road region; estimation only ever looks at member && valid pixels.
struct RoadMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> member;   // row-major, 1 = road

    RoadMask() = default;

    RoadMask(int w, int h, bool all_member = false) : width(w), height(h) {
        if (w < 1 || h < 1) throw Error("RoadMask: width and height must be >= 1");
        member.assign(static_cast<std::size_t>(w) * h, all_member ? 1 : 0);
    }

    static RoadMask full(int w, int h) { return RoadMask(w, h, true); }

    std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width + u; }
    bool is_member(int u, int v) const { return member[index(u, v)] != 0; }
    void set(int u, int v, bool m) { member[index(u, v)] = m ? 1 : 0; }

    std::int64_t member_count() const {
        std::int64_t n = 0;
        for (auto f : member) n += f;
        return n;
    }
};

inline void require_same_shape(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb)
        throw DimensionMismatch(std::string(what) + ": shapes differ (" + std::to_string(wa) + "x" +
                                std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                                std::to_string(hb) + ")");
}

/// Stereo rig configuration; only used when generating synthetic maps.
struct RigConfig {
    double focal_length = 0.0;  // pixels
    double baseline = 0.0;      // meters
    double cx = 0.0;            // principal point, pixels
    double cy = 0.0;
    int width = 0;
    int height = 0;
};

}  // namespace roadseg
