#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadseg/core.hpp"

namespace roadseg {

enum class NoiseKind {
    Uniform,   // kappa * omega with omega uniform on [-1, +1]
    Gaussian,  // sigma = kappa / 3, truncated at +-kappa
};

struct Pothole {
    double cu = 0.0;     // center, pixels
    double cv = 0.0;
    double ru = 1.0;     // semi-axes, pixels
    double rv = 1.0;
    double depth = 1.0;  // peak depression, disparity pixels
};

RigConfig kitti_rig();

/// Recipe for one synthetic rolled-plane disparity map.
struct SynthSpec {
    RigConfig rig = kitti_rig();
    double theta = 0.0;   // radians
    double a0 = 410.0;    // plane intercept, pixels
    double a1 = -0.6;     // plane slope per rotated row, pixels/pixel
    double kappa = 0.0;   // noise scale, pixels
    std::uint64_t seed = 0;
    NoiseKind noise = NoiseKind::Uniform;
    std::vector<Pothole> potholes;
};

struct GroundTruth {
    double theta = 0.0;
    double a0 = 0.0;
    double a1 = 0.0;
    RoadMask damage;
};

struct SynthOutput {
    DisparityMap map;
    RoadMask mask;  // full image
    GroundTruth truth;
};

/// Builds the map D(p) = a0 + a1 * t(theta, p) - potholes + kappa * omega,
/// clamped at 0. Noise is a pure function of (seed, pixel index), so the same
/// spec always produces a bit-identical map. Throws InvalidSpec on
/// out-of-range fields.
SynthOutput generate(const SynthSpec& spec);

namespace serial {

SynthOutput generate(const SynthSpec& spec);

}  // namespace serial

/// The 51-map roll-angle benchmark: theta from -10 to +10 degrees in 0.4
/// degree steps at 1242x375 with the fixed default plane.
std::vector<SynthSpec> benchmark_suite(double kappa = 0.0, std::uint64_t base_seed = 1729);

/// Plain-text key = value serialization (potholes as repeated
/// "pothole = cu cv ru rv depth" lines).
void write_spec(const SynthSpec& spec, const std::string& path);
SynthSpec read_spec(const std::string& path);

/// Counter-based generator behind the synthetic noise.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace roadseg
