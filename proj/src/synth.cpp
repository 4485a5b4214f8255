#include "roadseg/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace roadseg {

RigConfig kitti_rig() {
    RigConfig rig;
    rig.focal_length = 721.5377;
    rig.baseline = 0.54;
    rig.cx = 609.5593;
    rig.cy = 172.854;
    rig.width = 1242;
    rig.height = 375;
    return rig;
}

namespace {

// Flat-bottomed bowl: full depth inside kCoreFraction of the ellipse radius,
// cosine-squared taper to zero at the boundary.
constexpr double kCoreFraction = 0.8;

double pothole_depression(const Pothole& ph, double u, double v) {
    const double du = (u - ph.cu) / ph.ru;
    const double dv = (v - ph.cv) / ph.rv;
    const double rho2 = du * du + dv * dv;
    if (rho2 > 1.0) return 0.0;
    const double rho = std::sqrt(rho2);
    if (rho <= kCoreFraction) return ph.depth;
    const double x = (rho - kCoreFraction) / (1.0 - kCoreFraction);
    const double c = std::cos(0.5 * kPi * x);
    return ph.depth * c * c;
}

double to_unit_pm1(std::uint64_t r) {
    // [-1, 1) from the top 53 bits
    return static_cast<double>(r >> 11) * (1.0 / 4503599627370496.0) - 1.0;
}

double noise_at(const SynthSpec& spec, std::uint64_t base, std::uint64_t idx) {
    if (spec.kappa == 0.0) return 0.0;
    const std::uint64_t h = base + idx * 0x9e3779b97f4a7c15ULL;
    if (spec.noise == NoiseKind::Uniform) return spec.kappa * to_unit_pm1(splitmix64(h));

    // Truncated Gaussian: Box-Muller with rejection beyond 3 sigma.
    for (std::uint64_t j = 0;; j += 2) {
        const std::uint64_t r1 = splitmix64(h + (j + 1) * 0xbf58476d1ce4e5b9ULL);
        const std::uint64_t r2 = splitmix64(h + (j + 2) * 0xbf58476d1ce4e5b9ULL);
        const double u1 = (static_cast<double>(r1 >> 11) + 1.0) * (1.0 / 9007199254740992.0);
        const double u2 = static_cast<double>(r2 >> 11) * (1.0 / 9007199254740992.0);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        if (std::abs(z) <= 3.0) return spec.kappa / 3.0 * z;
    }
}

void validate(const SynthSpec& spec) {
    if (spec.rig.width < 1 || spec.rig.height < 1)
        throw InvalidSpec("generate: image size must be at least 1x1");
    if (!(spec.rig.focal_length > 0.0) || !(spec.rig.baseline > 0.0))
        throw InvalidSpec("generate: focal length and baseline must be positive");
    if (!(spec.kappa >= 0.0)) throw InvalidSpec("generate: kappa must be >= 0");
    if (!std::isfinite(spec.theta) || std::abs(spec.theta) > kPi)
        throw InvalidSpec("generate: theta must be finite and within [-pi, pi]");
    if (!std::isfinite(spec.a0) || !std::isfinite(spec.a1))
        throw InvalidSpec("generate: plane coefficients must be finite");
    for (const Pothole& ph : spec.potholes) {
        if (!(ph.depth > 0.0)) throw InvalidSpec("generate: pothole depth must be > 0");
        if (!(ph.ru >= 1.0) || !(ph.rv >= 1.0))
            throw InvalidSpec("generate: pothole semi-axes must be >= 1 pixel");
    }
}

template <bool Parallel>
SynthOutput generate_impl(const SynthSpec& spec) {
    validate(spec);
    const int w = spec.rig.width;
    const int h = spec.rig.height;

    SynthOutput out;
    out.map = DisparityMap(w, h);
    out.mask = RoadMask::full(w, h);
    out.truth.theta = normalize_half_pi(spec.theta);
    out.truth.a0 = spec.a0;
    out.truth.a1 = spec.a1;
    out.truth.damage = RoadMask(w, h);

    const double sin_t = std::sin(spec.theta);
    const double cos_t = std::cos(spec.theta);
    const std::uint64_t noise_base = splitmix64(spec.seed);

#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < h; ++v) {
        const std::size_t base = static_cast<std::size_t>(v) * w;
        for (int u = 0; u < w; ++u) {
            const std::size_t i = base + u;
            const double t = -u * sin_t + v * cos_t;
            double d = spec.a0 + spec.a1 * t;
            for (const Pothole& ph : spec.potholes) {
                const double dep = pothole_depression(ph, u, v);
                if (dep > 0.0) d -= dep;
                const double du = (u - ph.cu) / ph.ru;
                const double dv = (v - ph.cv) / ph.rv;
                if (du * du + dv * dv <= 1.0) out.truth.damage.member[i] = 1;
            }
            d += noise_at(spec, noise_base, static_cast<std::uint64_t>(i));
            out.map.values[i] = d < 0.0 ? 0.0 : d;
            out.map.valid[i] = 1;
        }
    }
    return out;
}

}  // namespace

SynthOutput generate(const SynthSpec& spec) { return generate_impl<true>(spec); }

namespace serial {
SynthOutput generate(const SynthSpec& spec) { return generate_impl<false>(spec); }
}  // namespace serial

std::vector<SynthSpec> benchmark_suite(double kappa, std::uint64_t base_seed) {
    std::vector<SynthSpec> suite;
    suite.reserve(51);
    for (int k = 0; k < 51; ++k) {
        SynthSpec spec;
        spec.rig = kitti_rig();
        spec.theta = deg2rad((k - 25) * 0.4);
        spec.kappa = kappa;
        spec.seed = base_seed + static_cast<std::uint64_t>(k);
        suite.push_back(spec);
    }
    return suite;
}

void write_spec(const SynthSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_spec: cannot open " + path);
    out.precision(17);
    out << "width = " << spec.rig.width << "\n";
    out << "height = " << spec.rig.height << "\n";
    out << "focal_length = " << spec.rig.focal_length << "\n";
    out << "baseline = " << spec.rig.baseline << "\n";
    out << "cx = " << spec.rig.cx << "\n";
    out << "cy = " << spec.rig.cy << "\n";
    out << "theta_deg = " << rad2deg(spec.theta) << "\n";
    out << "a0 = " << spec.a0 << "\n";
    out << "a1 = " << spec.a1 << "\n";
    out << "kappa = " << spec.kappa << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "noise = " << (spec.noise == NoiseKind::Uniform ? "uniform" : "gaussian") << "\n";
    for (const Pothole& ph : spec.potholes)
        out << "pothole = " << ph.cu << " " << ph.cv << " " << ph.ru << " " << ph.rv << " "
            << ph.depth << "\n";
    if (!out) throw IoError("write_spec: write failed for " + path);
}

SynthSpec read_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_spec: cannot open " + path);

    SynthSpec spec;
    spec.rig = kitti_rig();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError("read_spec: malformed line " + std::to_string(lineno));
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::istringstream vs(value);
        auto num = [&](double& target) {
            if (!(vs >> target)) throw ParseError("read_spec: bad number for " + key);
        };
        if (key == "width") {
            double x;
            num(x);
            spec.rig.width = static_cast<int>(x);
        } else if (key == "height") {
            double x;
            num(x);
            spec.rig.height = static_cast<int>(x);
        } else if (key == "focal_length") {
            num(spec.rig.focal_length);
        } else if (key == "baseline") {
            num(spec.rig.baseline);
        } else if (key == "cx") {
            num(spec.rig.cx);
        } else if (key == "cy") {
            num(spec.rig.cy);
        } else if (key == "theta_deg") {
            double deg;
            num(deg);
            spec.theta = deg2rad(deg);
        } else if (key == "a0") {
            num(spec.a0);
        } else if (key == "a1") {
            num(spec.a1);
        } else if (key == "kappa") {
            num(spec.kappa);
        } else if (key == "seed") {
            std::uint64_t s;
            if (!(vs >> s)) throw ParseError("read_spec: bad seed");
            spec.seed = s;
        } else if (key == "noise") {
            if (value == "uniform")
                spec.noise = NoiseKind::Uniform;
            else if (value == "gaussian")
                spec.noise = NoiseKind::Gaussian;
            else
                throw ParseError("read_spec: unknown noise kind '" + value + "'");
        } else if (key == "pothole") {
            Pothole ph;
            if (!(vs >> ph.cu >> ph.cv >> ph.ru >> ph.rv >> ph.depth))
                throw ParseError("read_spec: pothole needs 5 numbers, line " + std::to_string(lineno));
            spec.potholes.push_back(ph);
        } else {
            throw ParseError("read_spec: unknown key '" + key + "'");
        }
    }
    return spec;
}

}  // namespace roadseg
