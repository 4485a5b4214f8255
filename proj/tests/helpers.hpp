// Test-side oracles, independent of the library implementation paths they
// check: long-double reference sums, a direct evaluation of the rational
// objective, and a dense-grid argmax.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "roadseg/core.hpp"
#include "roadseg/moments.hpp"
#include "roadseg/roll_solver.hpp"

namespace testhelp {

struct Sample {
    double u, v, d;
};

// Reference accumulation in extended precision, any traversal order.
inline roadseg::Moments oracle_moments(const std::vector<Sample>& samples) {
    long double su = 0, sv = 0, sd = 0, suu = 0, svv = 0, suv = 0, sdu = 0, sdv = 0, sdd = 0;
    for (const Sample& s : samples) {
        su += s.u;
        sv += s.v;
        sd += s.d;
        suu += (long double)s.u * s.u;
        svv += (long double)s.v * s.v;
        suv += (long double)s.u * s.v;
        sdu += (long double)s.d * s.u;
        sdv += (long double)s.d * s.v;
        sdd += (long double)s.d * s.d;
    }
    roadseg::Moments m;
    m.n = static_cast<std::int64_t>(samples.size());
    m.su = (double)su;
    m.sv = (double)sv;
    m.sd = (double)sd;
    m.suu = (double)suu;
    m.svv = (double)svv;
    m.suv = (double)suv;
    m.sdu = (double)sdu;
    m.sdv = (double)sdv;
    m.sdd = (double)sdd;
    return m;
}

inline std::vector<Sample> masked_samples(const roadseg::DisparityMap& map,
                                          const roadseg::RoadMask& mask) {
    std::vector<Sample> out;
    for (int v = 0; v < map.height; ++v)
        for (int u = 0; u < map.width; ++u)
            if (map.is_valid(u, v) && mask.is_member(u, v))
                out.push_back({(double)u, (double)v, map.at(u, v)});
    return out;
}

// w coefficients recomputed from the printed sums in extended precision.
inline roadseg::WCoefficients oracle_w(const std::vector<Sample>& samples) {
    const roadseg::Moments m = oracle_moments(samples);
    const long double n = (long double)m.n;
    long double su = m.su, sv = m.sv, sd = m.sd, suu = m.suu, svv = m.svv, suv = m.suv,
                sdu = m.sdu, sdv = m.sdv;
    roadseg::WCoefficients w;
    w.w0 = (double)(0.5L * (n * (svv + suu) - sv * sv - su * su));
    w.w1 = (double)(0.5L * (n * (svv - suu) - sv * sv + su * su));
    w.w2 = (double)(sv * su - n * suv);
    w.w3 = (double)(0.5L * (sd * sd * (svv + suu) + n * (sdv * sdv + sdu * sdu)) -
                    sd * (sv * sdv + su * sdu));
    w.w4 = (double)(0.5L * (sd * sd * (svv - suu) + n * (sdv * sdv - sdu * sdu)) -
                    sd * (sv * sdv - su * sdu));
    w.w5 = (double)(sd * (sv * sdu + su * sdv) - sd * sd * suv - n * sdv * sdu);
    return w;
}

// Direct evaluation of the rational objective; NaN on a vanishing denominator.
inline double oracle_g(const roadseg::WCoefficients& w, double theta) {
    const long double c2 = std::cos(2.0L * (long double)theta);
    const long double s2 = std::sin(2.0L * (long double)theta);
    const long double den = (long double)w.w0 + w.w1 * c2 + w.w2 * s2;
    if (std::abs((double)den) < 1e-12 * std::abs(w.w0)) return std::nan("");
    return (double)(((long double)w.w3 + w.w4 * c2 + w.w5 * s2) / den);
}

// Dense-grid argmax with golden-section refinement; the independent check of
// the closed-form maximizer.
inline double oracle_grid_argmax(const roadseg::WCoefficients& w, int samples = 18000) {
    const double pi = roadseg::kPi;
    double best_theta = 0, best_g = -1e308;
    for (int k = 0; k < samples; ++k) {
        const double theta = -pi / 2 + pi * (k + 1) / samples;
        const double g = oracle_g(w, theta);
        if (std::isnan(g)) continue;
        if (g > best_g) {
            best_g = g;
            best_theta = theta;
        }
    }
    double lo = best_theta - pi / samples, hi = best_theta + pi / samples;
    const double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = oracle_g(w, x1), f2 = oracle_g(w, x2);
    for (int it = 0; it < 120 && hi - lo > 1e-12; ++it) {
        if (!(f1 < f2)) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = oracle_g(w, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = oracle_g(w, x2);
        }
    }
    return roadseg::normalize_half_pi(0.5 * (lo + hi));
}

// Residual energy computed pixel by pixel against the fitted model.
inline double oracle_energy(const std::vector<Sample>& samples, const roadseg::RoadModel& model) {
    const long double sin_t = std::sin((long double)model.theta);
    const long double cos_t = std::cos((long double)model.theta);
    long double e = 0;
    for (const Sample& s : samples) {
        const long double t = -(long double)s.u * sin_t + (long double)s.v * cos_t;
        const long double r = (long double)s.d - ((long double)model.a0 + (long double)model.a1 * t);
        e += r * r;
    }
    return (double)e;
}

inline double periodic_dist_rad(double a, double b) {
    double diff = std::fmod(std::abs(a - b), roadseg::kPi);
    return std::min(diff, roadseg::kPi - diff);
}

inline bool rel_close(double a, double b, double tol, double floor = 0.0) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

// Random planar point clouds whose objective has a well-separated maximum.
struct RandomInstance {
    std::vector<Sample> samples;
    double theta, a0, a1;
};

inline RandomInstance random_instance(std::mt19937_64& rng, bool force_nonzero_theta = false) {
    std::uniform_real_distribution<double> theta_dist(-1.2, 1.2);
    std::uniform_real_distribution<double> a0_dist(20.0, 200.0);
    std::uniform_real_distribution<double> a1_dist(0.05, 0.8);
    std::uniform_int_distribution<int> w_dist(24, 96);
    std::uniform_int_distribution<int> h_dist(18, 72);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::uniform_int_distribution<int> sign(0, 1);

    RandomInstance inst;
    inst.theta = theta_dist(rng);
    if (force_nonzero_theta && std::abs(inst.theta) < 0.05)
        inst.theta += inst.theta >= 0 ? 0.1 : -0.1;
    inst.a0 = a0_dist(rng);
    inst.a1 = a1_dist(rng) * (sign(rng) ? 1.0 : -1.0);
    const int w = w_dist(rng), h = h_dist(rng);
    const double kappa = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const double sin_t = std::sin(inst.theta), cos_t = std::cos(inst.theta);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) {
            const double t = -u * sin_t + v * cos_t;
            inst.samples.push_back({(double)u, (double)v, inst.a0 + inst.a1 * t + kappa * noise(rng)});
        }
    return inst;
}

}  // namespace testhelp
