#include "roadseg/roll_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace roadseg {

WCoefficients compute_w(const Moments& m) {
    if (m.n < 3)
        throw InsufficientPixels("compute_w: need at least 3 pixels, got " + std::to_string(m.n));
    const double n = static_cast<double>(m.n);
    WCoefficients w;
    w.w0 = 0.5 * (n * (m.svv + m.suu) - m.sv * m.sv - m.su * m.su);
    w.w1 = 0.5 * (n * (m.svv - m.suu) - m.sv * m.sv + m.su * m.su);
    w.w2 = m.sv * m.su - n * m.suv;
    w.w3 = 0.5 * (m.sd * m.sd * (m.svv + m.suu) + n * (m.sdv * m.sdv + m.sdu * m.sdu)) -
           m.sd * (m.sv * m.sdv + m.su * m.sdu);
    w.w4 = 0.5 * (m.sd * m.sd * (m.svv - m.suu) + n * (m.sdv * m.sdv - m.sdu * m.sdu)) -
           m.sd * (m.sv * m.sdv - m.su * m.sdu);
    w.w5 = m.sd * (m.sv * m.sdu + m.su * m.sdv) - m.sd * m.sd * m.suv - n * m.sdv * m.sdu;
    return w;
}

double g_of_theta(const WCoefficients& w, double theta) {
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double den = w.w0 + w.w1 * c2 + w.w2 * s2;
    if (std::abs(den) < kSingularRelTol * std::abs(w.w0))
        throw SingularDenominator("g_of_theta: denominator " + std::to_string(den) +
                                  " is singular relative to w0 " + std::to_string(w.w0));
    return (w.w3 + w.w4 * c2 + w.w5 * s2) / den;
}

double g_derivative(const WCoefficients& w, double theta) {
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double den = w.w0 + w.w1 * c2 + w.w2 * s2;
    if (std::abs(den) < kSingularRelTol * std::abs(w.w0))
        throw SingularDenominator("g_derivative: singular denominator");
    const double a = w.w3 * w.w2 - w.w5 * w.w0;  // cos coefficient
    const double b = w.w4 * w.w0 - w.w3 * w.w1;  // sin coefficient
    const double c = w.w4 * w.w2 - w.w5 * w.w1;  // constant
    return -2.0 * (c + a * c2 + b * s2) / (den * den);
}

namespace {

struct Candidate {
    double theta = 0.0;
    double g = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

Candidate evaluate_candidate(const WCoefficients& w, double theta) {
    Candidate c;
    c.theta = normalize_half_pi(theta);
    try {
        c.g = g_of_theta(w, c.theta);
        c.ok = std::isfinite(c.g);
    } catch (const SingularDenominator&) {
        c.ok = false;
    }
    return c;
}

}  // namespace

RollSolution solve_roll_angle(const WCoefficients& w) {
    if (!(std::isfinite(w.w0) && std::isfinite(w.w1) && std::isfinite(w.w2) &&
          std::isfinite(w.w3) && std::isfinite(w.w4) && std::isfinite(w.w5)) ||
        !(w.w0 > 0.0))
        throw DegenerateObjective("solve_roll_angle: coefficients not finite or w0 <= 0");

    const double a = w.w3 * w.w2 - w.w5 * w.w0;
    const double b = w.w4 * w.w0 - w.w3 * w.w1;
    const double c = w.w4 * w.w2 - w.w5 * w.w1;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});

    if (scale == 0.0)
        throw DegenerateObjective("solve_roll_angle: derivative vanishes identically");

    const double disc = b * b + a * a - c * c;
    if (disc < 0.0)
        throw DegenerateObjective("solve_roll_angle: negative discriminant " + std::to_string(disc));

    const double root = std::sqrt(disc);
    const double denom = a - c;  // shared arctan denominator

    Candidate c1, c2;
    if (std::abs(denom) > kSingularRelTol * scale) {
        c1 = evaluate_candidate(w, std::atan((b + root) / denom));
        c2 = evaluate_candidate(w, std::atan((b - root) / denom));
    } else {
        // The quadratic in tan(theta) degenerates to 2*b*t + (c + a) = 0; the
        // interval boundary pi/2 is the other stationary point.
        if (std::abs(b) <= kSingularRelTol * scale)
            throw DegenerateObjective("solve_roll_angle: arctan denominator and linear term vanish");
        c1 = evaluate_candidate(w, std::atan(-(c + a) / (2.0 * b)));
        c2 = evaluate_candidate(w, kPi / 2.0);
    }

    if (!c1.ok && !c2.ok)
        throw DegenerateObjective("solve_roll_angle: g singular at both stationary angles");

    Candidate best;
    if (!c2.ok)
        best = c1;
    else if (!c1.ok)
        best = c2;
    else if (c1.g > c2.g)
        best = c1;
    else if (c2.g > c1.g)
        best = c2;
    else
        best = (std::abs(c1.theta) <= std::abs(c2.theta)) ? c1 : c2;

    return RollSolution{best.theta, best.g, false};
}

namespace {

// One golden-section pass shrinking [lo, hi] by the given factor while
// maximizing g; returns the midpoint.
void golden_shrink(const WCoefficients& w, double& lo, double& hi, double shrink) {
    const double invphi = 0.6180339887498949;
    const double target = (hi - lo) * shrink;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    auto eval = [&](double t) {
        try {
            return g_of_theta(w, t);
        } catch (const SingularDenominator&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (hi - lo > target) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = eval(x2);
        }
    }
}

}  // namespace

RollSolution fallback_grid_solve(const WCoefficients& w) {
    constexpr int kGridSamples = 18000;
    const double step = kPi / kGridSamples;

    double best_theta = 0.0;
    double best_g = -std::numeric_limits<double>::infinity();
    int singular = 0;
    for (int k = 0; k < kGridSamples; ++k) {
        const double theta = -kPi / 2.0 + step * (k + 1);  // last sample is pi/2
        double g;
        try {
            g = g_of_theta(w, theta);
        } catch (const SingularDenominator&) {
            ++singular;
            continue;
        }
        if (g > best_g) {
            best_g = g;
            best_theta = theta;
        }
    }
    if (singular > kGridSamples / 2)
        throw SingularDenominator("fallback_grid_solve: g undefined on " + std::to_string(singular) +
                                  " of " + std::to_string(kGridSamples) + " samples");

    // g is pi-periodic, so the bracket may spill past the interval ends.
    double lo = best_theta - step;
    double hi = best_theta + step;
    for (int round = 0; round < 3; ++round) golden_shrink(w, lo, hi, 1e-2);

    const double theta = normalize_half_pi(0.5 * (lo + hi));
    double g = best_g;
    try {
        g = g_of_theta(w, theta);
    } catch (const SingularDenominator&) {
        // keep the grid value; the refined midpoint sits on a pole
    }
    if (g < best_g) {
        return RollSolution{normalize_half_pi(best_theta), best_g, true};
    }
    return RollSolution{theta, g, true};
}

RoadModel fit_model(const Moments& m, double theta) {
    if (m.n < 3)
        throw InsufficientPixels("fit_model: need at least 3 pixels, got " + std::to_string(m.n));
    const double th = normalize_half_pi(theta);
    const double n = static_cast<double>(m.n);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double c2 = std::cos(2.0 * th);
    const double s2 = std::sin(2.0 * th);

    const double r0 = m.sv * c - m.su * s;
    const double r1 = 0.5 * (m.svv + m.suu) + 0.5 * (m.svv - m.suu) * c2 - m.suv * s2;
    const double p = m.sdv * c - m.sdu * s;

    const double det = n * r1 - r0 * r0;
    if (!(det > kSingularRelTol * n * r1))
        throw SingularNormalMatrix("fit_model: normal matrix determinant " + std::to_string(det) +
                                   " is singular (n*r1 = " + std::to_string(n * r1) + ")");

    RoadModel model;
    model.theta = th;
    model.a0 = (r1 * m.sd - r0 * p) / det;
    model.a1 = (n * p - r0 * m.sd) / det;
    model.g_value = (r1 * m.sd * m.sd - 2.0 * r0 * m.sd * p + n * p * p) / det;
    model.e_min = std::max(0.0, m.sdd - model.g_value);
    model.n_pixels = m.n;
    return model;
}

namespace {

RoadModel estimate_from_moments(const Moments& m) {
    const WCoefficients w = compute_w(m);
    RollSolution sol;
    try {
        sol = solve_roll_angle(w);
    } catch (const DegenerateObjective&) {
        sol = fallback_grid_solve(w);
    }
    RoadModel model = fit_model(m, sol.theta);
    model.used_fallback = sol.used_fallback;
    return model;
}

}  // namespace

RoadModel estimate(const DisparityMap& map, const RoadMask& mask) {
    return estimate_from_moments(accumulate(map, mask));
}

namespace serial {

RoadModel estimate(const DisparityMap& map, const RoadMask& mask) {
    return estimate_from_moments(serial::accumulate(map, mask));
}

}  // namespace serial

}  // namespace roadseg
