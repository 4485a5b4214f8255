#include "roadseg/baselines.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace roadseg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GEval {
    double g = 0.0;
    double dg = 0.0;
};

// g and its derivative from one cos/sin pair.
GEval eval_g(const WCoefficients& w, double theta) {
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double den = w.w0 + w.w1 * c2 + w.w2 * s2;
    if (std::abs(den) < kSingularRelTol * std::abs(w.w0))
        throw SingularDenominator("baseline: singular denominator at theta " + std::to_string(theta));
    GEval e;
    e.g = (w.w3 + w.w4 * c2 + w.w5 * s2) / den;
    const double a = w.w3 * w.w2 - w.w5 * w.w0;
    const double b = w.w4 * w.w0 - w.w3 * w.w1;
    const double c = w.w4 * w.w2 - w.w5 * w.w1;
    e.dg = -2.0 * (c + a * c2 + b * s2) / (den * den);
    return e;
}

}  // namespace

IterativeSolveReport gss_solve(const WCoefficients& w, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw Error("gss_solve: tol must be positive");
    if (!(lo < hi) || lo <= -kPi / 2.0 || hi > kPi / 2.0)
        throw Error("gss_solve: bracket must be a nonempty subinterval of (-pi/2, pi/2]");

    const auto t0 = Clock::now();
    IterativeSolveReport rep;
    auto eval = [&](double t) {
        ++rep.evaluations;
        return g_of_theta(w, t);
    };

    const double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (b - a > tol) {
        ++rep.iterations;
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = eval(x2);
        }
    }
    rep.theta = 0.5 * (a + b);
    rep.g_value = eval(rep.theta);
    rep.elapsed = seconds_since(t0);
    return rep;
}

IterativeSolveReport gd_solve(const WCoefficients& w, double theta0, double step, double tol,
                              int max_iter, std::vector<double>* g_trace) {
    if (!(step > 0.0)) throw Error("gd_solve: step must be positive");
    if (max_iter < 1) throw Error("gd_solve: max_iter must be >= 1");

    const auto t0 = Clock::now();
    constexpr double kMaxStepRad = 0.3;  // trust-region cap on a single move

    IterativeSolveReport rep;
    double theta = theta0;
    GEval cur = eval_g(w, theta);
    ++rep.evaluations;
    if (g_trace) g_trace->push_back(cur.g);
    const double grad0 = std::abs(cur.dg);

    double wstep = step;
    bool converged = false;
    for (int iter = 1; iter <= max_iter; ++iter) {
        rep.iterations = iter;
        double dtheta = wstep * cur.dg;
        if (std::abs(dtheta) > kMaxStepRad) dtheta = std::copysign(kMaxStepRad, dtheta);
        if (std::abs(dtheta) < tol) {
            converged = true;
            break;
        }

        GEval trial = eval_g(w, theta + dtheta);
        ++rep.evaluations;
        int halvings = 0;
        while (trial.g < cur.g && halvings < 60) {
            dtheta *= 0.5;
            wstep *= 0.5;
            trial = eval_g(w, theta + dtheta);
            ++rep.evaluations;
            ++halvings;
        }
        if (trial.g < cur.g) {
            // even the smallest step lowers g: numerically at the optimum
            converged = true;
            break;
        }
        theta += dtheta;
        cur = trial;
        if (g_trace) g_trace->push_back(cur.g);
        if (halvings == 0) wstep *= 1.5;
        if (std::abs(dtheta) < tol) {
            converged = true;
            break;
        }
    }

    if (!converged && std::abs(cur.dg) > 1e-6 * grad0)
        throw NonConvergence("gd_solve: gradient " + std::to_string(cur.dg) + " after " +
                             std::to_string(max_iter) + " iterations (initial " +
                             std::to_string(grad0) + ")");

    rep.theta = normalize_half_pi(theta);
    rep.g_value = cur.g;
    rep.elapsed = seconds_since(t0);
    return rep;
}

}  // namespace roadseg
