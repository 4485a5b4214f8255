#pragma once

#include <vector>

#include "roadseg/roll_solver.hpp"

namespace roadseg {

/// Outcome of an iterative maximization of g, with enough bookkeeping to
/// compare against the closed form.
struct IterativeSolveReport {
    double theta = 0.0;
    double g_value = 0.0;
    int iterations = 0;
    int evaluations = 0;  // number of g evaluations
    double elapsed = 0.0; // seconds
};

constexpr double kDefaultBracketDeg = 20.0;   // bracket (-20, +20) degrees
constexpr double kDefaultSolveTol = 1e-6;     // radians
constexpr double kDefaultGdStep = 1e-9;       // initial step on the raw gradient
constexpr int kDefaultGdMaxIter = 1000;

/// Golden-section maximization of g over [lo, hi], terminating when the
/// bracket width drops below tol. The bracket must lie inside (-pi/2, pi/2].
IterativeSolveReport gss_solve(const WCoefficients& w, double lo, double hi, double tol);

/// Gradient ascent on g with backtracking halving; a step that would lower g
/// is halved until it does not, and an uncontested step is grown for the next
/// iteration. Stops when the accepted |dtheta| falls below tol. Throws
/// NonConvergence if max_iter is exhausted while the gradient is still above
/// 1e-6 of its initial magnitude. When g_trace is given, the accepted g value
/// of every iteration is appended to it.
IterativeSolveReport gd_solve(const WCoefficients& w, double theta0, double step, double tol,
                              int max_iter, std::vector<double>* g_trace = nullptr);

}  // namespace roadseg
