#pragma once

#include <cstdint>

#include "roadseg/moments.hpp"

namespace roadseg {

// Fitting a linear road disparity model d ~ a0 + a1 * t at roll angle theta,
// where t = -u sin(theta) + v cos(theta), leaves the residual energy
//   E(theta) = sdd - g(theta),
// with g a ratio of two degree-one trigonometric polynomials in 2*theta:
//   g(theta) = (w3 + w4 cos 2t + w5 sin 2t) / (w0 + w1 cos 2t + w2 sin 2t).
// Maximizing g is therefore equivalent to the full nonlinear least-squares
// problem, and the stationary angles have a closed form in tan(theta).

/// Coefficients of the rational objective g.
struct WCoefficients {
    double w0 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 0.0;
    double w4 = 0.0;
    double w5 = 0.0;
};

/// Result of maximizing g over (-pi/2, pi/2].
struct RollSolution {
    double theta = 0.0;
    double g_value = 0.0;
    bool used_fallback = false;
};

/// Fitted road disparity model with diagnostics.
struct RoadModel {
    double theta = 0.0;    // radians, in (-pi/2, pi/2]
    double a0 = 0.0;       // disparity intercept, pixels
    double a1 = 0.0;       // disparity slope per rotated row, pixels/pixel
    double e_min = 0.0;    // residual energy at theta
    double g_value = 0.0;  // explained term, e_min = sdd - g_value
    std::int64_t n_pixels = 0;
    bool used_fallback = false;
};

// Relative threshold shared by all singularity guards.
constexpr double kSingularRelTol = 1e-12;

/// Computes w0..w5 from the masked sums. Throws InsufficientPixels if n < 3.
WCoefficients compute_w(const Moments& m);

/// Evaluates g. Throws SingularDenominator when the denominator is smaller
/// than kSingularRelTol * |w0| in magnitude.
double g_of_theta(const WCoefficients& w, double theta);

/// Analytic derivative dg/dtheta.
double g_derivative(const WCoefficients& w, double theta);

/// Closed-form maximization of g: evaluates the two stationary angles from
/// the tangent substitution and keeps the one with the larger g. Equal values
/// tie-break toward the smaller |theta|. Throws DegenerateObjective when the
/// discriminant is negative or the root formula collapses entirely; callers
/// fall back to fallback_grid_solve.
RollSolution solve_roll_angle(const WCoefficients& w);

/// Safety net for degenerate objectives: argmax of g over 18000 uniform
/// samples of (-pi/2, pi/2] followed by three rounds of local golden-section
/// refinement. Throws SingularDenominator if g is undefined on more than half
/// the grid.
RollSolution fallback_grid_solve(const WCoefficients& w);

/// Solves the 2x2 normal equations at a fixed roll angle and fills the model.
/// Throws SingularNormalMatrix when the rotated ordinates are (numerically)
/// all equal, InsufficientPixels if n < 3.
RoadModel fit_model(const Moments& m, double theta);

/// End-to-end estimation: accumulate -> compute_w -> solve (with grid
/// fallback) -> fit_model.
RoadModel estimate(const DisparityMap& map, const RoadMask& mask);

namespace serial {

/// Same pipeline on the single-threaded reference accumulator.
RoadModel estimate(const DisparityMap& map, const RoadMask& mask);

}  // namespace serial

}  // namespace roadseg
