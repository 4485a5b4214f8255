#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "roadseg/roll_solver.hpp"
#include "roadseg/synth.hpp"
#include "roadseg/transform.hpp"

using namespace roadseg;
using testhelp::Sample;

namespace {

std::vector<Sample> three_pixels() { return {{0, 0, 1}, {1, 0, 2}, {0, 1, 3}}; }

Moments moments_of(const std::vector<Sample>& s) { return testhelp::oracle_moments(s); }

SynthSpec small_plane(double theta_deg, double a0, double a1, double kappa, std::uint64_t seed) {
    SynthSpec spec;
    spec.rig.width = 96;
    spec.rig.height = 72;
    spec.rig.focal_length = 700.0;
    spec.rig.baseline = 0.5;
    spec.theta = deg2rad(theta_deg);
    spec.a0 = a0;
    spec.a1 = a1;
    spec.kappa = kappa;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("compute_w matches the hand-evaluated three-pixel case") {
    const WCoefficients w = compute_w(moments_of(three_pixels()));
    CHECK(w.w0 == 2.0);
    CHECK(w.w1 == 0.0);
    CHECK(w.w2 == 1.0);
    CHECK(w.w3 == 25.5);
    CHECK(w.w4 == 1.5);
    CHECK(w.w5 == 12.0);
}

TEST_CASE("compute_w needs at least three pixels") {
    Moments m;
    add_sample(m, 0, 0, 1);
    add_sample(m, 1, 0, 2);
    CHECK_THROWS_AS(compute_w(m), InsufficientPixels);
}

TEST_CASE("compute_w agrees with the extended-precision oracle") {
    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 500; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const WCoefficients ref = testhelp::oracle_w(inst.samples);
        CHECK(testhelp::rel_close(w.w0, ref.w0, 1e-9, 1.0));
        CHECK(testhelp::rel_close(w.w1, ref.w1, 1e-9, std::abs(ref.w0)));
        CHECK(testhelp::rel_close(w.w2, ref.w2, 1e-9, std::abs(ref.w0)));
        CHECK(testhelp::rel_close(w.w3, ref.w3, 1e-9, 1.0));
        CHECK(testhelp::rel_close(w.w4, ref.w4, 1e-9, std::abs(ref.w3)));
        CHECK(testhelp::rel_close(w.w5, ref.w5, 1e-9, std::abs(ref.w3)));
    }
}

TEST_CASE("swapping u and v negates w1 and w4, preserves the rest") {
    std::mt19937_64 rng(302);
    for (int trial = 0; trial < 100; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        std::vector<Sample> swapped = inst.samples;
        for (Sample& s : swapped) std::swap(s.u, s.v);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const WCoefficients ws = compute_w(moments_of(swapped));
        const double scale = std::abs(w.w0) + std::abs(w.w3);
        CHECK(testhelp::rel_close(ws.w0, w.w0, 1e-9, scale));
        CHECK(testhelp::rel_close(ws.w1, -w.w1, 1e-9, scale));
        CHECK(testhelp::rel_close(ws.w2, w.w2, 1e-9, scale));
        CHECK(testhelp::rel_close(ws.w3, w.w3, 1e-9, scale));
        CHECK(testhelp::rel_close(ws.w4, -w.w4, 1e-9, scale));
        CHECK(testhelp::rel_close(ws.w5, w.w5, 1e-9, scale));
    }
}

TEST_CASE("w5 on constant-disparity symmetric coordinates matches the oracle") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> coord(1.0, 40.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Sample> s;
        const double d = 7.5;
        for (int k = 0; k < 12; ++k) {
            const double u = coord(rng), v = coord(rng);
            s.push_back({u, v, d});
            s.push_back({-u, -v, d});  // centered symmetric
        }
        const WCoefficients w = compute_w(moments_of(s));
        const WCoefficients ref = testhelp::oracle_w(s);
        CHECK(testhelp::rel_close(w.w5, ref.w5, 1e-9, std::abs(ref.w3) + 1.0));
    }
}

TEST_CASE("g_of_theta: constant rational, direct substitution, periodicity") {
    const WCoefficients flat{1, 0, 0, 5, 0, 0};
    CHECK(g_of_theta(flat, 0.3) == 5.0);
    CHECK(g_of_theta(flat, -1.2) == 5.0);

    const WCoefficients w = compute_w(moments_of(three_pixels()));
    CHECK(g_of_theta(w, 0.0) == doctest::Approx((w.w3 + w.w4) / (w.w0 + w.w1)));

    std::mt19937_64 rng(304);
    std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
    for (int i = 0; i < 1000; ++i) {
        const double theta = angle(rng);
        CHECK(g_of_theta(w, theta) == doctest::Approx(g_of_theta(w, theta + kPi)).epsilon(1e-12));
    }
}

TEST_CASE("g_of_theta flags a vanishing denominator") {
    const WCoefficients w{1, 1, 0, 3, 1, 1};
    CHECK_THROWS_AS(g_of_theta(w, kPi / 2), SingularDenominator);  // 1 + cos(pi) = 0
}

TEST_CASE("solve_roll_angle recovers noiseless planes") {
    {
        const SynthOutput out = generate(small_plane(0.0, 40.0, -0.2, 0.0, 1));
        const RoadModel model = estimate(out.map, out.mask);
        CHECK(std::abs(model.theta) <= 1e-9);
        CHECK(model.used_fallback == false);
    }
    {
        const SynthOutput out = generate(small_plane(10.0, 40.0, -0.2, 0.0, 2));
        const RoadModel model = estimate(out.map, out.mask);
        CHECK(std::abs(model.theta - deg2rad(10.0)) <= 1e-6);
    }
}

TEST_CASE("solve_roll_angle stays within 0.05 degrees under kappa=50 noise") {
    SynthSpec spec;
    spec.rig = kitti_rig();
    spec.theta = deg2rad(10.0);
    spec.kappa = 50.0;
    spec.seed = 42;
    const SynthOutput out = generate(spec);
    const RoadModel model = estimate(out.map, out.mask);
    CHECK(std::abs(rad2deg(model.theta) - 10.0) <= 0.05);
}

TEST_CASE("fallback grid solve matches the closed form on well-posed instances") {
    std::mt19937_64 rng(305);
    for (int trial = 0; trial < 50; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const RollSolution closed = solve_roll_angle(w);
        const RollSolution grid = fallback_grid_solve(w);
        CHECK(testhelp::periodic_dist_rad(closed.theta, grid.theta) <= 1e-6);
        CHECK(grid.used_fallback);
    }
}

TEST_CASE("fallback grid solve handles a constant objective") {
    const WCoefficients flat{1, 0, 0, 5, 0, 0};
    CHECK_THROWS_AS(solve_roll_angle(flat), DegenerateObjective);
    const RollSolution sol = fallback_grid_solve(flat);
    CHECK(sol.g_value == doctest::Approx(5.0));
    CHECK(sol.theta > -kPi / 2);
    CHECK(sol.theta <= kPi / 2);
}

TEST_CASE("adversarial negative discriminant falls back to the grid argmax") {
    // Poles in the denominator, derivative numerator never vanishing.
    const WCoefficients w{1, 0.8, 0.8, 0, 1, -1};
    const double disc = std::pow(w.w4 * w.w0 - w.w3 * w.w1, 2) +
                        std::pow(w.w3 * w.w2 - w.w5 * w.w0, 2) -
                        std::pow(w.w4 * w.w2 - w.w5 * w.w1, 2);
    REQUIRE(disc < 0.0);
    CHECK_THROWS_AS(solve_roll_angle(w), DegenerateObjective);

    const RollSolution sol = fallback_grid_solve(w);
    // dense-scan oracle: the refined result must not fall below it
    double best = -1e308;
    for (int k = 0; k < 1000000; ++k) {
        const double theta = -kPi / 2 + kPi * (k + 1) / 1000000;
        const double g = testhelp::oracle_g(w, theta);
        if (!std::isnan(g) && g > best) best = g;
    }
    CHECK(sol.g_value >= best * (1.0 - 1e-9) - 1e-12);
    CHECK(sol.theta > -kPi / 2);
    CHECK(sol.theta <= kPi / 2);
}

TEST_CASE("fit_model on exact planes") {
    {
        // d = 3 + 0.5 v at theta = 0
        std::vector<Sample> s;
        for (int v = 0; v < 6; ++v)
            for (int u = 0; u < 8; ++u) s.push_back({(double)u, (double)v, 3.0 + 0.5 * v});
        const RoadModel model = fit_model(moments_of(s), 0.0);
        CHECK(model.a0 == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(model.a1 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(model.e_min <= 1e-9);
    }
    {
        // generated at a0=7, a1=0.2 under 10 degrees of roll
        const SynthOutput out = generate(small_plane(10.0, 7.0, 0.2, 0.0, 3));
        const RoadModel model = estimate(out.map, out.mask);
        CHECK(model.theta == doctest::Approx(deg2rad(10.0)).epsilon(1e-6));
        CHECK(model.a0 == doctest::Approx(7.0).epsilon(1e-6));
        CHECK(model.a1 == doctest::Approx(0.2).epsilon(1e-6));
    }
}

TEST_CASE("fit_model rejects rank-deficient geometry") {
    std::vector<Sample> s;
    for (int u = 0; u < 10; ++u) s.push_back({(double)u, 3.0, 5.0 + 0.1 * u});
    CHECK_THROWS_AS(fit_model(moments_of(s), 0.0), SingularNormalMatrix);  // all t equal
}

TEST_CASE("estimate: e_min vanishes on exact planes") {
    const SynthOutput out = generate(small_plane(0.0, 40.0, -0.2, 0.0, 4));
    const RoadModel model = estimate(out.map, out.mask);
    CHECK(model.e_min <= 1e-9);
    CHECK(model.g_value == doctest::Approx(accumulate(out.map, out.mask).sdd).epsilon(1e-12));
}

TEST_CASE("51-map sweep at kappa=0 recovers every roll angle to 1e-4 degrees") {
    double worst = 0.0;
    for (const SynthSpec& spec : benchmark_suite(0.0)) {
        const SynthOutput out = generate(spec);
        const RoadModel model = estimate(out.map, out.mask);
        worst = std::max(worst, std::abs(rad2deg(model.theta) - rad2deg(spec.theta)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("energy identity: direct residual energy equals sdd - g") {
    std::mt19937_64 rng(306);
    for (int trial = 0; trial < 200; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const Moments m = moments_of(inst.samples);
        const WCoefficients w = compute_w(m);
        const RollSolution sol = solve_roll_angle(w);
        const RoadModel model = fit_model(m, sol.theta);
        const double direct = testhelp::oracle_energy(inst.samples, model);
        CHECK(std::abs(direct - model.e_min) <=
              1e-9 * std::max(direct, model.e_min) + 1e-12 * m.sdd);
    }
}

TEST_CASE("stationarity: the derivative numerator vanishes at the maximizer") {
    std::mt19937_64 rng(307);
    for (int trial = 0; trial < 200; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const RollSolution sol = solve_roll_angle(w);
        const double a = w.w3 * w.w2 - w.w5 * w.w0;
        const double b = w.w4 * w.w0 - w.w3 * w.w1;
        const double c = w.w4 * w.w2 - w.w5 * w.w1;
        const double numerator =
            c + a * std::cos(2 * sol.theta) + b * std::sin(2 * sol.theta);
        const double peak = std::abs(c) + std::hypot(a, b);
        CHECK(std::abs(numerator) <= 1e-6 * peak);
    }
}

TEST_CASE("rotation-center invariance: coordinate offsets only move a0") {
    std::mt19937_64 rng(308);
    std::uniform_real_distribution<double> offset(-300.0, 300.0);
    for (int trial = 0; trial < 200; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const double ou = offset(rng), ov = offset(rng);
        std::vector<Sample> shifted = inst.samples;
        for (Sample& s : shifted) {
            s.u += ou;
            s.v += ov;
        }
        const Moments m1 = moments_of(inst.samples);
        const Moments m2 = moments_of(shifted);
        const RollSolution s1 = solve_roll_angle(compute_w(m1));
        const RollSolution s2 = solve_roll_angle(compute_w(m2));
        CHECK(testhelp::periodic_dist_rad(s1.theta, s2.theta) <= 1e-9);
        const RoadModel f1 = fit_model(m1, s1.theta);
        const RoadModel f2 = fit_model(m2, s2.theta);
        CHECK(std::abs(f1.a1 - f2.a1) <= 1e-9 * (std::abs(f1.a1) + 1.0));
    }
}

TEST_CASE("root algebra: tan(theta) solves the stationarity quadratic") {
    std::mt19937_64 rng(309);
    for (int trial = 0; trial < 200; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const double a = w.w3 * w.w2 - w.w5 * w.w0;
        const double b = w.w4 * w.w0 - w.w3 * w.w1;
        const double c = w.w4 * w.w2 - w.w5 * w.w1;
        const double disc = b * b + a * a - c * c;
        const double denom = a - c;
        if (disc < 0 || std::abs(denom) < 1e-9 * (std::abs(a) + std::abs(c))) continue;
        const RollSolution sol = solve_roll_angle(w);
        const double t = std::tan(sol.theta);
        const double r1 = (b + std::sqrt(disc)) / denom;
        const double r2 = (b - std::sqrt(disc)) / denom;
        const double err = std::min(std::abs(t - r1) / (1.0 + std::abs(r1)),
                                    std::abs(t - r2) / (1.0 + std::abs(r2)));
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("inputs rotated by pi/2 normalize back into the interval") {
    const double theta = deg2rad(5.0);
    SynthSpec spec = small_plane(0.0, 40.0, -0.2, 0.0, 7);
    spec.theta = theta + kPi / 2;  // generator accepts the full circle
    const SynthOutput out = generate(spec);
    const RoadModel model = estimate(out.map, out.mask);
    CHECK(model.theta > -kPi / 2);
    CHECK(model.theta <= kPi / 2);
    CHECK(model.theta == doctest::Approx(normalize_half_pi(theta + kPi / 2)).epsilon(1e-6));
    // the fitted surface reproduces the generated disparities
    for (int v = 0; v < out.map.height; v += 7)
        for (int u = 0; u < out.map.width; u += 11)
            CHECK(road_disparity(model, u, v) == doctest::Approx(out.map.at(u, v)).epsilon(1e-6));
}

TEST_CASE("closed form matches the dense-grid oracle") {
    std::mt19937_64 rng(310);
    for (int trial = 0; trial < 50; ++trial) {
        const testhelp::RandomInstance inst = testhelp::random_instance(rng);
        const WCoefficients w = compute_w(moments_of(inst.samples));
        const RollSolution sol = solve_roll_angle(w);
        const double ref = testhelp::oracle_grid_argmax(w);
        CHECK(testhelp::periodic_dist_rad(sol.theta, ref) <= 1e-5);
    }
}
