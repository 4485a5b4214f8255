#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "roadseg/core.hpp"

using namespace roadseg;

TEST_CASE("rotate_point identity and axis cases") {
    const RotatedCoord r0 = rotate_point(3, 7, 0.0);
    CHECK(r0.s == 3.0);
    CHECK(r0.t == 7.0);

    const RotatedCoord r1 = rotate_point(1, 0, kPi / 2);
    CHECK(r1.s == doctest::Approx(0.0).epsilon(0).scale(1e-12));
    CHECK(r1.t == doctest::Approx(-1.0));

    const RotatedCoord r2 = rotate_point(2, 2, kPi / 4);
    CHECK(r2.s == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r2.t == doctest::Approx(0.0).epsilon(0).scale(1e-12));
}

TEST_CASE("rotate_point preserves the Euclidean norm") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> coord(-2000.0, 2000.0);
    std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
    for (int i = 0; i < 1000; ++i) {
        const double u = coord(rng), v = coord(rng), theta = angle(rng);
        const RotatedCoord r = rotate_point(u, v, theta);
        const double before = u * u + v * v;
        const double after = r.s * r.s + r.t * r.t;
        CHECK(std::abs(after - before) <= 1e-12 * (before + 1.0));
    }
}

TEST_CASE("rotate_point composed with its inverse is the identity") {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> coord(-1500.0, 1500.0);
    std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
    for (int i = 0; i < 1000; ++i) {
        const double u = coord(rng), v = coord(rng), theta = angle(rng);
        const RotatedCoord r = rotate_point(u, v, theta);
        const RotatedCoord back = rotate_point(r.s, r.t, -theta);
        CHECK(std::abs(back.s - u) <= 1e-12 * (std::abs(u) + 1.0) + 1e-12);
        CHECK(std::abs(back.t - v) <= 1e-12 * (std::abs(v) + 1.0) + 1e-12);
    }
}

TEST_CASE("normalize_half_pi lands in (-pi/2, pi/2]") {
    CHECK(normalize_half_pi(kPi) == doctest::Approx(0.0).scale(1.0));
    CHECK(normalize_half_pi(kPi / 2) == kPi / 2);
    CHECK(normalize_half_pi(-kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(normalize_half_pi(0.3 + kPi) == doctest::Approx(0.3));
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = normalize_half_pi(angle(rng));
        CHECK(t > -kPi / 2);
        CHECK(t <= kPi / 2);
    }
}

TEST_CASE("DisparityMap rejects degenerate shapes and tracks validity") {
    CHECK_THROWS_AS(DisparityMap(0, 4), Error);
    DisparityMap map(3, 2);
    CHECK(map.valid_count() == 0);
    map.set(1, 1, 2.5);
    CHECK(map.valid_count() == 1);
    CHECK(map.at(1, 1) == 2.5);
    map.set_invalid(1, 1);
    CHECK(map.valid_count() == 0);
}
