#include <doctest.h>

#include <cmath>

#include "dqw/kernel.hpp"
#include "dqw/lattice.hpp"
#include "test_support.hpp"

using namespace dqw;

TEST_CASE("config validation") {
    CHECK_NOTHROW(LatticeConfig::with_grid(2).validate());
    CHECK_THROWS_AS(LatticeConfig::with_grid(201).validate(), ConfigError);
    CHECK_THROWS_AS(LatticeConfig::with_grid(0).validate(), ConfigError);
    CHECK_THROWS_AS(LatticeConfig::with_grid(-4).validate(), ConfigError);

    const auto config = LatticeConfig::with_grid(200);
    CHECK(config.nodes() == 40000);
    CHECK(config.center() == 99.5);
    CHECK(config.charge_q == 0.9);
    CHECK(config.charge_e == -1.0);
    CHECK(config.mass_mu == 0.0);
}

TEST_CASE("init_uniform") {
    SUBCASE("M = 2") {
        const auto field = init_uniform(LatticeConfig::with_grid(2));
        for (const auto& z : field.left_plane()) CHECK(z.real() == doctest::Approx(0.35355339059327373).epsilon(1e-15));
        for (const auto& z : field.right_plane()) CHECK(z.imag() == 0.0);
        CHECK(norm_squared(field) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("M = 200") {
        const auto field = init_uniform(LatticeConfig::with_grid(200));
        CHECK(std::norm(field.left(17, 3)) == doctest::Approx(1.25e-5).epsilon(1e-13));
        double central = 0.0;
        for (int p : {99, 100})
            for (int q : {99, 100}) central += std::norm(field.left(p, q)) + std::norm(field.right(p, q));
        CHECK(central == doctest::Approx(1e-4).epsilon(1e-12));
    }
    CHECK_THROWS_AS(init_uniform(LatticeConfig::with_grid(7)), ConfigError);
}

TEST_CASE("norm_squared") {
    for (int m : {2, 10, 64}) CHECK(std::abs(norm_squared(init_uniform(LatticeConfig::with_grid(m))) - 1.0) < 1e-14);
    WavefunctionField zero(6);
    CHECK(norm_squared(zero) == 0.0);
    zero.left(2, 3) = 1.0;
    CHECK(norm_squared(zero) == 1.0);
}

TEST_CASE("periodic addressing") {
    WavefunctionField field(10);
    CHECK(field.index(-1, 0) == field.index(9, 0));
    CHECK(field.index(10, 13) == field.index(0, 3));
    CHECK(field.index(-21, -1) == field.index(9, 9));
}

TEST_CASE("M shifts along an axis return a delta to where it started") {
    const int m = 8;
    WavefunctionField delta(m);
    delta.left(3, 5) = {0.6, 0.0};
    delta.right(3, 5) = {0.0, 0.8};
    auto along_p = delta;
    auto along_q = delta;
    for (int k = 0; k < m; ++k) {
        along_p = shift_1(along_p);
        along_q = shift_2(along_q);
    }
    CHECK(along_p == delta);
    CHECK(along_q == delta);
}
