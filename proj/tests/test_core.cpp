#include <cmath>
#include <limits>

#include "doctest.h"
#include "nun/core.hpp"
#include "nun/state.hpp"
#include "support.hpp"

using namespace nun;

TEST_CASE("raster construction validates length and finiteness") {
    CHECK_THROWS_AS(Raster(2, 2, 1, std::vector<double>{1, 2, 3}), ShapeError);
    CHECK_THROWS(Raster(1, 1, 1, std::vector<double>{std::nan("")}));
    CHECK_THROWS(Raster(1, 1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}));
    const Raster r(2, 3, 3, 0.25);
    CHECK(r.size() == 18);
    CHECK(r.pixels() == 6);
    CHECK(r(1, 2, 2) == 0.25);
}

TEST_CASE("hadamard of scalars") {
    const Raster a(1, 1, 1, std::vector<double>{0.5});
    const Raster b(1, 1, 1, std::vector<double>{0.4});
    CHECK(hadamard(a, b)[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("hadamard broadcasts a mask over channels") {
    const MaskMap m(1, 2, std::vector<double>{0.0, 0.5});
    const Raster x(1, 2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
    const Raster out = hadamard(m, x);
    CHECK(out == Raster(1, 2, 3, std::vector<double>{0, 0, 0, 2, 2.5, 3}));
}

TEST_CASE("mismatched shapes raise ShapeError") {
    const Raster a(2, 2, 3), b(2, 3, 3);
    CHECK_THROWS_AS(add(a, b), ShapeError);
    CHECK_THROWS_AS(hadamard(MaskMap(3, 3), a), ShapeError);
    CHECK_THROWS_AS(fidelity_energy(a, MaskMap(2, 2), Raster(2, 2, 1)), ShapeError);
}

TEST_CASE("decomposition residual and energy on scalars") {
    const Raster x(1, 1, 1, std::vector<double>{1.0});
    const Raster b(1, 1, 1, std::vector<double>{0.2});
    const MaskMap m(1, 1, std::vector<double>{0.5});
    CHECK(decompose_residual(x, m, b)[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fidelity_energy(x, MaskMap(1, 1), Raster(1, 1, 1)) == 0.5);
    CHECK(fidelity_energy(x, m, b) == doctest::Approx(0.5 * 0.09));
}

TEST_CASE("exact decomposition has zero energy") {
    std::mt19937_64 rng(7);
    const Raster x = support::random_raster(rng, 6, 5, 3);
    const MaskMap m = support::random_binary_mask(rng, 6, 5);
    Raster b = x;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = x[i] * (1.0 - m[i / 3]);
    CHECK(fidelity_energy(x, m, b) == 0.0);
}

TEST_CASE("algebra helpers") {
    const Raster a(1, 2, 1, std::vector<double>{1.0, -2.0});
    const Raster b(1, 2, 1, std::vector<double>{3.0, 0.5});
    CHECK(dot(a, b) == 2.0);
    CHECK(squared_norm(a) == 5.0);
    CHECK(max_abs(a) == 2.0);
    CHECK(axpy(a, 2.0, b) == Raster(1, 2, 1, std::vector<double>{7.0, -1.0}));
    CHECK(clamp01(a) == Raster(1, 2, 1, std::vector<double>{1.0, 0.0}));
}

TEST_CASE("mask helpers") {
    const MaskMap m(1, 3, std::vector<double>{-0.2, 0.5, 1.3});
    CHECK_FALSE(m.in_unit_range());
    CHECK(m.clamped() == MaskMap(1, 3, std::vector<double>{0.0, 0.5, 1.0}));
    CHECK(m.binarized(0.5) == MaskMap(1, 3, std::vector<double>{0.0, 1.0, 1.0}));
    CHECK_THROWS(MaskMap(Raster(2, 2, 3)));
}

TEST_CASE("initial stage state") {
    const Raster y(3, 4, 3, 0.3);
    const StageState s = StageState::initial(y);
    CHECK(s.stage_index == 0);
    CHECK(s.mask == MaskMap(3, 4));
    CHECK(s.background == Raster(3, 4, 3));
    CHECK(s.x_t1 == y);
    CHECK(s.x_t2 == y);
}
