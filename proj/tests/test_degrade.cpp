#include <cmath>

#include "doctest.h"
#include "nun/degrade.hpp"
#include "nun/metrics.hpp"
#include "nun/toy.hpp"
#include "support.hpp"

using namespace nun;

TEST_CASE("low light on a single pixel") {
    const Raster x(1, 1, 1, std::vector<double>{0.5});
    CHECK(degrade::apply_low_light(x, 2.0, 0.5, 0.0, 0)[0] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("haze on a single pixel with constant depth") {
    const Raster x(1, 1, 1, std::vector<double>{0.2});
    CHECK(degrade::apply_haze(x, 1.0, std::log(2.0), DepthMode::constant)[0] == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("low resolution averages a 2x2 block") {
    const Raster x(2, 2, 1, std::vector<double>{0, 1, 1, 0});
    for (double v : support::values_of(degrade::apply_low_resolution(x, 2))) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("composite chains its children in order") {
    const Raster x(4, 4, 3, 0.5);
    const auto spec = DegradationSpec::composite(
        {DegradationSpec::low_resolution(2), DegradationSpec::low_light(2.0, 0.5, 0.0)});
    for (double v : support::values_of(degrade::apply_spec(x, spec))) CHECK(v == doctest::Approx(0.125));
}

TEST_CASE("identity parameters leave the image alone") {
    std::mt19937_64 rng(5);
    const Raster x = support::random_raster(rng, 6, 6, 3);
    CHECK(degrade::apply_low_light(x, 1.0, 1.0, 0.0, 9) == x);
    CHECK(degrade::apply_low_resolution(x, 1) == x);
    CHECK(degrade::apply_haze(x, 0.7, 0.0, DepthMode::radial) == x);
}

TEST_CASE("noise is seeded") {
    const Raster x(8, 8, 3, 0.5);
    const Raster a = degrade::apply_low_light(x, 1.0, 1.0, 0.05, 1);
    CHECK(a == degrade::apply_low_light(x, 1.0, 1.0, 0.05, 1));
    CHECK_FALSE(a == degrade::apply_low_light(x, 1.0, 1.0, 0.05, 2));
}

TEST_CASE("reseeding changes noise but not deterministic parts") {
    const auto spec = DegradationSpec::default_combined();
    const auto a = degrade::reseeded(spec, 0, 0), b = degrade::reseeded(spec, 0, 1);
    CHECK_FALSE(a == b);
    CHECK(degrade::reseeded(spec, 0, 0) == a);
    REQUIRE(a.children.size() == 3);
    CHECK(a.children[1].gamma == b.children[1].gamma);
    CHECK(a.children[2].beta == b.children[2].beta);
}

TEST_CASE("radial depth map") {
    const Raster d = degrade::depth_map(5, 5, DepthMode::radial);
    CHECK(d(2, 2) == doctest::Approx(0.5));
    CHECK(d(0, 0) == doctest::Approx(0.5 + std::hypot(2.0, 2.0) / std::hypot(5.0, 5.0)));
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS(DegradationSpec::low_light(-1.0, 0.5, 0.0).validate());
    CHECK_THROWS(DegradationSpec::low_light(1.0, 0.5, -0.1).validate());
    CHECK_THROWS(DegradationSpec::low_resolution(0).validate());
    CHECK_THROWS(DegradationSpec::haze(1.5, 1.0, DepthMode::constant).validate());
}

TEST_CASE("default combined degradation is well below 30 dB") {
    const auto set = support::degraded_toy_set(6, 48, DegradationSpec::default_combined(), 4);
    for (const auto& it : set) CHECK(metrics::psnr(it.degraded, it.clean) < 30.0);
}
