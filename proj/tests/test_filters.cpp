#include <cmath>

#include "doctest.h"
#include "nun/filters.hpp"
#include "support.hpp"

using namespace nun;

TEST_CASE("box mean with truncated window") {
    const Raster r(1, 3, 1, std::vector<double>{0, 3, 6});
    const Raster out = filters::box_mean(r, 1);
    CHECK(out[0] == doctest::Approx(1.5));
    CHECK(out[1] == doctest::Approx(3.0));
    CHECK(out[2] == doctest::Approx(4.5));
}

TEST_CASE("filters preserve constants") {
    const Raster c(7, 9, 3, 0.42);
    for (double v : support::values_of(filters::gaussian_blur(c, 1.5))) CHECK(v == doctest::Approx(0.42));
    for (double v : support::values_of(filters::guided_filter(c.channel(0), c, 2, 1e-3))) CHECK(v == doctest::Approx(0.42));
    for (double v : support::values_of(filters::tv_denoise(c, 0.1, 20))) CHECK(v == doctest::Approx(0.42));
    for (double v : support::values_of(filters::laplacian(c.channel(0)))) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("min filter and channel min") {
    Raster r(5, 5, 3, 0.8);
    r(2, 2, 1) = 0.1;
    const Raster dark = filters::min_filter(filters::channel_min(r), 3);
    CHECK(dark(1, 1) == 0.1);
    CHECK(dark(3, 3) == 0.1);
    CHECK(dark(0, 0) == 0.8);
}

TEST_CASE("luminance weights") {
    const Raster px(1, 1, 3, std::vector<double>{1.0, 0.0, 0.0});
    CHECK(filters::luminance(px)[0] == doctest::Approx(0.299));
}

TEST_CASE("tv denoise lowers total variation of a noisy step") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 0.1);
    Raster f(8, 8, 1);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x) f(y, x) = (x < 4 ? 0.2 : 0.8) + n(rng);
    const Raster u = filters::tv_denoise(f, 0.1, 20);
    CHECK(filters::total_variation(u) < filters::total_variation(f));
}

TEST_CASE("resampler adjoints") {
    std::mt19937_64 rng(3);
    for (auto [h, w, f] : {std::tuple{8, 8, 2}, std::tuple{9, 7, 2}, std::tuple{12, 10, 4}}) {
        const filters::AreaBilinearResampler rs(h, w, f);
        const Raster hi = support::random_raster(rng, h, w, 2, -1, 1);
        const Raster lo = support::random_raster(rng, rs.low_height(), rs.low_width(), 2, -1, 1);
        CHECK(dot(rs.downsample(hi), lo) == doctest::Approx(dot(hi, rs.downsample_adjoint(lo))).epsilon(1e-12));
        CHECK(dot(rs.upsample(lo), hi) == doctest::Approx(dot(lo, rs.upsample_adjoint(hi))).epsilon(1e-12));
    }
}

TEST_CASE("area average of a 2x2 block") {
    const Raster r(2, 2, 1, std::vector<double>{0, 1, 1, 0});
    const filters::AreaBilinearResampler rs(2, 2, 2);
    for (double v : support::values_of(rs.apply(r))) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("percentile by nearest rank") {
    Raster r(1, 100, 1);
    for (std::size_t i = 0; i < 100; ++i) r[i] = static_cast<double>(i + 1);
    CHECK(filters::percentile(r, 0.99) == 99.0);
    CHECK(filters::percentile(r, 0.0) == 1.0);
    CHECK(filters::percentile(r, 1.0) == 100.0);
}
