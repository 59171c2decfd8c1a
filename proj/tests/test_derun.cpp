#include <cmath>

#include "doctest.h"
#include "nun/degrade.hpp"
#include "nun/derun.hpp"
#include "nun/filters.hpp"
#include "nun/metrics.hpp"
#include "support.hpp"

using namespace nun;
using derun::DegradationOp;

TEST_CASE("descriptor of simple images") {
    const auto gray = derun::estimate_descriptor(Raster(8, 8, 3, 0.5));
    CHECK(gray.mean_luminance == doctest::Approx(0.5));
    CHECK(gray.rms_contrast == doctest::Approx(0.0));
    CHECK(gray.laplacian_variance == doctest::Approx(0.0));
    CHECK(derun::estimate_descriptor(Raster(8, 8, 3, 0.0)).dark_channel_mean == 0.0);

    Raster board(8, 8, 3);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x)
            for (std::size_t c = 0; c < 3; ++c) board(y, x, c) = (x + y) % 2 ? 1.0 : 0.0;
    const auto d = derun::estimate_descriptor(board);
    CHECK(d.mean_luminance == doctest::Approx(0.5));
    CHECK(d.rms_contrast == doctest::Approx(0.5));
}

TEST_CASE("operator choice from descriptors") {
    DerunConfig cfg;
    derun::DegradationDescriptor clean{0.5, 0.2, 0.05, 0.02, 0.9};
    CHECK(derun::instantiate_operator(clean, cfg).family() == derun::OperatorFamily::identity);

    auto hazy = clean;
    hazy.dark_channel_mean = 1.0;
    CHECK(derun::instantiate_operator(hazy, cfg).family() == derun::OperatorFamily::haze_affine);
    CHECK(derun::instantiate_operator(hazy, cfg) == derun::instantiate_operator(hazy, cfg));

    auto dark = clean;
    dark.mean_luminance = 0.1;
    const auto op = derun::instantiate_operator(dark, cfg);
    CHECK(op.family() == derun::OperatorFamily::gamma_gain);
    CHECK(op.gamma() > 1.0);

    auto all = hazy;
    all.mean_luminance = 0.1;
    all.laplacian_variance = 0.0;
    const auto comp = derun::instantiate_operator(all, cfg);
    REQUIRE(comp.family() == derun::OperatorFamily::composite);
    REQUIRE(comp.stages().size() == 3);
    CHECK(comp.stages()[0].family() == derun::OperatorFamily::blur_downsample);
    CHECK(comp.stages()[1].family() == derun::OperatorFamily::gamma_gain);
    CHECK(comp.stages()[2].family() == derun::OperatorFamily::haze_affine);
}

TEST_CASE("a clean toy image maps to the identity operator") {
    const auto set = support::degraded_toy_set(3, 64, DegradationSpec::low_light(1.0, 1.0, 0.0), 21);
    for (const auto& it : set) {
        const auto d = derun::estimate_descriptor(it.clean);
        CHECK(derun::instantiate_operator(d, DerunConfig{}).family() == derun::OperatorFamily::identity);
    }
}

TEST_CASE("restoration gradient step on scalars") {
    const Raster x(1, 1, 1, std::vector<double>{0.2});
    const Raster ref(1, 1, 1, std::vector<double>{0.8});
    const auto op = DegradationOp::haze_affine(0.5, 1.0);
    CHECK(derun::gradient_step_x(x, ref, op, 1.0)[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(derun::gradient_step_x(x, ref, DegradationOp::identity(), 1.0) == ref);
}

TEST_CASE("modulation scales the forward model and its transpose") {
    const auto op = DegradationOp::haze_affine(0.5, 1.0).modulated(2.0, 0.1);
    const Raster u(1, 1, 1, std::vector<double>{0.2});
    CHECK(op.forward(u)[0] == doctest::Approx(2.0 * 0.6 + 0.1));
    CHECK(op.adjoint(u, Raster(1, 1, 1, std::vector<double>{1.0}))[0] == doctest::Approx(1.0));
}

TEST_CASE("gamma jacobian is diagonal") {
    const auto op = DegradationOp::gamma_gain(2.0, 0.5);
    const Raster at(1, 2, 1, std::vector<double>{0.3, 0.6});
    const Raster v(1, 2, 1, std::vector<double>{1.0, 1.0});
    const Raster j = op.jvp(at, v);
    CHECK(j[0] == doctest::Approx(0.5 * 2.0 * 0.3));
    CHECK(j[1] == doctest::Approx(0.5 * 2.0 * 0.6));
    CHECK(op.adjoint(at, v) == j);
}

TEST_CASE("operator norm of simple operators") {
    const Raster at(6, 6, 3, 0.5);
    CHECK(derun::operator_norm_squared(DegradationOp::identity(), at, 20) == doctest::Approx(1.0));
    CHECK(derun::operator_norm_squared(DegradationOp::haze_affine(0.4, 1.0), at, 20) == doctest::Approx(0.16));
    DerunConfig cfg;
    CHECK(derun::step_size(DegradationOp::haze_affine(0.5, 1.0), at, cfg) == doctest::Approx(0.9 / 0.25));
    cfg.alpha_x = 0.3;
    CHECK(derun::step_size(DegradationOp::haze_affine(0.5, 1.0), at, cfg) == 0.3);
}

TEST_CASE("proximal step") {
    std::mt19937_64 rng(2);
    const Raster x_hat = support::random_raster(rng, 5, 5, 3, -0.2, 1.2);
    const Raster b = support::random_raster(rng, 5, 5, 3);
    const MaskMap m = support::random_mask(rng, 5, 5);
    RestoreProx id;
    id.kind = RestoreProxKind::identity;
    CHECK(derun::proximal_step_x(x_hat, b, m, x_hat, id, 0.0, 1.0) == clamp01(x_hat));

    RestoreProx tv;
    const Raster c(5, 5, 3, 0.3);
    for (double v : support::values_of(derun::apply_restore_prox(c, tv))) CHECK(v == doctest::Approx(0.3));
}

TEST_CASE("inner loop trivial case") {
    std::mt19937_64 rng(8);
    const Raster x = support::random_raster(rng, 4, 4, 3);
    const Raster ref = support::random_raster(rng, 4, 4, 3);
    DerunConfig cfg;
    cfg.alpha_x = 1.0;
    cfg.prox.kind = RestoreProxKind::identity;
    cfg.cue_weight = 0.0;
    const auto id = DegradationOp::identity();
    const auto its = derun::run_inner_unfolding(x, ref, x, MaskMap(4, 4), x, 1, cfg, &id);
    REQUIRE(its.size() == 1);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(its[0][i] == doctest::Approx(ref[i]).epsilon(1e-14));
    CHECK_THROWS(derun::run_inner_unfolding(x, ref, x, MaskMap(4, 4), x, 0, cfg, &id));
}

TEST_CASE("monotone fidelity with a safe step") {
    std::mt19937_64 rng(13);
    const Raster ref = support::random_raster(rng, 12, 12, 3);
    const Raster x0 = support::random_raster(rng, 12, 12, 3);
    const auto op = DegradationOp::composite({DegradationOp::blur_downsample(2), DegradationOp::haze_affine(0.6, 0.9)});
    DerunConfig cfg;
    cfg.prox.kind = RestoreProxKind::identity;
    cfg.cue_weight = 0.0;
    cfg.alpha_x = 0.99 / derun::operator_norm_squared(op, x0, 50);
    double prev = 0.5 * squared_norm(subtract(op.forward(x0), ref));
    for (const auto& it : derun::run_inner_unfolding(x0, ref, x0, MaskMap(12, 12), x0, 10, cfg, &op)) {
        const double e = 0.5 * squared_norm(subtract(op.forward(it), ref));
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
}

TEST_CASE("oracle operator improves a hazed image") {
    const auto spec = DegradationSpec::haze(0.9, 0.8, DepthMode::radial);
    const auto set = support::degraded_toy_set(1, 16, spec, 5);
    const auto op = derun::operator_from_spec(spec, 16, 16);
    DerunConfig cfg;
    cfg.cue_weight = 0.0;
    const Raster& y = set[0].degraded;
    const auto its = derun::run_inner_unfolding(y, y, Raster::zeros_like(y), MaskMap(16, 16), y, 5, cfg, &op);
    CHECK(metrics::psnr(its.back(), set[0].clean) > metrics::psnr(y, set[0].clean));
}

TEST_CASE("inner loop is deterministic") {
    const auto set = support::degraded_toy_set(1, 24, DegradationSpec::default_combined(), 6);
    const Raster& y = set[0].degraded;
    DerunConfig cfg;
    const auto a = derun::run_inner_unfolding(y, y, Raster::zeros_like(y), MaskMap(24, 24), y, 3, cfg);
    const auto b = derun::run_inner_unfolding(y, y, Raster::zeros_like(y), MaskMap(24, 24), y, 3, cfg);
    CHECK(a == b);
}
