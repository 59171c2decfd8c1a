#include <cmath>

#include "doctest.h"
#include "nun/metrics.hpp"
#include "support.hpp"

using namespace nun;

TEST_CASE("weighted bce of a fair coin") {
    const MaskMap half(3, 3, 0.5), w(3, 3, 1.0);
    CHECK(metrics::weighted_bce(half, half, w) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("weighted bce clips at delta") {
    const MaskMap zero(1, 1, 0.0), one(1, 1, 1.0), w(1, 1, 1.0);
    CHECK(metrics::weighted_bce(zero, one, w) == doctest::Approx(-std::log(metrics::kBceDelta)));
    CHECK(metrics::weighted_bce(one, one, w) == doctest::Approx(-std::log(1.0 - metrics::kBceDelta)));
}

TEST_CASE("weighted iou loss") {
    const MaskMap p(2, 2, std::vector<double>{1, 0, 0, 0});
    const MaskMap t(2, 2, std::vector<double>{1, 1, 0, 0});
    const MaskMap w(2, 2, 1.0);
    CHECK(metrics::weighted_iou_loss(p, t, w) == doctest::Approx(0.5));
    CHECK(metrics::weighted_iou_loss(MaskMap(2, 2), MaskMap(2, 2), w) == 0.0);
}

TEST_CASE("min/max iou agrees with the product form on binary masks") {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 20; ++t) {
        const MaskMap a = support::random_binary_mask(rng, 6, 6), b = support::random_binary_mask(rng, 6, 6);
        const MaskMap w = support::random_mask(rng, 6, 6, 1.0, 3.0);
        CHECK(metrics::weighted_fuzzy_iou_loss(a, b, w) == doctest::Approx(metrics::weighted_iou_loss(a, b, w)));
    }
    const MaskMap soft = support::random_mask(rng, 6, 6);
    CHECK(metrics::weighted_fuzzy_iou_loss(soft, soft, MaskMap(6, 6, 1.0)) == 0.0);
}

TEST_CASE("boundary weight next to a straight edge") {
    MaskMap t(11, 11);
    for (std::size_t y = 6; y < 11; ++y)
        for (std::size_t x = 0; x < 11; ++x) t(y, x) = 1.0;
    const MaskMap w = metrics::boundary_weight_map(t, 2, 5.0);
    CHECK(w(5, 5) == doctest::Approx(3.0));
    CHECK(w(0, 5) == doctest::Approx(1.0));
}

TEST_CASE("stage weights") {
    CHECK(metrics::stage_weights(4) == std::vector<double>{0.125, 0.25, 0.5, 1.0});
    CHECK(metrics::stage_weights(1) == std::vector<double>{1.0});
}

TEST_CASE("perfect and inverted predictions") {
    std::mt19937_64 rng(12);
    const MaskMap gt = support::random_binary_mask(rng, 8, 8);
    MaskMap inv = gt;
    for (double& v : inv.values()) v = 1.0 - v;
    CHECK(metrics::mae(gt, gt) == 0.0);
    CHECK(metrics::f_beta(gt, gt) == doctest::Approx(1.0));
    CHECK(metrics::m_iou(gt, gt) == 1.0);
    CHECK(metrics::m_dice(gt, gt) == 1.0);
    CHECK(metrics::m_iou(inv, gt) == 0.0);
    CHECK(metrics::mae(inv, gt) == 1.0);
}

TEST_CASE("hand-counted half-correct pair") {
    // pred 1 1 / 0 0, gt 1 0 / 1 0: tp 1, fp 1, fn 1, tn 1
    const MaskMap pred(2, 2, std::vector<double>{1, 1, 0, 0});
    const MaskMap gt(2, 2, std::vector<double>{1, 0, 1, 0});
    CHECK(metrics::mae(pred, gt) == 0.5);
    CHECK(metrics::m_iou(pred, gt) == doctest::Approx(1.0 / 3.0));
    CHECK(metrics::m_dice(pred, gt) == doctest::Approx(0.5));
    // adaptive threshold min(2 * 0.5, 1) = 1: both predicted pixels survive
    CHECK(metrics::f_beta(pred, gt) == doctest::Approx(0.5));
}

TEST_CASE("empty masks agree perfectly") {
    const MaskMap e(3, 3);
    CHECK(metrics::f_beta(e, e) == 1.0);
    CHECK(metrics::m_iou(e, e) == 1.0);
    CHECK(metrics::m_dice(e, e) == 1.0);
}

TEST_CASE("psnr") {
    const Raster a(4, 4, 3, 0.5), b(4, 4, 3, 0.6);
    CHECK(metrics::psnr(a, b) == doctest::Approx(20.0));
    CHECK(metrics::psnr(a, a) == 99.0);
}

TEST_CASE("loss aggregation") {
    const auto set = support::degraded_toy_set(1, 24, DegradationSpec::default_combined(), 13);
    std::vector<StageState> trace(2, StageState::initial(set[0].degraded));
    trace[1].mask = set[0].mask;
    const auto l = metrics::l_basic(trace, set[0].mask, set[0].clean, MetricsConfig{});
    REQUIRE(l.per_stage.size() == 2);
    CHECK(l.stage_weights == std::vector<double>{0.5, 1.0});
    double expect = 0.0;
    for (std::size_t k = 0; k < 2; ++k) expect += l.stage_weights[k] * (l.per_stage[k].wbce + l.per_stage[k].wiou + l.per_stage[k].mse);
    CHECK(l.l_basic == doctest::Approx(expect));
    CHECK(l.per_stage[1].mse == doctest::Approx(metrics::mse(set[0].degraded, set[0].clean)));
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        const auto t = metrics::with_consistency(l, 0.7, eps);
        CHECK(t.l_total == doctest::Approx(l.l_basic + eps * 0.7));
    }
}
