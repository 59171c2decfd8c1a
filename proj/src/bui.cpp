#include "nun/bui.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nun/filters.hpp"
#include "nun/metrics.hpp"
#include "nun/sodun.hpp"

namespace nun::bui {

QualityScore score(const Raster& x, const BuiConfig& cfg) {
    if (std::none_of(cfg.weights.begin(), cfg.weights.end(), [](double w) { return w > 0.0; }) ||
        std::any_of(cfg.weights.begin(), cfg.weights.end(), [](double w) { return w < 0.0; })) {
        throw std::invalid_argument("score: weights must be nonnegative and not all zero");
    }
    QualityScore s;
    const Raster lum = filters::luminance(x);
    const double mean_lum = filters::mean(lum);
    s.sharpness = filters::variance(filters::laplacian(lum));
    s.contrast = std::sqrt(filters::variance(lum));
    s.exposure = 1.0 - 2.0 * std::abs(mean_lum - 0.5);
    s.clarity = 1.0 - filters::mean(filters::min_filter(filters::channel_min(x), 7));
    const std::array<double, 4> comps{s.sharpness, s.contrast, s.exposure, s.clarity};
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto& r = cfg.ranges[i];
        s.composite += cfg.weights[i] * (comps[i] - r.lo) / (r.hi - r.lo);
    }
    return s;
}

QualityScore score(const Raster& x, const std::array<double, 4>& weights) {
    BuiConfig cfg;
    cfg.weights = weights;
    return score(x, cfg);
}

std::pair<std::size_t, std::size_t> select_top_two(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("select_top_two: no candidates");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return {order[0], order.size() > 1 ? order[1] : order[0]};
}

std::pair<std::size_t, std::size_t> select_t1_t2(std::span<const Raster> iterates, const BuiConfig& cfg) {
    if (iterates.empty()) throw std::invalid_argument("select_t1_t2: no candidates");
    std::vector<double> scores;
    scores.reserve(iterates.size());
    for (const auto& x : iterates) scores.push_back(score(x, cfg).composite);
    return select_top_two(scores);
}

CscTerms csc_divergence(const MaskMap& m_t1, const MaskMap& m_t2, const MaskMap& weight_map) {
    return CscTerms{metrics::weighted_bce(m_t1, m_t2, weight_map), metrics::weighted_fuzzy_iou_loss(m_t1, m_t2, weight_map)};
}

std::vector<StageState> run_pipeline(const Raster& y, const RunConfig& cfg) {
    cfg.validate();
    std::vector<StageState> trace;
    trace.reserve(static_cast<std::size_t>(cfg.stages));
    StageState prev = StageState::initial(y);
    for (int k = 1; k <= cfg.stages; ++k) {
        trace.push_back(sodun::run_outer_stage(prev, y, cfg));
        prev = trace.back();
    }
    return trace;
}

DualTrace run_dual_pipeline(const Raster& y, const RunConfig& cfg) {
    cfg.validate();
    DualTrace out;
    const bool consistency = cfg.ablation == Ablation::bui;
    const auto weights = metrics::stage_weights(cfg.stages);
    StageState prev = StageState::initial(y);
    for (int k = 1; k <= cfg.stages; ++k) {
        StageState next = sodun::run_outer_stage(prev, y, cfg);
        MaskMap m_t2 = consistency ? sodun::mask_update(prev, prev.x_t2, y, cfg) : next.mask;
        CscTerms terms;
        if (consistency) {
            const MaskMap w = metrics::boundary_weight_map(m_t2, cfg.metrics.weight_radius, cfg.metrics.weight_gain);
            terms = csc_divergence(next.mask, m_t2, w);
        }
        const double weighted = weights[static_cast<std::size_t>(k - 1)] * terms.total();
        out.primary.push_back(next);
        out.t2_masks.push_back(std::move(m_t2));
        out.csc_terms.push_back(terms);
        out.csc_per_stage.push_back(weighted);
        out.l_csc += weighted;
        prev = std::move(next);
        if (consistency && cfg.bui.csc_early_stop && terms.wiou < cfg.bui.csc_threshold) break;
    }
    return out;
}

}  // namespace nun::bui
