#include "nun/sodun.hpp"

#include <algorithm>
#include <stdexcept>

#include "nun/bui.hpp"
#include "nun/derun.hpp"
#include "nun/filters.hpp"

namespace nun::sodun {

MaskMap gradient_step_m(const MaskMap& m_prev, const Raster& b_prev, const Raster& x_guide, double alpha_m) {
    require_same_extent(m_prev, x_guide, "gradient_step_m");
    require_same_shape(b_prev, x_guide, "gradient_step_m");
    if (!(alpha_m > 0.0)) throw std::invalid_argument("gradient_step_m: alpha_m must be > 0");
    const std::size_t ch = x_guide.channels();
    MaskMap out = m_prev;
    for (std::size_t p = 0; p < out.size(); ++p) {
        double grad = 0.0;
        for (std::size_t c = 0; c < ch; ++c) {
            const std::size_t i = p * ch + c;
            const double x = x_guide[i];
            grad += x * (x * m_prev[p] + b_prev[i] - x);
        }
        out[p] = m_prev[p] - alpha_m * (grad / static_cast<double>(ch));
    }
    return out;
}

MaskMap proximal_step_m(const MaskMap& m_hat, const Raster& b_prev, const Raster& x_t1, const Raster& y,
                        const MaskProx& prox) {
    require_same_extent(m_hat, b_prev, "proximal_step_m");
    require_same_extent(m_hat, x_t1, "proximal_step_m");
    require_same_extent(m_hat, y, "proximal_step_m");
    if (prox.kind == MaskProxKind::clamp_only) return m_hat.clamped();

    const double rho = prox.fusion_weight;
    const Raster b_mean = b_prev.channel_mean();
    Raster fused(m_hat.height(), m_hat.width(), 1);
    for (std::size_t p = 0; p < fused.size(); ++p) {
        const double complement = clamp01(1.0 - b_mean[p] / prox.complement_norm);
        fused[p] = rho * clamp01(m_hat[p]) + (1.0 - rho) * complement;
    }
    // guide = mean over the channel concatenation of (x_t1, y)
    const double cx = static_cast<double>(x_t1.channels()), cy = static_cast<double>(y.channels());
    const Raster gx = x_t1.channel_mean(), gy = y.channel_mean();
    Raster guide(fused.height(), fused.width(), 1);
    for (std::size_t p = 0; p < guide.size(); ++p) guide[p] = (cx * gx[p] + cy * gy[p]) / (cx + cy);
    return MaskMap(clamp01(filters::guided_filter(guide, fused, prox.guide_radius, prox.guide_eps)));
}

Raster gradient_step_b(const MaskMap& m_k, const Raster& b_prev, const Raster& x_t1, double alpha_b) {
    require_same_extent(m_k, x_t1, "gradient_step_b");
    require_same_shape(b_prev, x_t1, "gradient_step_b");
    if (!(alpha_b > 0.0)) throw std::invalid_argument("gradient_step_b: alpha_b must be > 0");
    const std::size_t ch = x_t1.channels();
    Raster out = b_prev;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = x_t1[i];
        out[i] = b_prev[i] - alpha_b * (b_prev[i] + x * m_k[i / ch] - x);
    }
    return out;
}

Raster proximal_step_b(const Raster& b_hat, const MaskMap& m_k, const Raster& x_t1, const Raster& y,
                       const BackgroundProx& prox) {
    require_same_extent(m_k, b_hat, "proximal_step_b");
    require_same_shape(b_hat, x_t1, "proximal_step_b");
    require_same_shape(b_hat, y, "proximal_step_b");
    const Raster base = clamp01(b_hat);
    switch (prox.kind) {
        case BackgroundProxKind::identity: return base;
        case BackgroundProxKind::gaussian_smooth: return clamp01(filters::gaussian_blur(base, prox.smooth_sigma));
        case BackgroundProxKind::total_variation: {
            Raster weights(m_k.height(), m_k.width(), 1);
            for (std::size_t p = 0; p < weights.size(); ++p) weights[p] = 1.0 + prox.foreground_boost * clamp01(m_k[p]);
            return clamp01(filters::tv_denoise(base, prox.tv_weight, prox.tv_iterations, &weights));
        }
    }
    return base;
}

double auto_alpha_m(const Raster& x) {
    const double peak = max_abs(x);
    return peak > 0.0 ? 0.9 / (peak * peak) : 0.9;
}

MaskMap mask_update(const StageState& prev, const Raster& x_guide, const Raster& y, const RunConfig& cfg) {
    const double alpha_m = cfg.sodun.alpha_m ? *cfg.sodun.alpha_m : auto_alpha_m(x_guide);
    const MaskMap m_hat = gradient_step_m(prev.mask, prev.background, x_guide, alpha_m);
    return proximal_step_m(m_hat, prev.background, x_guide, y, cfg.sodun.mask_prox);
}

StageState run_outer_stage(const StageState& prev, const Raster& y, const RunConfig& cfg) {
    require_same_shape(prev.x_t1, y, "run_outer_stage");
    StageState next;
    next.stage_index = prev.stage_index + 1;
    const Raster& x = prev.x_t1;

    next.mask = mask_update(prev, x, y, cfg);
    if (cfg.ablation == Ablation::sodun_minus) {
        next.background = prev.background;
    } else {
        const Raster b_hat = gradient_step_b(next.mask, prev.background, x, cfg.sodun.alpha_b);
        next.background = proximal_step_b(b_hat, next.mask, x, y, cfg.sodun.background_prox);
    }

    if (cfg.ablation == Ablation::sodun_minus || cfg.ablation == Ablation::sodun) {
        next.inner_iterates = {x};
        next.quality_scores = {bui::score(x, cfg.bui).composite};
        next.x_t1 = x;
        next.x_t2 = x;
        return next;
    }

    DerunConfig derun_cfg = cfg.derun;
    if (cfg.ablation == Ablation::derun) derun_cfg.cue_weight = 0.0;
    const Raster& x_ref = cfg.derun.reference == RestoreReference::observation ? y : x;
    std::optional<derun::DegradationOp> oracle;
    if (cfg.derun.operator_source == OperatorSource::oracle) {
        oracle = derun::operator_from_spec(cfg.degrade, y.height(), y.width())
                     .modulated(cfg.derun.sigma_mod, cfg.derun.mu_mod);
    }
    next.inner_iterates = derun::run_inner_unfolding(x, x_ref, next.background, next.mask, y,
                                                     cfg.inner_iterations(next.stage_index), derun_cfg,
                                                     oracle ? &*oracle : nullptr);
    for (const auto& it : next.inner_iterates) next.quality_scores.push_back(bui::score(it, cfg.bui).composite);

    if (cfg.ablation == Ablation::bui) {
        std::tie(next.t1_index, next.t2_index) = bui::select_top_two(next.quality_scores);
    } else {
        next.t1_index = next.t2_index = next.inner_iterates.size() - 1;
    }
    next.x_t1 = next.inner_iterates[next.t1_index];
    next.x_t2 = next.inner_iterates[next.t2_index];
    return next;
}

}  // namespace nun::sodun
