#pragma once

#include "nun/config.hpp"
#include "nun/core.hpp"
#include "nun/state.hpp"

// Outer segmentation unfolding: alternating mask / background proximal
// gradient updates on 1/2 ||X - X.M - B||^2, driven by the restored image of
// the previous stage.
namespace nun::sodun {

/// M - alpha * mean_c( X.(X.M + B - X) ). Not clamped.
MaskMap gradient_step_m(const MaskMap& m_prev, const Raster& b_prev, const Raster& x_guide, double alpha_m);

/// clamp_only: clamp(m_hat).
/// guided_fusion: rho * clamp(m_hat) + (1 - rho) * mean_c(1 - B / C), smoothed
/// by a guided filter whose guide is the channel mean of (x_t1, y); clamped.
MaskMap proximal_step_m(const MaskMap& m_hat, const Raster& b_prev, const Raster& x_t1, const Raster& y,
                        const MaskProx& prox);

/// B - alpha * (B + X.M - X). Not clamped.
Raster gradient_step_b(const MaskMap& m_k, const Raster& b_prev, const Raster& x_t1, double alpha_b);

/// Configured smoother on clamp(b_hat). For total_variation the weight is
/// raised where m_k is high, since foreground pixels carry no background.
Raster proximal_step_b(const Raster& b_hat, const MaskMap& m_k, const Raster& x_t1, const Raster& y,
                       const BackgroundProx& prox);

/// 0.9 / max(X^2), or 0.9 when X is identically zero.
double auto_alpha_m(const Raster& x);

/// Both mask steps of stage k given the previous state and a guide image.
MaskMap mask_update(const StageState& prev, const Raster& x_guide, const Raster& y, const RunConfig& cfg);

/// One full outer stage: M-hat, M, B-hat, B, the nested restoration loop and
/// the T1/T2 choice, honouring cfg.ablation.
StageState run_outer_stage(const StageState& prev, const Raster& y, const RunConfig& cfg);

}  // namespace nun::sodun
