#pragma once

#include <span>
#include <vector>

#include "nun/config.hpp"
#include "nun/core.hpp"
#include "nun/state.hpp"

namespace nun::metrics {

/// Predictions are clamped to [delta, 1 - delta] before the logarithm.
inline constexpr double kBceDelta = 1.0e-7;

/// sum w * [-t log p - (1-t) log(1-p)] / sum w
double weighted_bce(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map);

/// 1 - sum w p t / sum w (p + t - p t); 0 when both masks are empty.
double weighted_iou_loss(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map);

/// 1 - sum w min(p, t) / sum w max(p, t). Zero for any pair of identical
/// masks, soft or not; agrees with weighted_iou_loss on binary masks.
double weighted_fuzzy_iou_loss(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map);
/// w = 1 + gain * |boxmean_radius(target) - target|
MaskMap boundary_weight_map(const MaskMap& target, int radius = 2, double gain = 5.0);

/// 2^(k-K) for k = 1..K.
std::vector<double> stage_weights(int stages);

struct StageLoss {
    double wbce = 0.0;
    double wiou = 0.0;
    double mse = 0.0;
};

struct LossBreakdown {
    std::vector<StageLoss> per_stage;
    std::vector<double> stage_weights;
    double l_basic = 0.0;
    double l_csc = 0.0;
    double epsilon = 0.0;
    double l_total = 0.0;
};

/// Stage-weighted segmentation (wbce + wiou of M_k against the ground truth)
/// plus restoration (mean squared error of the last inner iterate X_{k,N}
/// against the clean image). `traces` holds stages 1..K, without stage 0.
/// The consistency term is left at zero; see with_consistency().
LossBreakdown l_basic(std::span<const StageState> traces, const MaskMap& gt_mask, const Raster& clean_x,
                      const MetricsConfig& cfg);

/// Fills l_csc / epsilon and sets l_total = l_basic + epsilon * l_csc.
LossBreakdown with_consistency(LossBreakdown base, double l_csc, double epsilon);

double mae(const MaskMap& pred, const MaskMap& target);

/// Adaptive-threshold F-measure: pred >= min(2 mean(pred), 1) (and > 0) is
/// foreground, target is binarised at 0.5. Two empty masks score 1.
double f_beta(const MaskMap& pred, const MaskMap& target, double beta2 = 0.3);

/// Foreground IoU after binarising pred at `threshold` and target at 0.5.
/// Two empty masks score 1.
double m_iou(const MaskMap& pred, const MaskMap& target, double threshold = 0.5);

/// Dice coefficient with the same binarisation as m_iou.
double m_dice(const MaskMap& pred, const MaskMap& target, double threshold = 0.5);

double mse(const Raster& a, const Raster& b);

/// 10 log10(1 / mse) for unit peak, capped at 99 dB below mse 1e-10.
double psnr(const Raster& a, const Raster& b);

}  // namespace nun::metrics
