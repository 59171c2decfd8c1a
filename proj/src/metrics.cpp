#include "nun/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nun/filters.hpp"

namespace nun::metrics {

namespace {

struct Confusion {
    double tp = 0, fp = 0, fn = 0;
};

Confusion confusion(const MaskMap& pred, const MaskMap& target, double pred_threshold, bool require_positive) {
    require_same_extent(pred, target, "confusion");
    Confusion c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] >= pred_threshold && (!require_positive || pred[i] > 0.0);
        const bool t = target[i] >= 0.5;
        c.tp += p && t;
        c.fp += p && !t;
        c.fn += !p && t;
    }
    return c;
}

void check_triple(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map, const char* what) {
    require_same_extent(pred, target, what);
    require_same_extent(pred, weight_map, what);
}

}  // namespace

double weighted_bce(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map) {
    check_triple(pred, target, weight_map, "weighted_bce");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = std::clamp(pred[i], kBceDelta, 1.0 - kBceDelta);
        const double t = target[i];
        const double w = weight_map[i];
        num += w * (-t * std::log(p) - (1.0 - t) * std::log(1.0 - p));
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

double weighted_iou_loss(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map) {
    check_triple(pred, target, weight_map, "weighted_iou_loss");
    double inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred[i], t = target[i], w = weight_map[i];
        inter += w * p * t;
        uni += w * (p + t - p * t);
    }
    if (uni <= 0.0) return 0.0;
    return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

double weighted_fuzzy_iou_loss(const MaskMap& pred, const MaskMap& target, const MaskMap& weight_map) {
    check_triple(pred, target, weight_map, "weighted_fuzzy_iou_loss");
    double inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        inter += weight_map[i] * std::min(pred[i], target[i]);
        uni += weight_map[i] * std::max(pred[i], target[i]);
    }
    if (uni <= 0.0) return 0.0;
    return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

MaskMap boundary_weight_map(const MaskMap& target, int radius, double gain) {
    const Raster local = filters::box_mean(target.plane(), radius);
    MaskMap w(target.height(), target.width());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + gain * std::abs(local[i] - target[i]);
    return w;
}

std::vector<double> stage_weights(int stages) {
    std::vector<double> w;
    for (int k = 1; k <= stages; ++k) w.push_back(std::ldexp(1.0, k - stages));
    return w;
}

LossBreakdown l_basic(std::span<const StageState> traces, const MaskMap& gt_mask, const Raster& clean_x,
                      const MetricsConfig& cfg) {
    if (traces.empty()) throw std::invalid_argument("l_basic: empty trace");
    const MaskMap weights = boundary_weight_map(gt_mask, cfg.weight_radius, cfg.weight_gain);
    LossBreakdown out;
    out.stage_weights = stage_weights(static_cast<int>(traces.size()));
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const StageState& s = traces[k];
        StageLoss l;
        l.wbce = weighted_bce(s.mask, gt_mask, weights);
        l.wiou = weighted_iou_loss(s.mask, gt_mask, weights);
        const Raster& last = s.inner_iterates.empty() ? s.x_t1 : s.inner_iterates.back();
        l.mse = mse(last, clean_x);
        out.per_stage.push_back(l);
        out.l_basic += out.stage_weights[k] * (l.wbce + l.wiou + l.mse);
    }
    out.l_total = out.l_basic;
    return out;
}

LossBreakdown with_consistency(LossBreakdown base, double l_csc, double epsilon) {
    base.l_csc = l_csc;
    base.epsilon = epsilon;
    base.l_total = base.l_basic + epsilon * l_csc;
    return base;
}

double mae(const MaskMap& pred, const MaskMap& target) {
    require_same_extent(pred, target, "mae");
    if (pred.size() == 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return s / static_cast<double>(pred.size());
}

double f_beta(const MaskMap& pred, const MaskMap& target, double beta2) {
    double mean = 0.0;
    for (double v : pred.values()) mean += v;
    mean = pred.size() ? mean / static_cast<double>(pred.size()) : 0.0;
    const Confusion c = confusion(pred, target, std::min(2.0 * mean, 1.0), true);
    if (c.tp == 0.0) return (c.fp == 0.0 && c.fn == 0.0) ? 1.0 : 0.0;
    const double precision = c.tp / (c.tp + c.fp);
    const double recall = c.tp / (c.tp + c.fn);
    return (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
}

double m_iou(const MaskMap& pred, const MaskMap& target, double threshold) {
    const Confusion c = confusion(pred, target, threshold, false);
    const double uni = c.tp + c.fp + c.fn;
    return uni == 0.0 ? 1.0 : c.tp / uni;
}

double m_dice(const MaskMap& pred, const MaskMap& target, double threshold) {
    const Confusion c = confusion(pred, target, threshold, false);
    const double den = 2.0 * c.tp + c.fp + c.fn;
    return den == 0.0 ? 1.0 : 2.0 * c.tp / den;
}

double mse(const Raster& a, const Raster& b) {
    require_same_shape(a, b, "mse");
    if (a.empty()) return 0.0;
    return squared_norm(subtract(a, b)) / static_cast<double>(a.size());
}

double psnr(const Raster& a, const Raster& b) {
    const double e = mse(a, b);
    if (e < 1.0e-10) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / e));
}

}  // namespace nun::metrics
