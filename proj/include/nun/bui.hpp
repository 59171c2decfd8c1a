#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nun/config.hpp"
#include "nun/core.hpp"
#include "nun/state.hpp"

// Bi-directional interaction between the two unfoldings: no-reference
// quality scoring, best/second-best selection of inner iterates and the
// cross-stage consistency between masks driven by each.
namespace nun::bui {

struct QualityScore {
    double sharpness = 0.0;  // variance of the luminance Laplacian
    double contrast = 0.0;   // RMS luminance contrast
    double exposure = 0.0;   // 1 - 2 |mean luminance - 0.5|
    double clarity = 0.0;    // 1 - dark channel mean
    double composite = 0.0;  // sum_i w_i (c_i - lo_i) / (hi_i - lo_i)
};

QualityScore score(const Raster& x, const BuiConfig& cfg);
/// Uses the default normalisation ranges.
QualityScore score(const Raster& x, const std::array<double, 4>& weights);

/// Indices of the highest and second-highest score; ties go to the lower
/// index, and t2 == t1 for a single candidate.
std::pair<std::size_t, std::size_t> select_top_two(std::span<const double> scores);

std::pair<std::size_t, std::size_t> select_t1_t2(std::span<const Raster> iterates, const BuiConfig& cfg);

struct CscTerms {
    double wbce = 0.0;
    double wiou = 0.0;
    double total() const { return wbce + wiou; }
};

/// Weighted BCE of m_t1 against m_t2 as the target, plus the min/max
/// weighted IoU loss so that identical soft masks score exactly zero.
CscTerms csc_divergence(const MaskMap& m_t1, const MaskMap& m_t2, const MaskMap& weight_map);

struct DualTrace {
    std::vector<StageState> primary;  // stages 1..K
    std::vector<MaskMap> t2_masks;
    std::vector<CscTerms> csc_terms;      // unweighted, per stage
    std::vector<double> csc_per_stage;    // 2^(k-K) * (wbce + wiou)
    double l_csc = 0.0;

    const StageState& final_stage() const { return primary.back(); }
};

/// Full stage loop without the consistency branch.
std::vector<StageState> run_pipeline(const Raster& y, const RunConfig& cfg);

/// Full stage loop plus the shadow branch: at every stage the mask steps are
/// re-run from X_{k-1}^{T2} to obtain M_k^{T2}. The primary trace is
/// identical to run_pipeline(). Only the bui ablation computes the
/// consistency terms; other modes report zeros.
DualTrace run_dual_pipeline(const Raster& y, const RunConfig& cfg);

}  // namespace nun::bui
