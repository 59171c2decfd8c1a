#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nun {

// ---------------------------------------------------------------------------
// degrade
// ---------------------------------------------------------------------------

enum class DegradationKind { low_light, haze, low_resolution, composite };
enum class DepthMode { constant, radial };

struct DegradationSpec {
    DegradationKind kind = DegradationKind::low_light;
    double gamma = 1.0;
    double gain = 1.0;
    double noise_sigma = 0.0;
    double airlight = 1.0;
    double beta = 0.0;
    DepthMode depth_mode = DepthMode::constant;
    int scale_factor = 1;
    std::vector<DegradationSpec> children;
    std::uint64_t seed = 0;

    static DegradationSpec low_light(double gamma, double gain, double noise_sigma, std::uint64_t seed = 0);
    static DegradationSpec haze(double airlight, double beta, DepthMode depth, std::uint64_t seed = 0);
    static DegradationSpec low_resolution(int scale_factor);
    static DegradationSpec composite(std::vector<DegradationSpec> children);
    /// low_res(2) -> low_light(2.2, 0.4, 0.01) -> haze(0.8, 1.0, radial)
    static DegradationSpec default_combined();

    /// Throws std::invalid_argument describing the first violated range.
    void validate() const;

    friend bool operator==(const DegradationSpec&, const DegradationSpec&) = default;
};

// ---------------------------------------------------------------------------
// derun
// ---------------------------------------------------------------------------

enum class RestoreProxKind { identity, clamp, gaussian_smooth, total_variation };

struct RestoreProx {
    RestoreProxKind kind = RestoreProxKind::total_variation;
    double smooth_sigma = 1.0;
    double tv_weight = 0.04;
    int tv_iterations = 20;

    friend bool operator==(const RestoreProx&, const RestoreProx&) = default;
};

/// Where the restoration operator comes from.
///   estimate: recomputed from the current iterate's descriptor every inner step
///   oracle:   built once from the `degrade` section (the generator's own parameters)
enum class OperatorSource { estimate, oracle };

/// Target of the restoration fidelity term ||D(X) - ref||.
///   previous_t1: the previous stage's selected restoration (X_0 = Y)
///   observation: the degraded input Y at every stage
enum class RestoreReference { previous_t1, observation };

struct DerunConfig {
    std::optional<double> alpha_x;  // nullopt = auto (alpha_x_scale / L)
    double alpha_x_scale = 0.9;
    int power_iterations = 20;
    OperatorSource operator_source = OperatorSource::estimate;
    RestoreReference reference = RestoreReference::previous_t1;
    RestoreProx prox;
    double cue_weight = 0.1;
    double cue_blur_sigma = 1.0;
    double sigma_mod = 1.0;
    double mu_mod = 0.0;
    int dark_channel_window = 7;

    // descriptor -> operator rules
    double haze_threshold = 0.35;
    double haze_omega = 0.95;
    double haze_min_transmission = 0.1;
    double dark_threshold = 0.25;
    double gamma_slope = 4.0;
    double gain_intercept = 0.1;
    double gain_slope = 1.5;
    double blur_threshold = 1.0e-3;
    int blur_scale_factor = 2;

    friend bool operator==(const DerunConfig&, const DerunConfig&) = default;
};

// ---------------------------------------------------------------------------
// sodun
// ---------------------------------------------------------------------------

enum class MaskProxKind { clamp_only, guided_fusion };

struct MaskProx {
    MaskProxKind kind = MaskProxKind::guided_fusion;
    double fusion_weight = 0.95;
    int guide_radius = 2;
    double guide_eps = 1.0e-3;
    double complement_norm = 1.0;

    friend bool operator==(const MaskProx&, const MaskProx&) = default;
};

enum class BackgroundProxKind { identity, gaussian_smooth, total_variation };

struct BackgroundProx {
    BackgroundProxKind kind = BackgroundProxKind::gaussian_smooth;
    double smooth_sigma = 1.0;
    double tv_weight = 0.05;
    int tv_iterations = 20;
    /// TV weight multiplier is (1 + foreground_boost * M).
    double foreground_boost = 1.0;

    friend bool operator==(const BackgroundProx&, const BackgroundProx&) = default;
};

struct SodunConfig {
    std::optional<double> alpha_m;  // nullopt = auto: 0.9 / max(X^2)
    double alpha_b = 0.9;
    MaskProx mask_prox;
    BackgroundProx background_prox;

    friend bool operator==(const SodunConfig&, const SodunConfig&) = default;
};

// ---------------------------------------------------------------------------
// bui
// ---------------------------------------------------------------------------

struct ScoreRange {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const ScoreRange&, const ScoreRange&) = default;
};

/// Component order: sharpness, contrast, exposure, clarity.
struct BuiConfig {
    std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
    std::array<ScoreRange, 4> ranges{ScoreRange{0.0, 0.05}, ScoreRange{0.0, 0.5},
                                     ScoreRange{0.0, 1.0}, ScoreRange{0.0, 1.0}};
    bool csc_early_stop = false;
    double csc_threshold = 1.0e-3;

    friend bool operator==(const BuiConfig&, const BuiConfig&) = default;
};

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsConfig {
    double epsilon = 1.0;
    double beta2 = 0.3;
    int weight_radius = 2;
    double weight_gain = 5.0;

    friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

// ---------------------------------------------------------------------------
// core
// ---------------------------------------------------------------------------

/// Breakdown switches, cumulative in this order:
///   sodun_minus  mask updates only (background fixed at zero), no restoration
///   sodun        mask + background updates, no restoration
///   derun        + nested restoration; T1 is the last inner iterate, no cue term
///   bui          + quality-based T1/T2 selection, cue term, consistency diagnostics
enum class Ablation { sodun_minus, sodun, derun, bui };

struct RunConfig {
    int stages = 4;
    std::vector<int> n_schedule{4, 3, 3, 2};
    double binarize_threshold = 0.5;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::bui;

    DegradationSpec degrade = DegradationSpec::default_combined();
    DerunConfig derun;
    SodunConfig sodun;
    BuiConfig bui;
    MetricsConfig metrics;

    /// Inner iteration count for stage k (1-based).
    int inner_iterations(int k) const;
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_string(DegradationKind k);
std::string to_string(DepthMode m);
std::string to_string(RestoreProxKind k);
std::string to_string(OperatorSource s);
std::string to_string(RestoreReference r);
std::string to_string(MaskProxKind k);
std::string to_string(BackgroundProxKind k);
std::string to_string(Ablation a);

DegradationKind parse_degradation_kind(const std::string& s);
DepthMode parse_depth_mode(const std::string& s);
RestoreProxKind parse_restore_prox_kind(const std::string& s);
OperatorSource parse_operator_source(const std::string& s);
RestoreReference parse_restore_reference(const std::string& s);
MaskProxKind parse_mask_prox_kind(const std::string& s);
BackgroundProxKind parse_background_prox_kind(const std::string& s);
Ablation parse_ablation(const std::string& s);

}  // namespace nun
