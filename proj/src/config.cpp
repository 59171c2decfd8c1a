#include "nun/config.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace nun {

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::array<std::pair<std::string_view, E>, N>& table, const char* what) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    std::string msg = std::string("unknown ") + what + " '" + s + "' (expected one of:";
    for (const auto& entry : table) msg += " " + std::string(entry.first);
    throw std::invalid_argument(msg + ")");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
    for (const auto& [name, value] : table) {
        if (value == v) return std::string(name);
    }
    return "?";
}

constexpr std::array<std::pair<std::string_view, DegradationKind>, 4> kDegradationKinds{{
    {"low_light", DegradationKind::low_light},
    {"haze", DegradationKind::haze},
    {"low_resolution", DegradationKind::low_resolution},
    {"composite", DegradationKind::composite},
}};
constexpr std::array<std::pair<std::string_view, DepthMode>, 2> kDepthModes{{
    {"constant", DepthMode::constant},
    {"radial", DepthMode::radial},
}};
constexpr std::array<std::pair<std::string_view, RestoreProxKind>, 4> kRestoreProx{{
    {"identity", RestoreProxKind::identity},
    {"clamp", RestoreProxKind::clamp},
    {"gaussian_smooth", RestoreProxKind::gaussian_smooth},
    {"total_variation", RestoreProxKind::total_variation},
}};
constexpr std::array<std::pair<std::string_view, OperatorSource>, 2> kOperatorSources{{
    {"estimate", OperatorSource::estimate},
    {"oracle", OperatorSource::oracle},
}};
constexpr std::array<std::pair<std::string_view, RestoreReference>, 2> kReferences{{
    {"previous_t1", RestoreReference::previous_t1},
    {"observation", RestoreReference::observation},
}};
constexpr std::array<std::pair<std::string_view, MaskProxKind>, 2> kMaskProx{{
    {"clamp_only", MaskProxKind::clamp_only},
    {"guided_fusion", MaskProxKind::guided_fusion},
}};
constexpr std::array<std::pair<std::string_view, BackgroundProxKind>, 3> kBackgroundProx{{
    {"identity", BackgroundProxKind::identity},
    {"gaussian_smooth", BackgroundProxKind::gaussian_smooth},
    {"total_variation", BackgroundProxKind::total_variation},
}};
constexpr std::array<std::pair<std::string_view, Ablation>, 4> kAblations{{
    {"sodun_minus", Ablation::sodun_minus},
    {"sodun", Ablation::sodun},
    {"derun", Ablation::derun},
    {"bui", Ablation::bui},
}};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(DegradationKind k) { return enum_name(k, kDegradationKinds); }
std::string to_string(DepthMode m) { return enum_name(m, kDepthModes); }
std::string to_string(RestoreProxKind k) { return enum_name(k, kRestoreProx); }
std::string to_string(OperatorSource s) { return enum_name(s, kOperatorSources); }
std::string to_string(RestoreReference r) { return enum_name(r, kReferences); }
std::string to_string(MaskProxKind k) { return enum_name(k, kMaskProx); }
std::string to_string(BackgroundProxKind k) { return enum_name(k, kBackgroundProx); }
std::string to_string(Ablation a) { return enum_name(a, kAblations); }

DegradationKind parse_degradation_kind(const std::string& s) { return parse_enum(s, kDegradationKinds, "degradation kind"); }
DepthMode parse_depth_mode(const std::string& s) { return parse_enum(s, kDepthModes, "depth mode"); }
RestoreProxKind parse_restore_prox_kind(const std::string& s) { return parse_enum(s, kRestoreProx, "restore prox"); }
OperatorSource parse_operator_source(const std::string& s) { return parse_enum(s, kOperatorSources, "operator source"); }
RestoreReference parse_restore_reference(const std::string& s) { return parse_enum(s, kReferences, "reference"); }
MaskProxKind parse_mask_prox_kind(const std::string& s) { return parse_enum(s, kMaskProx, "mask prox"); }
BackgroundProxKind parse_background_prox_kind(const std::string& s) {
    return parse_enum(s, kBackgroundProx, "background prox");
}
Ablation parse_ablation(const std::string& s) { return parse_enum(s, kAblations, "ablation"); }

DegradationSpec DegradationSpec::low_light(double gamma, double gain, double noise_sigma, std::uint64_t seed) {
    DegradationSpec s;
    s.kind = DegradationKind::low_light;
    s.gamma = gamma;
    s.gain = gain;
    s.noise_sigma = noise_sigma;
    s.seed = seed;
    return s;
}

DegradationSpec DegradationSpec::haze(double airlight, double beta, DepthMode depth, std::uint64_t seed) {
    DegradationSpec s;
    s.kind = DegradationKind::haze;
    s.airlight = airlight;
    s.beta = beta;
    s.depth_mode = depth;
    s.seed = seed;
    return s;
}

DegradationSpec DegradationSpec::low_resolution(int scale_factor) {
    DegradationSpec s;
    s.kind = DegradationKind::low_resolution;
    s.scale_factor = scale_factor;
    return s;
}

DegradationSpec DegradationSpec::composite(std::vector<DegradationSpec> children) {
    DegradationSpec s;
    s.kind = DegradationKind::composite;
    s.children = std::move(children);
    return s;
}

DegradationSpec DegradationSpec::default_combined() {
    return composite({low_resolution(2), low_light(2.2, 0.4, 0.01, 1), haze(0.8, 1.0, DepthMode::radial, 2)});
}

void DegradationSpec::validate() const {
    switch (kind) {
        case DegradationKind::low_light:
            require(gamma >= 1.0, "low_light: gamma must be >= 1");
            require(gain > 0.0 && gain <= 1.0, "low_light: gain must be in (0,1]");
            require(noise_sigma >= 0.0, "low_light: noise_sigma must be >= 0");
            break;
        case DegradationKind::haze:
            require(airlight > 0.0 && airlight <= 1.0, "haze: airlight must be in (0,1]");
            require(beta >= 0.0, "haze: beta must be >= 0");
            break;
        case DegradationKind::low_resolution:
            require(scale_factor >= 1, "low_resolution: scale_factor must be >= 1");
            break;
        case DegradationKind::composite:
            require(children.size() >= 2, "composite: needs at least two children");
            for (const auto& c : children) c.validate();
            return;
    }
    require(children.empty(), to_string(kind) + ": leaf specs take no children");
}

int RunConfig::inner_iterations(int k) const {
    if (k < 1 || k > stages) throw std::out_of_range("stage index out of range");
    if (n_schedule.empty()) return 1;
    const auto i = static_cast<std::size_t>(k - 1);
    return i < n_schedule.size() ? n_schedule[i] : n_schedule.back();
}

void RunConfig::validate() const {
    require(stages >= 1, "core.stages must be >= 1");
    require(std::all_of(n_schedule.begin(), n_schedule.end(), [](int n) { return n >= 1; }),
            "core.n_schedule entries must be >= 1");
    require(binarize_threshold > 0.0 && binarize_threshold < 1.0, "core.binarize_threshold must be in (0,1)");
    degrade.validate();

    require(!derun.alpha_x || *derun.alpha_x > 0.0, "derun.alpha_x must be > 0");
    require(derun.alpha_x_scale > 0.0, "derun.alpha_x_scale must be > 0");
    require(derun.power_iterations >= 1, "derun.power_iterations must be >= 1");
    require(derun.prox.tv_weight >= 0.0 && derun.prox.smooth_sigma >= 0.0, "derun.prox parameters must be >= 0");
    require(derun.prox.tv_iterations >= 0, "derun.prox.tv_iterations must be >= 0");
    require(derun.cue_weight >= 0.0, "derun.cue_weight must be >= 0");
    require(derun.dark_channel_window >= 1 && derun.dark_channel_window % 2 == 1,
            "derun.dark_channel_window must be odd and >= 1");
    require(derun.haze_min_transmission > 0.0 && derun.haze_min_transmission <= 1.0,
            "derun.haze_min_transmission must be in (0,1]");
    require(derun.blur_scale_factor >= 1, "derun.blur_scale_factor must be >= 1");

    require(!sodun.alpha_m || *sodun.alpha_m > 0.0, "sodun.alpha_m must be > 0");
    require(sodun.alpha_b > 0.0, "sodun.alpha_b must be > 0");
    require(sodun.mask_prox.fusion_weight >= 0.0 && sodun.mask_prox.fusion_weight <= 1.0,
            "sodun.mask_prox.fusion_weight must be in [0,1]");
    require(sodun.mask_prox.guide_radius >= 0, "sodun.mask_prox.guide_radius must be >= 0");
    require(sodun.mask_prox.guide_eps > 0.0, "sodun.mask_prox.guide_eps must be > 0");
    require(sodun.mask_prox.complement_norm > 0.0, "sodun.mask_prox.complement_norm must be > 0");
    require(sodun.background_prox.tv_weight >= 0.0 && sodun.background_prox.smooth_sigma >= 0.0,
            "sodun.background_prox parameters must be >= 0");

    require(std::all_of(bui.weights.begin(), bui.weights.end(), [](double w) { return w >= 0.0; }),
            "bui.weights must be nonnegative");
    require(std::any_of(bui.weights.begin(), bui.weights.end(), [](double w) { return w > 0.0; }),
            "bui.weights must not all be zero");
    for (const auto& r : bui.ranges) require(r.hi > r.lo, "bui.ranges need hi > lo");

    require(metrics.epsilon >= 0.0, "metrics.epsilon must be >= 0");
    require(metrics.beta2 > 0.0, "metrics.beta2 must be > 0");
    require(metrics.weight_radius >= 0, "metrics.weight_radius must be >= 0");
}

}  // namespace nun
