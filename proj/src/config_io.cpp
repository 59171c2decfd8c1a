#include "nun/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nun::config_io {

using nlohmann::json;

namespace {

class SectionReader {
public:
    SectionReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw std::invalid_argument("config: '" + path_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        if (const json* v = find(key)) {
            try {
                out = v->get<T>();
            } catch (const json::exception& e) {
                throw std::invalid_argument("config: bad value for '" + path_ + "." + key + "': " + e.what());
            }
        }
    }

    template <typename E, typename Parse>
    void get_enum(const char* key, E& out, Parse parse) {
        std::string s;
        if (find(key)) {
            get(key, s);
            out = parse(s);
        }
    }

    /// Number or the string "auto".
    void get_auto(const char* key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_string() && v->get<std::string>() == "auto") {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw std::invalid_argument("config: '" + path_ + "." + key + "' must be a number or \"auto\"");
            }
        }
    }

    const json* child(const char* key) { return find(key); }
    std::string path(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw std::invalid_argument("config: unknown key '" + path_ + "." + item.key() + "'");
            }
        }
    }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json alpha_json(const std::optional<double>& a) { return a ? json(*a) : json("auto"); }

DegradationSpec read_spec(const json& j, const std::string& path) {
    SectionReader r(j, path);
    DegradationSpec s;
    r.get_enum("kind", s.kind, parse_degradation_kind);
    r.get("gamma", s.gamma);
    r.get("gain", s.gain);
    r.get("noise_sigma", s.noise_sigma);
    r.get("airlight", s.airlight);
    r.get("beta", s.beta);
    r.get_enum("depth_mode", s.depth_mode, parse_depth_mode);
    r.get("scale_factor", s.scale_factor);
    r.get("seed", s.seed);
    if (const json* children = r.child("children")) {
        if (!children->is_array()) throw std::invalid_argument("config: '" + r.path("children") + "' must be a list");
        for (std::size_t i = 0; i < children->size(); ++i) {
            s.children.push_back(read_spec((*children)[i], r.path("children") + "[" + std::to_string(i) + "]"));
        }
    }
    r.finish();
    return s;
}

void read_restore_prox(const json& j, const std::string& path, RestoreProx& p) {
    SectionReader r(j, path);
    r.get_enum("kind", p.kind, parse_restore_prox_kind);
    r.get("smooth_sigma", p.smooth_sigma);
    r.get("tv_weight", p.tv_weight);
    r.get("tv_iterations", p.tv_iterations);
    r.finish();
}

void read_mask_prox(const json& j, const std::string& path, MaskProx& p) {
    SectionReader r(j, path);
    r.get_enum("kind", p.kind, parse_mask_prox_kind);
    r.get("fusion_weight", p.fusion_weight);
    r.get("guide_radius", p.guide_radius);
    r.get("guide_eps", p.guide_eps);
    r.get("complement_norm", p.complement_norm);
    r.finish();
}

void read_background_prox(const json& j, const std::string& path, BackgroundProx& p) {
    SectionReader r(j, path);
    r.get_enum("kind", p.kind, parse_background_prox_kind);
    r.get("smooth_sigma", p.smooth_sigma);
    r.get("tv_weight", p.tv_weight);
    r.get("tv_iterations", p.tv_iterations);
    r.get("foreground_boost", p.foreground_boost);
    r.finish();
}

constexpr std::array<const char*, 4> kComponents{"sharpness", "contrast", "exposure", "clarity"};

}  // namespace

json to_json(const DegradationSpec& s) {
    json j{{"kind", to_string(s.kind)},
           {"gamma", s.gamma},
           {"gain", s.gain},
           {"noise_sigma", s.noise_sigma},
           {"airlight", s.airlight},
           {"beta", s.beta},
           {"depth_mode", to_string(s.depth_mode)},
           {"scale_factor", s.scale_factor},
           {"seed", s.seed}};
    j["children"] = json::array();
    for (const auto& c : s.children) j["children"].push_back(to_json(c));
    return j;
}

DegradationSpec spec_from_json(const json& j) { return read_spec(j, "degrade"); }

json to_json(const RunConfig& c) {
    json j;
    j["core"] = {{"stages", c.stages},
                 {"n_schedule", c.n_schedule},
                 {"binarize_threshold", c.binarize_threshold},
                 {"seed", c.seed},
                 {"ablation", to_string(c.ablation)}};
    j["degrade"] = to_json(c.degrade);
    const auto& d = c.derun;
    j["derun"] = {{"alpha_x", alpha_json(d.alpha_x)},
                  {"alpha_x_scale", d.alpha_x_scale},
                  {"power_iterations", d.power_iterations},
                  {"operator_source", to_string(d.operator_source)},
                  {"reference", to_string(d.reference)},
                  {"prox",
                   {{"kind", to_string(d.prox.kind)},
                    {"smooth_sigma", d.prox.smooth_sigma},
                    {"tv_weight", d.prox.tv_weight},
                    {"tv_iterations", d.prox.tv_iterations}}},
                  {"cue_weight", d.cue_weight},
                  {"cue_blur_sigma", d.cue_blur_sigma},
                  {"sigma_mod", d.sigma_mod},
                  {"mu_mod", d.mu_mod},
                  {"dark_channel_window", d.dark_channel_window},
                  {"haze_threshold", d.haze_threshold},
                  {"haze_omega", d.haze_omega},
                  {"haze_min_transmission", d.haze_min_transmission},
                  {"dark_threshold", d.dark_threshold},
                  {"gamma_slope", d.gamma_slope},
                  {"gain_intercept", d.gain_intercept},
                  {"gain_slope", d.gain_slope},
                  {"blur_threshold", d.blur_threshold},
                  {"blur_scale_factor", d.blur_scale_factor}};
    const auto& s = c.sodun;
    j["sodun"] = {{"alpha_m", alpha_json(s.alpha_m)},
                  {"alpha_b", s.alpha_b},
                  {"mask_prox",
                   {{"kind", to_string(s.mask_prox.kind)},
                    {"fusion_weight", s.mask_prox.fusion_weight},
                    {"guide_radius", s.mask_prox.guide_radius},
                    {"guide_eps", s.mask_prox.guide_eps},
                    {"complement_norm", s.mask_prox.complement_norm}}},
                  {"background_prox",
                   {{"kind", to_string(s.background_prox.kind)},
                    {"smooth_sigma", s.background_prox.smooth_sigma},
                    {"tv_weight", s.background_prox.tv_weight},
                    {"tv_iterations", s.background_prox.tv_iterations},
                    {"foreground_boost", s.background_prox.foreground_boost}}}};
    json weights, ranges;
    for (std::size_t i = 0; i < kComponents.size(); ++i) {
        weights[kComponents[i]] = c.bui.weights[i];
        ranges[kComponents[i]] = {c.bui.ranges[i].lo, c.bui.ranges[i].hi};
    }
    j["bui"] = {{"weights", weights},
                {"ranges", ranges},
                {"csc_early_stop", c.bui.csc_early_stop},
                {"csc_threshold", c.bui.csc_threshold}};
    j["metrics"] = {{"epsilon", c.metrics.epsilon},
                    {"beta2", c.metrics.beta2},
                    {"weight_radius", c.metrics.weight_radius},
                    {"weight_gain", c.metrics.weight_gain}};
    return j;
}

RunConfig from_json(const json& j) {
    RunConfig c;
    SectionReader top(j, "config");
    if (const json* core = top.child("core")) {
        SectionReader r(*core, "core");
        r.get("stages", c.stages);
        r.get("n_schedule", c.n_schedule);
        r.get("binarize_threshold", c.binarize_threshold);
        r.get("seed", c.seed);
        r.get_enum("ablation", c.ablation, parse_ablation);
        r.finish();
    }
    if (const json* degrade = top.child("degrade")) c.degrade = read_spec(*degrade, "degrade");
    if (const json* derun = top.child("derun")) {
        SectionReader r(*derun, "derun");
        auto& d = c.derun;
        r.get_auto("alpha_x", d.alpha_x);
        r.get("alpha_x_scale", d.alpha_x_scale);
        r.get("power_iterations", d.power_iterations);
        r.get_enum("operator_source", d.operator_source, parse_operator_source);
        r.get_enum("reference", d.reference, parse_restore_reference);
        if (const json* p = r.child("prox")) read_restore_prox(*p, r.path("prox"), d.prox);
        r.get("cue_weight", d.cue_weight);
        r.get("cue_blur_sigma", d.cue_blur_sigma);
        r.get("sigma_mod", d.sigma_mod);
        r.get("mu_mod", d.mu_mod);
        r.get("dark_channel_window", d.dark_channel_window);
        r.get("haze_threshold", d.haze_threshold);
        r.get("haze_omega", d.haze_omega);
        r.get("haze_min_transmission", d.haze_min_transmission);
        r.get("dark_threshold", d.dark_threshold);
        r.get("gamma_slope", d.gamma_slope);
        r.get("gain_intercept", d.gain_intercept);
        r.get("gain_slope", d.gain_slope);
        r.get("blur_threshold", d.blur_threshold);
        r.get("blur_scale_factor", d.blur_scale_factor);
        r.finish();
    }
    if (const json* sodun = top.child("sodun")) {
        SectionReader r(*sodun, "sodun");
        r.get_auto("alpha_m", c.sodun.alpha_m);
        r.get("alpha_b", c.sodun.alpha_b);
        if (const json* p = r.child("mask_prox")) read_mask_prox(*p, r.path("mask_prox"), c.sodun.mask_prox);
        if (const json* p = r.child("background_prox")) {
            read_background_prox(*p, r.path("background_prox"), c.sodun.background_prox);
        }
        r.finish();
    }
    if (const json* bui = top.child("bui")) {
        SectionReader r(*bui, "bui");
        if (const json* w = r.child("weights")) {
            SectionReader wr(*w, r.path("weights"));
            for (std::size_t i = 0; i < kComponents.size(); ++i) wr.get(kComponents[i], c.bui.weights[i]);
            wr.finish();
        }
        if (const json* rg = r.child("ranges")) {
            SectionReader rr(*rg, r.path("ranges"));
            for (std::size_t i = 0; i < kComponents.size(); ++i) {
                std::array<double, 2> pair{c.bui.ranges[i].lo, c.bui.ranges[i].hi};
                rr.get(kComponents[i], pair);
                c.bui.ranges[i] = ScoreRange{pair[0], pair[1]};
            }
            rr.finish();
        }
        r.get("csc_early_stop", c.bui.csc_early_stop);
        r.get("csc_threshold", c.bui.csc_threshold);
        r.finish();
    }
    if (const json* m = top.child("metrics")) {
        SectionReader r(*m, "metrics");
        r.get("epsilon", c.metrics.epsilon);
        r.get("beta2", c.metrics.beta2);
        r.get("weight_radius", c.metrics.weight_radius);
        r.get("weight_gain", c.metrics.weight_gain);
        r.finish();
    }
    top.finish();
    c.validate();
    return c;
}

RunConfig load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

std::string dump(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace nun::config_io
