#include "nun/derun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nun/degrade.hpp"
#include "nun/filters.hpp"

namespace nun::derun {

std::string to_string(OperatorFamily f) {
    switch (f) {
        case OperatorFamily::identity: return "identity";
        case OperatorFamily::gamma_gain: return "gamma_gain";
        case OperatorFamily::haze_affine: return "haze_affine";
        case OperatorFamily::blur_downsample: return "blur_downsample";
        case OperatorFamily::composite: return "composite";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// DegradationOp
// ---------------------------------------------------------------------------

DegradationOp DegradationOp::identity() { return DegradationOp{}; }

DegradationOp DegradationOp::gamma_gain(double gamma, double gain) {
    if (!(gamma >= 1.0) || !(gain > 0.0)) throw std::invalid_argument("gamma_gain: need gamma >= 1 and gain > 0");
    DegradationOp op;
    op.family_ = OperatorFamily::gamma_gain;
    op.gamma_ = gamma;
    op.gain_ = gain;
    return op;
}

DegradationOp DegradationOp::haze_affine(double transmission, double airlight) {
    if (!(transmission > 0.0 && transmission <= 1.0)) throw std::invalid_argument("haze_affine: t must be in (0,1]");
    DegradationOp op;
    op.family_ = OperatorFamily::haze_affine;
    op.transmission_ = transmission;
    op.airlight_ = airlight;
    return op;
}

DegradationOp DegradationOp::haze_affine(Raster transmission, double airlight) {
    if (transmission.channels() != 1) throw ShapeError("haze_affine: transmission must be a single plane");
    for (double t : transmission.values()) {
        if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("haze_affine: t must be in (0,1]");
    }
    DegradationOp op;
    op.family_ = OperatorFamily::haze_affine;
    op.transmission_map_ = std::move(transmission);
    op.airlight_ = airlight;
    return op;
}

DegradationOp DegradationOp::blur_downsample(int factor) {
    if (factor < 1) throw std::invalid_argument("blur_downsample: factor must be >= 1");
    DegradationOp op;
    op.family_ = OperatorFamily::blur_downsample;
    op.factor_ = factor;
    return op;
}

DegradationOp DegradationOp::composite(std::vector<DegradationOp> stages) {
    if (stages.empty()) return identity();
    if (stages.size() == 1) return stages.front();
    DegradationOp op;
    op.family_ = OperatorFamily::composite;
    op.stages_ = std::move(stages);
    return op;
}

DegradationOp DegradationOp::modulated(double sigma, double mu) const {
    DegradationOp op = *this;
    op.sigma_ = sigma;
    op.mu_ = mu;
    return op;
}

bool DegradationOp::is_affine() const {
    switch (family_) {
        case OperatorFamily::gamma_gain: return gamma_ == 1.0;
        case OperatorFamily::composite:
            return std::all_of(stages_.begin(), stages_.end(), [](const DegradationOp& s) { return s.is_affine(); });
        default: return true;
    }
}

double DegradationOp::transmission_at(std::size_t pixel) const {
    return transmission_map_ ? (*transmission_map_)[pixel] : transmission_;
}

Raster DegradationOp::forward_raw(const Raster& u) const {
    switch (family_) {
        case OperatorFamily::identity: return u;
        case OperatorFamily::gamma_gain: {
            Raster out = u;
            for (double& v : out.values()) v = gain_ * std::pow(std::max(v, 0.0), gamma_);
            return out;
        }
        case OperatorFamily::haze_affine: {
            if (transmission_map_) require_same_extent(*transmission_map_, u, "haze_affine");
            Raster out = u;
            const std::size_t ch = u.channels();
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double t = transmission_at(i / ch);
                out[i] = t * u[i] + airlight_ * (1.0 - t);
            }
            return out;
        }
        case OperatorFamily::blur_downsample:
            if (factor_ == 1) return u;
            return filters::AreaBilinearResampler(u.height(), u.width(), factor_).apply(u);
        case OperatorFamily::composite: {
            Raster out = u;
            for (const auto& s : stages_) out = s.forward(out);
            return out;
        }
    }
    return u;
}

Raster DegradationOp::jvp_raw(const Raster& at, const Raster& v) const {
    switch (family_) {
        case OperatorFamily::identity: return v;
        case OperatorFamily::gamma_gain: {
            require_same_shape(at, v, "gamma_gain jvp");
            Raster out = v;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double x = std::max(at[i], 0.0);
                const double d = at[i] > 0.0 || gamma_ == 1.0 ? gain_ * gamma_ * std::pow(x, gamma_ - 1.0) : 0.0;
                out[i] = d * v[i];
            }
            return out;
        }
        case OperatorFamily::haze_affine: {
            if (transmission_map_) require_same_extent(*transmission_map_, v, "haze_affine");
            Raster out = v;
            const std::size_t ch = v.channels();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = transmission_at(i / ch) * v[i];
            return out;
        }
        case OperatorFamily::blur_downsample:
            if (factor_ == 1) return v;
            return filters::AreaBilinearResampler(v.height(), v.width(), factor_).apply(v);
        case OperatorFamily::composite: {
            Raster point = at, dir = v;
            for (const auto& s : stages_) {
                dir = s.jvp(point, dir);
                point = s.forward(point);
            }
            return dir;
        }
    }
    return v;
}

Raster DegradationOp::adjoint_raw(const Raster& at, const Raster& v) const {
    switch (family_) {
        case OperatorFamily::identity:
        case OperatorFamily::gamma_gain:
        case OperatorFamily::haze_affine:
            // diagonal Jacobians are self-adjoint
            return jvp_raw(at, v);
        case OperatorFamily::blur_downsample:
            if (factor_ == 1) return v;
            return filters::AreaBilinearResampler(v.height(), v.width(), factor_).apply_adjoint(v);
        case OperatorFamily::composite: {
            std::vector<Raster> points{at};
            points.reserve(stages_.size());
            for (std::size_t i = 0; i + 1 < stages_.size(); ++i) points.push_back(stages_[i].forward(points.back()));
            Raster out = v;
            for (std::size_t i = stages_.size(); i-- > 0;) out = stages_[i].adjoint(points[i], out);
            return out;
        }
    }
    return v;
}

Raster DegradationOp::forward(const Raster& u) const {
    Raster out = forward_raw(u);
    if (sigma_ != 1.0 || mu_ != 0.0) {
        for (double& x : out.values()) x = sigma_ * x + mu_;
    }
    return out;
}

Raster DegradationOp::jvp(const Raster& at, const Raster& v) const {
    Raster out = jvp_raw(at, v);
    if (sigma_ != 1.0) out = scale(out, sigma_);
    return out;
}

Raster DegradationOp::adjoint(const Raster& at, const Raster& v) const {
    require_same_shape(at, v, "adjoint");
    Raster out = adjoint_raw(at, v);
    if (sigma_ != 1.0) out = scale(out, sigma_);
    return out;
}

std::string DegradationOp::describe() const {
    std::ostringstream os;
    switch (family_) {
        case OperatorFamily::identity: os << "identity"; break;
        case OperatorFamily::gamma_gain: os << "gamma_gain(gamma=" << gamma_ << ",gain=" << gain_ << ")"; break;
        case OperatorFamily::haze_affine:
            os << "haze_affine(t=";
            if (transmission_map_) os << "map"; else os << transmission_;
            os << ",A=" << airlight_ << ")";
            break;
        case OperatorFamily::blur_downsample: os << "blur_downsample(" << factor_ << ")"; break;
        case OperatorFamily::composite:
            os << "composite[";
            for (std::size_t i = 0; i < stages_.size(); ++i) os << (i ? "," : "") << stages_[i].describe();
            os << "]";
            break;
    }
    if (sigma_ != 1.0 || mu_ != 0.0) os << "*" << sigma_ << "+" << mu_;
    return os.str();
}

// ---------------------------------------------------------------------------
// perception
// ---------------------------------------------------------------------------

DegradationDescriptor estimate_descriptor(const Raster& x, int dark_channel_window) {
    DegradationDescriptor d;
    if (x.empty()) return d;
    const Raster lum = filters::luminance(x);
    d.mean_luminance = filters::mean(lum);
    d.rms_contrast = std::sqrt(filters::variance(lum));
    d.dark_channel_mean = filters::mean(filters::min_filter(filters::channel_min(x), dark_channel_window));
    d.laplacian_variance = filters::variance(filters::laplacian(lum));
    d.airlight_estimate = filters::percentile(lum, 0.99);
    return d;
}

DegradationOp instantiate_operator(const DegradationDescriptor& desc, const DerunConfig& cfg) {
    std::vector<DegradationOp> stages;
    if (desc.laplacian_variance < cfg.blur_threshold) {
        stages.push_back(DegradationOp::blur_downsample(cfg.blur_scale_factor));
    }
    if (desc.mean_luminance < cfg.dark_threshold) {
        const double gamma = 1.0 + cfg.gamma_slope * (cfg.dark_threshold - desc.mean_luminance);
        const double gain = std::clamp(cfg.gain_intercept + cfg.gain_slope * desc.mean_luminance, 0.05, 1.0);
        stages.push_back(DegradationOp::gamma_gain(gamma, gain));
    }
    if (desc.dark_channel_mean > cfg.haze_threshold) {
        const double airlight = std::clamp(desc.airlight_estimate, 1.0e-3, 1.0);
        const double t = std::clamp(1.0 - cfg.haze_omega * desc.dark_channel_mean / airlight,
                                    cfg.haze_min_transmission, 1.0);
        stages.push_back(DegradationOp::haze_affine(t, airlight));
    }
    return DegradationOp::composite(std::move(stages)).modulated(cfg.sigma_mod, cfg.mu_mod);
}

DegradationOp operator_from_spec(const DegradationSpec& spec, std::size_t height, std::size_t width) {
    spec.validate();
    switch (spec.kind) {
        case DegradationKind::low_light: return DegradationOp::gamma_gain(spec.gamma, spec.gain);
        case DegradationKind::haze:
            if (spec.depth_mode == DepthMode::constant) {
                return DegradationOp::haze_affine(std::exp(-spec.beta), spec.airlight);
            }
            return DegradationOp::haze_affine(degrade::transmission_map(height, width, spec.beta, spec.depth_mode),
                                              spec.airlight);
        case DegradationKind::low_resolution: return DegradationOp::blur_downsample(spec.scale_factor);
        case DegradationKind::composite: {
            std::vector<DegradationOp> stages;
            for (const auto& c : spec.children) stages.push_back(operator_from_spec(c, height, width));
            return DegradationOp::composite(std::move(stages));
        }
    }
    return DegradationOp::identity();
}

double operator_norm_squared(const DegradationOp& op, const Raster& at, int iterations) {
    Raster v(at.height(), at.width(), at.channels(), 1.0);
    double norm = std::sqrt(squared_norm(v));
    if (norm == 0.0) return 0.0;
    v = scale(v, 1.0 / norm);
    double lambda = 0.0;
    for (int i = 0; i < iterations; ++i) {
        Raster w = op.adjoint(at, op.jvp(at, v));
        lambda = dot(v, w);
        norm = std::sqrt(squared_norm(w));
        if (norm == 0.0) return 0.0;
        v = scale(w, 1.0 / norm);
    }
    return std::max(lambda, norm);
}

// ---------------------------------------------------------------------------
// updates
// ---------------------------------------------------------------------------

Raster gradient_step_x(const Raster& x_prev, const Raster& x_ref, const DegradationOp& op, double alpha_x) {
    require_same_shape(x_prev, x_ref, "gradient_step_x");
    if (!(alpha_x > 0.0)) throw std::invalid_argument("gradient_step_x: alpha_x must be > 0");
    const Raster residual = subtract(op.forward(x_prev), x_ref);
    return axpy(x_prev, -alpha_x, op.adjoint(x_prev, residual));
}

Raster apply_restore_prox(const Raster& x, const RestoreProx& prox) {
    switch (prox.kind) {
        case RestoreProxKind::identity:
        case RestoreProxKind::clamp: return clamp01(x);
        case RestoreProxKind::gaussian_smooth: return clamp01(filters::gaussian_blur(x, prox.smooth_sigma));
        case RestoreProxKind::total_variation:
            return clamp01(filters::tv_denoise(x, prox.tv_weight, prox.tv_iterations));
    }
    return clamp01(x);
}

Raster proximal_step_x(const Raster& x_hat, const Raster& b, const MaskMap& m, const Raster& y,
                       const RestoreProx& prox, double cue_weight, double cue_blur_sigma) {
    require_same_shape(x_hat, b, "proximal_step_x");
    require_same_shape(x_hat, y, "proximal_step_x");
    require_same_extent(m, x_hat, "proximal_step_x");
    Raster out = apply_restore_prox(x_hat, prox);
    if (cue_weight != 0.0) {
        const Raster structure = add(hadamard(m, y), b);
        const Raster detail = subtract(structure, filters::gaussian_blur(structure, cue_blur_sigma));
        out = axpy(out, cue_weight, detail);
    }
    return clamp01(out);
}

double step_size(const DegradationOp& op, const Raster& at, const DerunConfig& cfg) {
    if (cfg.alpha_x) return *cfg.alpha_x;
    const double lipschitz = operator_norm_squared(op, at, cfg.power_iterations);
    return lipschitz > 1.0e-12 ? cfg.alpha_x_scale / lipschitz : cfg.alpha_x_scale;
}

std::vector<Raster> run_inner_unfolding(const Raster& x_init, const Raster& x_ref, const Raster& b,
                                        const MaskMap& m, const Raster& y, int n_iters, const DerunConfig& cfg,
                                        const DegradationOp* fixed_op) {
    if (n_iters < 1) throw std::invalid_argument("run_inner_unfolding: n_iters must be >= 1");
    require_same_shape(x_init, x_ref, "run_inner_unfolding");
    std::vector<Raster> iterates;
    iterates.reserve(static_cast<std::size_t>(n_iters));
    Raster x = x_init;
    for (int n = 0; n < n_iters; ++n) {
        const DegradationOp op =
            fixed_op ? *fixed_op : instantiate_operator(estimate_descriptor(x, cfg.dark_channel_window), cfg);
        const Raster x_hat = gradient_step_x(x, x_ref, op, step_size(op, x, cfg));
        x = proximal_step_x(x_hat, b, m, y, cfg.prox, cfg.cue_weight, cfg.cue_blur_sigma);
        iterates.push_back(x);
    }
    return iterates;
}

}  // namespace nun::derun
