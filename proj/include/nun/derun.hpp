#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nun/config.hpp"
#include "nun/core.hpp"

// Inner restoration unfolding: degradation perception, parametric
// forward/adjoint operator pairs, the restoration gradient step and the
// segmentation-guided proximal step.
namespace nun::derun {

/// Classical image statistics that drive the choice of degradation operator.
struct DegradationDescriptor {
    double mean_luminance = 0.0;
    double rms_contrast = 0.0;
    /// Mean of the min-over-channels image after a window x window min filter.
    double dark_channel_mean = 0.0;
    /// Variance of the 4-neighbour Laplacian of the luminance.
    double laplacian_variance = 0.0;
    /// 99th percentile luminance, used as the atmospheric light.
    double airlight_estimate = 0.0;

    friend bool operator==(const DegradationDescriptor&, const DegradationDescriptor&) = default;
};

enum class OperatorFamily { identity, gamma_gain, haze_affine, blur_downsample, composite };

std::string to_string(OperatorFamily f);

/// A forward model D_mod(u) = sigma * D(u) + mu together with its
/// Jacobian-vector product and Jacobian-transpose product. For the linear and
/// affine families the Jacobian does not depend on the linearisation point.
class DegradationOp {
public:
    static DegradationOp identity();
    /// D(u) = gain * max(u,0)^gamma
    static DegradationOp gamma_gain(double gamma, double gain);
    /// D(u) = t * u + airlight * (1 - t) with a uniform transmission t.
    static DegradationOp haze_affine(double transmission, double airlight);
    /// Same with a per-pixel transmission plane.
    static DegradationOp haze_affine(Raster transmission, double airlight);
    /// Area-average down by `factor`, bilinear up.
    static DegradationOp blur_downsample(int factor);
    /// Applies `stages` in order (first element innermost).
    static DegradationOp composite(std::vector<DegradationOp> stages);

    /// Copy with scale/shift modulation replaced.
    DegradationOp modulated(double sigma, double mu) const;

    OperatorFamily family() const { return family_; }
    /// True when D is affine, so adjoint() ignores its linearisation point.
    bool is_affine() const;
    double sigma() const { return sigma_; }
    double mu() const { return mu_; }
    double gamma() const { return gamma_; }
    double gain() const { return gain_; }
    double transmission() const { return transmission_; }
    const std::optional<Raster>& transmission_map() const { return transmission_map_; }
    double airlight() const { return airlight_; }
    int factor() const { return factor_; }
    const std::vector<DegradationOp>& stages() const { return stages_; }

    Raster forward(const Raster& u) const;
    /// J(at) v
    Raster jvp(const Raster& at, const Raster& v) const;
    /// J(at)^T v
    Raster adjoint(const Raster& at, const Raster& v) const;

    /// Short human-readable description, e.g. "composite[blur_downsample(2),haze_affine(t=0.5,A=1)]".
    std::string describe() const;

    friend bool operator==(const DegradationOp&, const DegradationOp&) = default;

private:
    Raster forward_raw(const Raster& u) const;
    Raster jvp_raw(const Raster& at, const Raster& v) const;
    Raster adjoint_raw(const Raster& at, const Raster& v) const;
    double transmission_at(std::size_t pixel) const;

    OperatorFamily family_ = OperatorFamily::identity;
    double sigma_ = 1.0;
    double mu_ = 0.0;
    double gamma_ = 1.0;
    double gain_ = 1.0;
    double transmission_ = 1.0;
    std::optional<Raster> transmission_map_;
    double airlight_ = 1.0;
    int factor_ = 1;
    std::vector<DegradationOp> stages_;
};

DegradationDescriptor estimate_descriptor(const Raster& x, int dark_channel_window = 7);

/// Maps descriptor statistics to an operator using the thresholds and
/// affine rules in `cfg`:
///   laplacian_variance < blur_threshold  -> blur_downsample(blur_scale_factor)
///   mean_luminance     < dark_threshold  -> gamma_gain
///   dark_channel_mean  > haze_threshold  -> haze_affine
/// Several triggers compose as blur -> gamma -> haze; none gives identity.
/// The configured sigma/mu modulation is applied to the result.
DegradationOp instantiate_operator(const DegradationDescriptor& desc, const DerunConfig& cfg);

/// Operator matching a degradation generator spec (noise dropped), for
/// rasters of the given size.
DegradationOp operator_from_spec(const DegradationSpec& spec, std::size_t height, std::size_t width);

/// Largest eigenvalue of J(at)^T J(at) by power iteration from a constant
/// start vector.
double operator_norm_squared(const DegradationOp& op, const Raster& at, int iterations);

/// X - alpha * J^T (D(X) - ref), Jacobian taken at X.
Raster gradient_step_x(const Raster& x_prev, const Raster& x_ref, const DegradationOp& op, double alpha_x);

/// Restoration prox alone; output clamped to [0,1].
Raster apply_restore_prox(const Raster& x, const RestoreProx& prox);

/// clamp(prox(x_hat) + cue_weight * (S - blur(S))) with S = M.Y + B.
Raster proximal_step_x(const Raster& x_hat, const Raster& b, const MaskMap& m, const Raster& y,
                       const RestoreProx& prox, double cue_weight, double cue_blur_sigma);

/// Step size for one inner iteration: the configured alpha_x, or
/// alpha_x_scale / ||J||^2 when alpha_x is automatic.
double step_size(const DegradationOp& op, const Raster& at, const DerunConfig& cfg);

/// One full inner loop. With `fixed_op` set, it replaces the per-iteration
/// descriptor-driven operator. Returns the n_iters iterates in order.
std::vector<Raster> run_inner_unfolding(const Raster& x_init, const Raster& x_ref, const Raster& b,
                                        const MaskMap& m, const Raster& y, int n_iters, const DerunConfig& cfg,
                                        const DegradationOp* fixed_op = nullptr);

}  // namespace nun::derun
