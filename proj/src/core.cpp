#include "nun/core.hpp"
#include "nun/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nun {

namespace {

void require_finite(std::span<const double> data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            std::ostringstream os;
            os << "non-finite value at index " << i;
            throw std::invalid_argument(os.str());
        }
    }
}

std::string shape_of(const Raster& r) {
    std::ostringstream os;
    os << r.height() << "x" << r.width() << "x" << r.channels();
    return os.str();
}

// Index of the broadcast operand: a single-channel a applies to every channel of b.
double broadcast_at(const Raster& a, std::size_t i, std::size_t channels) {
    return a.channels() == 1 ? a[i / channels] : a[i];
}

void require_broadcastable(const Raster& a, const Raster& b, const char* what) {
    require_same_extent(a, b, what);
    if (a.channels() != 1 && a.channels() != b.channels()) {
        throw ShapeError(std::string(what) + ": channel mismatch " + shape_of(a) + " vs " + shape_of(b));
    }
}

}  // namespace

Raster::Raster(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {
    if (!std::isfinite(fill)) throw std::invalid_argument("non-finite fill value");
}

Raster::Raster(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (data_.size() != height_ * width_ * channels_) {
        std::ostringstream os;
        os << "raster data length " << data_.size() << " does not match " << height_ << "x" << width_ << "x"
           << channels_;
        throw ShapeError(os.str());
    }
    require_finite(data_);
}

Raster Raster::channel(std::size_t c) const {
    if (c >= channels_) throw std::out_of_range("channel index out of range");
    Raster out(height_, width_, 1);
    for (std::size_t p = 0; p < pixels(); ++p) out[p] = data_[p * channels_ + c];
    return out;
}

Raster Raster::channel_mean() const {
    Raster out(height_, width_, 1);
    if (channels_ == 0) return out;
    for (std::size_t p = 0; p < pixels(); ++p) {
        double s = 0.0;
        for (std::size_t c = 0; c < channels_; ++c) s += data_[p * channels_ + c];
        out[p] = s / static_cast<double>(channels_);
    }
    return out;
}

MaskMap::MaskMap(std::size_t height, std::size_t width, double fill) : plane_(height, width, 1, fill) {}

MaskMap::MaskMap(std::size_t height, std::size_t width, std::vector<double> data)
    : plane_(height, width, 1, std::move(data)) {}

MaskMap::MaskMap(Raster plane) : plane_(std::move(plane)) {
    if (plane_.channels() != 1) throw ShapeError("mask requires a single-channel plane, got " + shape_of(plane_));
}

bool MaskMap::in_unit_range() const {
    return std::all_of(values().begin(), values().end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

MaskMap MaskMap::clamped() const { return MaskMap(clamp01(plane_)); }

MaskMap MaskMap::binarized(double threshold) const {
    MaskMap out(height(), width());
    for (std::size_t i = 0; i < size(); ++i) out[i] = plane_[i] >= threshold ? 1.0 : 0.0;
    return out;
}

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
    }
}

void require_same_extent(const Raster& a, const Raster& b, const char* what) {
    if (!a.same_extent(b)) {
        throw ShapeError(std::string(what) + ": extent mismatch " + shape_of(a) + " vs " + shape_of(b));
    }
}

void require_same_extent(const MaskMap& m, const Raster& r, const char* what) {
    require_same_extent(m.plane(), r, what);
}

void require_same_extent(const MaskMap& a, const MaskMap& b, const char* what) {
    require_same_extent(a.plane(), b.plane(), what);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Raster clamp01(const Raster& r) {
    Raster out = r;
    for (double& v : out.values()) v = clamp01(v);
    return out;
}

Raster hadamard(const MaskMap& a, const Raster& b) { return hadamard(a.plane(), b); }

Raster hadamard(const Raster& a, const Raster& b) {
    if (a.channels() != 1 && b.channels() == 1) return hadamard(b, a);
    require_broadcastable(a, b, "hadamard");
    Raster out = b;
    const std::size_t ch = b.channels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = broadcast_at(a, i, ch) * b[i];
    return out;
}

Raster add(const Raster& a, const Raster& b) {
    require_same_shape(a, b, "add");
    Raster out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Raster subtract(const Raster& a, const Raster& b) {
    require_same_shape(a, b, "subtract");
    Raster out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Raster scale(const Raster& a, double s) {
    Raster out = a;
    for (double& v : out.values()) v *= s;
    return out;
}

Raster axpy(const Raster& a, double s, const Raster& b) {
    require_same_shape(a, b, "axpy");
    Raster out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
    return out;
}

double dot(const Raster& a, const Raster& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(const Raster& a) { return dot(a, a); }

double max_abs(const Raster& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

Raster decompose_residual(const Raster& x, const MaskMap& m, const Raster& b) {
    require_same_extent(m, x, "decompose_residual");
    require_same_shape(x, b, "decompose_residual");
    Raster out = x;
    const std::size_t ch = x.channels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - x[i] * m[i / ch] - b[i];
    return out;
}

double fidelity_energy(const Raster& x, const MaskMap& m, const Raster& b) {
    return 0.5 * squared_norm(decompose_residual(x, m, b));
}

StageState StageState::initial(const Raster& y) {
    StageState s;
    s.stage_index = 0;
    s.mask = MaskMap(y.height(), y.width());
    s.background = Raster::zeros_like(y);
    s.inner_iterates = {y};
    s.quality_scores = {0.0};
    s.x_t1 = y;
    s.x_t2 = y;
    return s;
}

}  // namespace nun
