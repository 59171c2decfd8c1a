#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nun {

/// Thrown when two operands of an elementwise operation disagree in shape.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense H x W x C grid of doubles, row-major with interleaved channels.
/// Nominal range is [0,1]; every constructor rejects NaN/Inf.
class Raster {
public:
    Raster() = default;
    Raster(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
    Raster(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t pixels() const { return height_ * width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t y, std::size_t x, std::size_t c = 0) const {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double& operator()(std::size_t y, std::size_t x, std::size_t c = 0) {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    bool same_shape(const Raster& other) const {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }
    bool same_extent(const Raster& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    /// Extracts channel c as a single-channel raster.
    Raster channel(std::size_t c) const;
    /// Per-pixel mean over channels.
    Raster channel_mean() const;

    static Raster zeros_like(const Raster& r) { return Raster(r.height(), r.width(), r.channels()); }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

/// Single-plane soft mask. Proximal steps keep it in [0,1]; intermediate
/// gradient iterates may leave that range and are only required to be finite.
class MaskMap {
public:
    MaskMap() = default;
    MaskMap(std::size_t height, std::size_t width, double fill = 0.0);
    MaskMap(std::size_t height, std::size_t width, std::vector<double> data);
    explicit MaskMap(Raster plane);

    std::size_t height() const { return plane_.height(); }
    std::size_t width() const { return plane_.width(); }
    std::size_t size() const { return plane_.size(); }

    double operator()(std::size_t y, std::size_t x) const { return plane_(y, x); }
    double& operator()(std::size_t y, std::size_t x) { return plane_(y, x); }
    double operator[](std::size_t i) const { return plane_[i]; }
    double& operator[](std::size_t i) { return plane_[i]; }

    std::span<const double> values() const { return plane_.values(); }
    std::span<double> values() { return plane_.values(); }

    const Raster& plane() const { return plane_; }

    bool in_unit_range() const;
    MaskMap clamped() const;
    /// 1 where value >= threshold, else 0.
    MaskMap binarized(double threshold) const;

    friend bool operator==(const MaskMap&, const MaskMap&) = default;

private:
    Raster plane_;
};

void require_same_shape(const Raster& a, const Raster& b, const char* what);
void require_same_extent(const Raster& a, const Raster& b, const char* what);
void require_same_extent(const MaskMap& m, const Raster& r, const char* what);
void require_same_extent(const MaskMap& a, const MaskMap& b, const char* what);

double clamp01(double v);
Raster clamp01(const Raster& r);

// Elementwise algebra. A single-channel operand broadcasts over channels.
Raster hadamard(const MaskMap& a, const Raster& b);
Raster hadamard(const Raster& a, const Raster& b);
Raster add(const Raster& a, const Raster& b);
Raster subtract(const Raster& a, const Raster& b);
Raster scale(const Raster& a, double s);
/// a + s * b
Raster axpy(const Raster& a, double s, const Raster& b);
double dot(const Raster& a, const Raster& b);
double squared_norm(const Raster& a);
double max_abs(const Raster& a);

/// X - X.M - B
Raster decompose_residual(const Raster& x, const MaskMap& m, const Raster& b);

/// 1/2 ||X - X.M - B||^2 summed over every entry.
double fidelity_energy(const Raster& x, const MaskMap& m, const Raster& b);

}  // namespace nun
