#pragma once

#include <cstddef>
#include <vector>

#include "nun/core.hpp"

// Spatial filters shared by the restoration, segmentation and scoring code.
// All of them treat channels independently unless stated otherwise and
// handle borders by truncating the window (equivalent to replicate padding
// for min/max, and constant-preserving for means).
namespace nun::filters {

/// Rec.601 luma for 3-channel rasters, the plane itself for 1 channel,
/// channel mean otherwise.
Raster luminance(const Raster& r);

/// Mean over a (2r+1)x(2r+1) window clipped to the image.
Raster box_mean(const Raster& r, int radius);

/// Separable Gaussian with radius ceil(3 sigma); sigma <= 0 is the identity.
Raster gaussian_blur(const Raster& r, double sigma);

/// Minimum over a window x window neighbourhood (window odd, >= 1).
Raster min_filter(const Raster& r, int window);

/// Per-pixel minimum over channels.
Raster channel_min(const Raster& r);

/// 4-neighbour Laplacian with replicated borders.
Raster laplacian(const Raster& r);

double mean(const Raster& r);
/// Population variance over every entry.
double variance(const Raster& r);
/// q in [0,1]; nearest-rank on the sorted values.
double percentile(const Raster& r, double q);

/// Edge-preserving guided filter: `guide` is a single plane, `input` is
/// filtered per channel. Constant inputs are returned unchanged.
Raster guided_filter(const Raster& guide, const Raster& input, int radius, double eps);

/// Isotropic total-variation denoising
///   argmin_u 1/2 ||u - f||^2 + sum_p w_p |grad u|_p
/// by a fixed number of projected-gradient steps on the dual. `weights` is
/// either empty (uniform `weight`) or a single plane multiplying `weight`.
Raster tv_denoise(const Raster& f, double weight, int iterations, const Raster* weights = nullptr);

/// Discrete isotropic total variation (forward differences, Neumann border).
double total_variation(const Raster& r);

/// Area-average downsampling by an integer factor followed by bilinear
/// upsampling back to the original size, with exact transposes of both
/// stages. Partial blocks at the bottom/right edge average what they cover.
class AreaBilinearResampler {
public:
    AreaBilinearResampler(std::size_t height, std::size_t width, int factor);

    std::size_t low_height() const { return low_h_; }
    std::size_t low_width() const { return low_w_; }

    Raster downsample(const Raster& hi) const;
    Raster downsample_adjoint(const Raster& lo) const;
    Raster upsample(const Raster& lo) const;
    Raster upsample_adjoint(const Raster& hi) const;

    /// upsample(downsample(x))
    Raster apply(const Raster& hi) const;
    /// downsample_adjoint(upsample_adjoint(v))
    Raster apply_adjoint(const Raster& hi) const;

private:
    struct Tap {
        std::size_t i0, i1;
        double w0, w1;
    };
    std::size_t h_, w_, low_h_, low_w_;
    int factor_;
    std::vector<Tap> row_taps_, col_taps_;
};

}  // namespace nun::filters
