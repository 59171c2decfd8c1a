#pragma once

#include <cstdint>

#include "nun/config.hpp"
#include "nun/core.hpp"

// Seeded synthetic degradations: low-light, haze, low resolution and their
// ordered composition. Every output is clamped to [0,1] and is a pure
// function of (input, parameters, seed).
namespace nun::degrade {

/// clamp(gain * x^gamma + n), n ~ N(0, noise_sigma^2) drawn from `seed`.
Raster apply_low_light(const Raster& x, double gamma, double gain, double noise_sigma, std::uint64_t seed);

/// x * t + airlight * (1 - t), t = exp(-beta * d(p)).
Raster apply_haze(const Raster& x, double airlight, double beta, DepthMode depth_mode);

/// Area-average down by `scale_factor`, bilinear back up to the input size.
Raster apply_low_resolution(const Raster& x, int scale_factor);

/// Applies a (possibly composite) spec; composite children run in order.
Raster apply_spec(const Raster& x, const DegradationSpec& spec);

/// Scene depth used by the haze model: 1 everywhere (constant) or
/// 0.5 + |p - center| / diagonal (radial). Single plane.
Raster depth_map(std::size_t height, std::size_t width, DepthMode mode);

/// Transmission exp(-beta * depth). Single plane.
Raster transmission_map(std::size_t height, std::size_t width, double beta, DepthMode mode);

/// Copy of `spec` whose leaf seeds are re-derived from (spec seed, run seed,
/// item index, position in the tree), so every dataset item gets its own
/// noise realisation.
DegradationSpec reseeded(const DegradationSpec& spec, std::uint64_t run_seed, std::uint64_t item_index);

}  // namespace nun::degrade
