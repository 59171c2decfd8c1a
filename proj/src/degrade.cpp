#include "nun/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nun/filters.hpp"

namespace nun::degrade {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

DegradationSpec reseed_walk(const DegradationSpec& spec, std::uint64_t base, std::uint64_t& counter) {
    DegradationSpec out = spec;
    out.seed = splitmix64(base ^ splitmix64(spec.seed + 0x51ed270b27a2f1c3ULL * ++counter));
    for (auto& child : out.children) child = reseed_walk(child, base, counter);
    return out;
}

}  // namespace

Raster apply_low_light(const Raster& x, double gamma, double gain, double noise_sigma, std::uint64_t seed) {
    DegradationSpec::low_light(gamma, gain, noise_sigma, seed).validate();
    Raster out = x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    for (double& v : out.values()) {
        double d = gain * std::pow(std::max(v, 0.0), gamma);
        if (noise_sigma > 0.0) d += noise(rng);
        v = clamp01(d);
    }
    return out;
}

Raster depth_map(std::size_t height, std::size_t width, DepthMode mode) {
    Raster d(height, width, 1, 1.0);
    if (mode == DepthMode::constant) return d;
    const double cy = (static_cast<double>(height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(width) - 1.0) / 2.0;
    const double diag = std::hypot(static_cast<double>(height), static_cast<double>(width));
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            d(y, x) = 0.5 + std::hypot(static_cast<double>(y) - cy, static_cast<double>(x) - cx) / diag;
    return d;
}

Raster transmission_map(std::size_t height, std::size_t width, double beta, DepthMode mode) {
    Raster t = depth_map(height, width, mode);
    for (double& v : t.values()) v = std::exp(-beta * v);
    return t;
}

Raster apply_haze(const Raster& x, double airlight, double beta, DepthMode depth_mode) {
    DegradationSpec::haze(airlight, beta, depth_mode).validate();
    const Raster t = transmission_map(x.height(), x.width(), beta, depth_mode);
    Raster out = x;
    const std::size_t ch = x.channels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ti = t[i / ch];
        out[i] = clamp01(x[i] * ti + airlight * (1.0 - ti));
    }
    return out;
}

Raster apply_low_resolution(const Raster& x, int scale_factor) {
    DegradationSpec::low_resolution(scale_factor).validate();
    if (scale_factor == 1) return clamp01(x);
    const filters::AreaBilinearResampler resampler(x.height(), x.width(), scale_factor);
    return clamp01(resampler.apply(x));
}

Raster apply_spec(const Raster& x, const DegradationSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case DegradationKind::low_light:
            return apply_low_light(x, spec.gamma, spec.gain, spec.noise_sigma, spec.seed);
        case DegradationKind::haze:
            return apply_haze(x, spec.airlight, spec.beta, spec.depth_mode);
        case DegradationKind::low_resolution:
            return apply_low_resolution(x, spec.scale_factor);
        case DegradationKind::composite: {
            Raster out = x;
            for (const auto& child : spec.children) out = apply_spec(out, child);
            return out;
        }
    }
    return x;
}

DegradationSpec reseeded(const DegradationSpec& spec, std::uint64_t run_seed, std::uint64_t item_index) {
    std::uint64_t counter = 0;
    return reseed_walk(spec, splitmix64(run_seed) ^ splitmix64(~item_index), counter);
}

}  // namespace nun::degrade
