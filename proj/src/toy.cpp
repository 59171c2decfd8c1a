#include "nun/toy.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "nun/filters.hpp"

namespace nun::toy {

namespace {

struct Grating {
    double fy, fx, phase, amp;
};

// Band-limited texture in [0,1]: a few random gratings plus smoothed noise.
Raster texture(std::mt19937_64& rng, std::size_t size, double base_freq) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<Grating, 4> g{};
    for (auto& gr : g) {
        const double angle = u(rng) * std::numbers::pi;
        const double freq = base_freq * (0.5 + u(rng));
        gr = Grating{freq * std::sin(angle), freq * std::cos(angle), u(rng) * 2.0 * std::numbers::pi, 0.5 + u(rng)};
    }
    Raster noise(size, size, 1);
    for (double& v : noise.values()) v = u(rng) - 0.5;
    noise = filters::gaussian_blur(noise, 1.0);
    Raster out(size, size, 1);
    double lo = 1e9, hi = -1e9;
    for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
            double v = 2.0 * noise(y, x);
            for (const auto& gr : g) v += gr.amp * std::sin(gr.fy * static_cast<double>(y) + gr.fx * static_cast<double>(x) + gr.phase);
            out(y, x) = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    for (double& v : out.values()) v = (v - lo) / (hi - lo);
    return out;
}

}  // namespace

Sample make_sample(std::uint64_t seed, std::size_t size, std::string id) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = static_cast<double>(size);

    const Raster bg_tex = texture(rng, size, 0.35);
    const Raster fg_tex = texture(rng, size, 0.6);
    std::array<double, 3> bg_tint{}, fg_tint{};
    for (std::size_t c = 0; c < 3; ++c) {
        bg_tint[c] = 0.85 + 0.3 * u(rng);
        fg_tint[c] = 0.85 + 0.3 * u(rng);
    }
    const double bg_lo = 0.10 + 0.08 * u(rng), bg_span = 0.30;
    const double fg_lo = 0.45 + 0.10 * u(rng), fg_span = 0.40;

    const double cy = s * (0.35 + 0.3 * u(rng)), cx = s * (0.35 + 0.3 * u(rng));
    const double ry = s * (0.15 + 0.12 * u(rng)), rx = s * (0.15 + 0.12 * u(rng));
    const double theta = u(rng) * std::numbers::pi;
    const double ct = std::cos(theta), st = std::sin(theta);

    Sample out;
    out.id = id;
    out.clean = Raster(size, size, 3);
    out.mask = MaskMap(size, size);
    for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
            const double dy = static_cast<double>(y) + 0.5 - cy, dx = static_cast<double>(x) + 0.5 - cx;
            const double a = (ct * dx + st * dy) / rx, b = (-st * dx + ct * dy) / ry;
            const bool inside = a * a + b * b <= 1.0;
            out.mask(y, x) = inside ? 1.0 : 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = inside ? (fg_lo + fg_span * fg_tex(y, x)) * fg_tint[c]
                                        : (bg_lo + bg_span * bg_tex(y, x)) * bg_tint[c];
                out.clean(y, x, c) = clamp01(v);
            }
        }
    return out;
}

std::vector<Sample> make_set(std::size_t count, std::uint64_t seed, std::size_t size) {
    std::vector<Sample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "toy_%03zu", i);
        out.push_back(make_sample(seed * 1000003ULL + i, size, id));
    }
    return out;
}

}  // namespace nun::toy
