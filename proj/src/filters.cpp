#include "nun/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nun::filters {

namespace {

using Index = std::ptrdiff_t;

Index clampi(Index v, Index lo, Index hi) { return std::min(std::max(v, lo), hi); }

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

Raster luminance(const Raster& r) {
    if (r.channels() == 1) return r;
    if (r.channels() != 3) return r.channel_mean();
    Raster out(r.height(), r.width(), 1);
    for (std::size_t p = 0; p < r.pixels(); ++p) {
        out[p] = 0.299 * r[3 * p] + 0.587 * r[3 * p + 1] + 0.114 * r[3 * p + 2];
    }
    return out;
}

Raster box_mean(const Raster& r, int radius) {
    if (radius < 0) throw std::invalid_argument("box_mean: negative radius");
    const Index h = static_cast<Index>(r.height()), w = static_cast<Index>(r.width());
    const std::size_t ch = r.channels();
    Raster out = Raster::zeros_like(r);
    std::vector<double> integral(static_cast<std::size_t>((h + 1) * (w + 1)));
    auto at = [w](Index y, Index x) { return static_cast<std::size_t>(y * (w + 1) + x); };
    for (std::size_t c = 0; c < ch; ++c) {
        std::fill(integral.begin(), integral.end(), 0.0);
        for (Index y = 0; y < h; ++y) {
            double row = 0.0;
            for (Index x = 0; x < w; ++x) {
                row += r(y, x, c);
                integral[at(y + 1, x + 1)] = integral[at(y, x + 1)] + row;
            }
        }
        for (Index y = 0; y < h; ++y) {
            const Index y0 = std::max<Index>(0, y - radius), y1 = std::min(h - 1, y + radius);
            for (Index x = 0; x < w; ++x) {
                const Index x0 = std::max<Index>(0, x - radius), x1 = std::min(w - 1, x + radius);
                const double sum = integral[at(y1 + 1, x1 + 1)] - integral[at(y0, x1 + 1)] -
                                   integral[at(y1 + 1, x0)] + integral[at(y0, x0)];
                out(y, x, c) = sum / static_cast<double>((y1 - y0 + 1) * (x1 - x0 + 1));
            }
        }
    }
    return out;
}

Raster gaussian_blur(const Raster& r, double sigma) {
    if (sigma <= 0.0) return r;
    const auto k = gaussian_kernel(sigma);
    const Index radius = static_cast<Index>(k.size() / 2);
    const Index h = static_cast<Index>(r.height()), w = static_cast<Index>(r.width());
    const std::size_t ch = r.channels();
    Raster tmp = Raster::zeros_like(r);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < ch; ++c) {
                double s = 0.0;
                for (Index i = -radius; i <= radius; ++i) s += k[i + radius] * r(y, clampi(x + i, 0, w - 1), c);
                tmp(y, x, c) = s;
            }
    Raster out = Raster::zeros_like(r);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < ch; ++c) {
                double s = 0.0;
                for (Index i = -radius; i <= radius; ++i) s += k[i + radius] * tmp(clampi(y + i, 0, h - 1), x, c);
                out(y, x, c) = s;
            }
    return out;
}

Raster min_filter(const Raster& r, int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("min_filter: window must be odd and >= 1");
    const Index radius = window / 2;
    const Index h = static_cast<Index>(r.height()), w = static_cast<Index>(r.width());
    const std::size_t ch = r.channels();
    Raster tmp = Raster::zeros_like(r);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < ch; ++c) {
                double m = r(y, x, c);
                for (Index i = std::max<Index>(0, x - radius); i <= std::min(w - 1, x + radius); ++i)
                    m = std::min(m, r(y, i, c));
                tmp(y, x, c) = m;
            }
    Raster out = Raster::zeros_like(r);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < ch; ++c) {
                double m = tmp(y, x, c);
                for (Index i = std::max<Index>(0, y - radius); i <= std::min(h - 1, y + radius); ++i)
                    m = std::min(m, tmp(i, x, c));
                out(y, x, c) = m;
            }
    return out;
}

Raster channel_min(const Raster& r) {
    Raster out(r.height(), r.width(), 1);
    const std::size_t ch = r.channels();
    for (std::size_t p = 0; p < r.pixels(); ++p) {
        double m = r[p * ch];
        for (std::size_t c = 1; c < ch; ++c) m = std::min(m, r[p * ch + c]);
        out[p] = m;
    }
    return out;
}

Raster laplacian(const Raster& r) {
    const Index h = static_cast<Index>(r.height()), w = static_cast<Index>(r.width());
    Raster out = Raster::zeros_like(r);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < r.channels(); ++c) {
                out(y, x, c) = r(clampi(y - 1, 0, h - 1), x, c) + r(clampi(y + 1, 0, h - 1), x, c) +
                               r(y, clampi(x - 1, 0, w - 1), c) + r(y, clampi(x + 1, 0, w - 1), c) -
                               4.0 * r(y, x, c);
            }
    return out;
}

double mean(const Raster& r) {
    if (r.empty()) return 0.0;
    double s = 0.0;
    for (double v : r.values()) s += v;
    return s / static_cast<double>(r.size());
}

double variance(const Raster& r) {
    if (r.empty()) return 0.0;
    const double m = mean(r);
    double s = 0.0;
    for (double v : r.values()) s += (v - m) * (v - m);
    return s / static_cast<double>(r.size());
}

double percentile(const Raster& r, double q) {
    if (r.empty()) return 0.0;
    std::vector<double> v(r.values().begin(), r.values().end());
    const auto idx = static_cast<std::size_t>(std::lround(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<Index>(idx), v.end());
    return v[idx];
}

Raster guided_filter(const Raster& guide, const Raster& input, int radius, double eps) {
    require_same_extent(guide, input, "guided_filter");
    if (guide.channels() != 1) throw ShapeError("guided_filter: guide must be a single plane");
    const Raster mean_i = box_mean(guide, radius);
    const Raster var_i = [&] {
        Raster sq = hadamard(guide, guide);
        Raster m2 = box_mean(sq, radius);
        for (std::size_t i = 0; i < m2.size(); ++i) m2[i] -= mean_i[i] * mean_i[i];
        return m2;
    }();
    Raster out = Raster::zeros_like(input);
    for (std::size_t c = 0; c < input.channels(); ++c) {
        const Raster p = input.channel(c);
        const Raster mean_p = box_mean(p, radius);
        const Raster mean_ip = box_mean(hadamard(guide, p), radius);
        Raster a(p.height(), p.width(), 1), b(p.height(), p.width(), 1);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double cov = mean_ip[i] - mean_i[i] * mean_p[i];
            a[i] = cov / (std::max(var_i[i], 0.0) + eps);
            b[i] = mean_p[i] - a[i] * mean_i[i];
        }
        const Raster ma = box_mean(a, radius), mb = box_mean(b, radius);
        for (std::size_t i = 0; i < p.size(); ++i) out[i * input.channels() + c] = ma[i] * guide[i] + mb[i];
    }
    return out;
}

Raster tv_denoise(const Raster& f, double weight, int iterations, const Raster* weights) {
    if (weight < 0.0) throw std::invalid_argument("tv_denoise: negative weight");
    if (weights != nullptr) {
        require_same_extent(*weights, f, "tv_denoise");
        if (weights->channels() != 1) throw ShapeError("tv_denoise: weight map must be a single plane");
    }
    if (weight == 0.0 || iterations <= 0) return f;
    constexpr double tau = 0.248;  // < 2 / ||grad||^2 = 1/4
    const Index h = static_cast<Index>(f.height()), w = static_cast<Index>(f.width());
    const std::size_t n = f.pixels();
    Raster out = f;
    std::vector<double> px(n), py(n), u(n);
    for (std::size_t c = 0; c < f.channels(); ++c) {
        std::fill(px.begin(), px.end(), 0.0);
        std::fill(py.begin(), py.end(), 0.0);
        auto div_at = [&](Index y, Index x) {
            const std::size_t i = static_cast<std::size_t>(y * w + x);
            double d = 0.0;
            if (x < w - 1) d += px[i];
            if (x > 0) d -= px[i - 1];
            if (y < h - 1) d += py[i];
            if (y > 0) d -= py[i - static_cast<std::size_t>(w)];
            return d;
        };
        for (int it = 0; it < iterations; ++it) {
            for (Index y = 0; y < h; ++y)
                for (Index x = 0; x < w; ++x) u[static_cast<std::size_t>(y * w + x)] = f(y, x, c) + div_at(y, x);
            for (Index y = 0; y < h; ++y)
                for (Index x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y * w + x);
                    const double gx = x < w - 1 ? u[i + 1] - u[i] : 0.0;
                    const double gy = y < h - 1 ? u[i + static_cast<std::size_t>(w)] - u[i] : 0.0;
                    const double nx = px[i] + tau * gx, ny = py[i] + tau * gy;
                    const double bound = weight * (weights ? (*weights)[i] : 1.0);
                    const double norm = std::sqrt(nx * nx + ny * ny);
                    const double s = norm > bound ? bound / norm : 1.0;
                    px[i] = nx * s;
                    py[i] = ny * s;
                }
        }
        for (Index y = 0; y < h; ++y)
            for (Index x = 0; x < w; ++x) out(y, x, c) = f(y, x, c) + div_at(y, x);
    }
    return out;
}

double total_variation(const Raster& r) {
    const std::size_t h = r.height(), w = r.width();
    double tv = 0.0;
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < r.channels(); ++c) {
                const double gx = x + 1 < w ? r(y, x + 1, c) - r(y, x, c) : 0.0;
                const double gy = y + 1 < h ? r(y + 1, x, c) - r(y, x, c) : 0.0;
                tv += std::sqrt(gx * gx + gy * gy);
            }
    return tv;
}

AreaBilinearResampler::AreaBilinearResampler(std::size_t height, std::size_t width, int factor)
    : h_(height), w_(width), factor_(factor) {
    if (factor < 1) throw std::invalid_argument("resampling factor must be >= 1");
    const auto s = static_cast<std::size_t>(factor);
    low_h_ = (h_ + s - 1) / s;
    low_w_ = (w_ + s - 1) / s;
    auto taps = [s](std::size_t n_hi, std::size_t n_lo) {
        std::vector<Tap> t(n_hi);
        for (std::size_t i = 0; i < n_hi; ++i) {
            double src = (static_cast<double>(i) + 0.5) / static_cast<double>(s) - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(n_lo - 1));
            const auto i0 = static_cast<std::size_t>(std::floor(src));
            const std::size_t i1 = std::min(i0 + 1, n_lo - 1);
            const double frac = src - static_cast<double>(i0);
            t[i] = Tap{i0, i1, 1.0 - frac, frac};
        }
        return t;
    };
    if (h_ > 0 && w_ > 0) {
        row_taps_ = taps(h_, low_h_);
        col_taps_ = taps(w_, low_w_);
    }
}

Raster AreaBilinearResampler::downsample(const Raster& hi) const {
    if (hi.height() != h_ || hi.width() != w_) throw ShapeError("downsample: unexpected input size");
    const auto s = static_cast<std::size_t>(factor_);
    const std::size_t ch = hi.channels();
    Raster lo(low_h_, low_w_, ch);
    for (std::size_t i = 0; i < low_h_; ++i)
        for (std::size_t j = 0; j < low_w_; ++j) {
            const std::size_t y1 = std::min(h_, (i + 1) * s), x1 = std::min(w_, (j + 1) * s);
            const double inv = 1.0 / static_cast<double>((y1 - i * s) * (x1 - j * s));
            for (std::size_t c = 0; c < ch; ++c) {
                double sum = 0.0;
                for (std::size_t y = i * s; y < y1; ++y)
                    for (std::size_t x = j * s; x < x1; ++x) sum += hi(y, x, c);
                lo(i, j, c) = sum * inv;
            }
        }
    return lo;
}

Raster AreaBilinearResampler::downsample_adjoint(const Raster& lo) const {
    if (lo.height() != low_h_ || lo.width() != low_w_) throw ShapeError("downsample_adjoint: unexpected input size");
    const auto s = static_cast<std::size_t>(factor_);
    const std::size_t ch = lo.channels();
    Raster hi(h_, w_, ch);
    for (std::size_t i = 0; i < low_h_; ++i)
        for (std::size_t j = 0; j < low_w_; ++j) {
            const std::size_t y1 = std::min(h_, (i + 1) * s), x1 = std::min(w_, (j + 1) * s);
            const double inv = 1.0 / static_cast<double>((y1 - i * s) * (x1 - j * s));
            for (std::size_t y = i * s; y < y1; ++y)
                for (std::size_t x = j * s; x < x1; ++x)
                    for (std::size_t c = 0; c < ch; ++c) hi(y, x, c) = lo(i, j, c) * inv;
        }
    return hi;
}

Raster AreaBilinearResampler::upsample(const Raster& lo) const {
    if (lo.height() != low_h_ || lo.width() != low_w_) throw ShapeError("upsample: unexpected input size");
    const std::size_t ch = lo.channels();
    Raster hi(h_, w_, ch);
    for (std::size_t y = 0; y < h_; ++y) {
        const Tap& ty = row_taps_[y];
        for (std::size_t x = 0; x < w_; ++x) {
            const Tap& tx = col_taps_[x];
            for (std::size_t c = 0; c < ch; ++c) {
                hi(y, x, c) = ty.w0 * (tx.w0 * lo(ty.i0, tx.i0, c) + tx.w1 * lo(ty.i0, tx.i1, c)) +
                              ty.w1 * (tx.w0 * lo(ty.i1, tx.i0, c) + tx.w1 * lo(ty.i1, tx.i1, c));
            }
        }
    }
    return hi;
}

Raster AreaBilinearResampler::upsample_adjoint(const Raster& hi) const {
    if (hi.height() != h_ || hi.width() != w_) throw ShapeError("upsample_adjoint: unexpected input size");
    const std::size_t ch = hi.channels();
    Raster lo(low_h_, low_w_, ch);
    for (std::size_t y = 0; y < h_; ++y) {
        const Tap& ty = row_taps_[y];
        for (std::size_t x = 0; x < w_; ++x) {
            const Tap& tx = col_taps_[x];
            for (std::size_t c = 0; c < ch; ++c) {
                const double v = hi(y, x, c);
                lo(ty.i0, tx.i0, c) += ty.w0 * tx.w0 * v;
                lo(ty.i0, tx.i1, c) += ty.w0 * tx.w1 * v;
                lo(ty.i1, tx.i0, c) += ty.w1 * tx.w0 * v;
                lo(ty.i1, tx.i1, c) += ty.w1 * tx.w1 * v;
            }
        }
    }
    return lo;
}

Raster AreaBilinearResampler::apply(const Raster& hi) const { return upsample(downsample(hi)); }

Raster AreaBilinearResampler::apply_adjoint(const Raster& hi) const {
    return downsample_adjoint(upsample_adjoint(hi));
}

}  // namespace nun::filters
