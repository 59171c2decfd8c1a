#include "support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nun/app.hpp"
#include "nun/degrade.hpp"
#include "nun/io.hpp"
#include "nun/toy.hpp"
#include "scalar_oracle.hpp"

namespace support {

namespace {

// Input bytes for the 2x2 reference image, row-major RGB.
constexpr std::uint8_t kPixels[4][3] = {{40, 200, 120}, {220, 30, 90}, {10, 60, 250}, {180, 180, 20}};

}  // namespace

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nun_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<double> values_of(const nun::Raster& r) { return {r.values().begin(), r.values().end()}; }
std::vector<double> values_of(const nun::MaskMap& m) { return {m.values().begin(), m.values().end()}; }

nun::Raster random_raster(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    nun::Raster r(h, w, c);
    for (double& v : r.values()) v = u(rng);
    return r;
}

nun::MaskMap random_mask(std::mt19937_64& rng, std::size_t h, std::size_t w, double lo, double hi) {
    return nun::MaskMap(random_raster(rng, h, w, 1, lo, hi));
}

nun::MaskMap random_binary_mask(std::mt19937_64& rng, std::size_t h, std::size_t w) {
    std::bernoulli_distribution b(0.5);
    nun::MaskMap m(h, w);
    for (double& v : m.values()) v = b(rng) ? 1.0 : 0.0;
    return m;
}

nun::RunConfig oracle_config(int stages, int inner) {
    nun::RunConfig cfg;
    cfg.stages = stages;
    cfg.n_schedule = {inner};
    cfg.ablation = nun::Ablation::bui;
    cfg.degrade = nun::DegradationSpec::haze(1.0, std::log(2.0), nun::DepthMode::constant);
    cfg.derun.operator_source = nun::OperatorSource::oracle;
    cfg.derun.alpha_x = 1.0;
    cfg.derun.prox.kind = nun::RestoreProxKind::identity;
    cfg.derun.cue_weight = 0.0;
    cfg.sodun.alpha_m = 0.5;
    cfg.sodun.alpha_b = 0.5;
    cfg.sodun.mask_prox.kind = nun::MaskProxKind::clamp_only;
    cfg.sodun.background_prox.kind = nun::BackgroundProxKind::identity;
    return cfg;
}

std::string compare_with_reference(int stages, int inner, const fs::path& work) {
    fs::create_directories(work);
    nun::Raster y(2, 2, 3);
    oracle::Img y_ref{};
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < 3; ++c) {
            y[static_cast<std::size_t>(i * 3 + c)] = kPixels[i][c] / 255.0;
            y_ref[i][c] = kPixels[i][c] / 255.0;
        }
    nun::io::write_png(work / "in.png", y);

    nun::app::DatasetManifest m;
    m.root = work;
    m.entries.push_back({"px", "in.png", std::nullopt, std::nullopt});
    const fs::path out = work / "out";
    const auto report = nun::app::cmd_segment(m, oracle_config(stages, inner), out, {1, true});
    if (!report.ok()) return "cmd_segment failed: " + report.failures.front();

    oracle::Params p;
    p.t = std::exp(-std::log(2.0));
    p.airlight = 1.0;
    p.alpha_m = 0.5;
    p.alpha_b = 0.5;
    p.alpha_x = 1.0;
    p.stages = stages;
    p.inner = inner;
    const oracle::Result ref = oracle::run(y_ref, p);

    const nun::Raster mask_raw = nun::io::read_raw(out / "raw" / "px_mask.nunr");
    const nun::Raster x_raw = nun::io::read_raw(out / "raw" / "px_restored.nunr");
    const nun::Raster mask_png = nun::io::read_png(out / "masks" / "px.png");
    const nun::Raster soft_png = nun::io::read_png(out / "masks_soft" / "px.png");
    const nun::Raster x_png = nun::io::read_png(out / "restored" / "px.png");
    std::ostringstream err;
    for (int i = 0; i < 4; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        if (mask_raw[iu] != static_cast<double>(static_cast<float>(ref.mask[i]))) {
            err << "raw mask[" << i << "] " << mask_raw[iu] << " vs " << ref.mask[i];
            return err.str();
        }
        const double bin = ref.mask[i] >= 0.5 ? 1.0 : 0.0;
        if (mask_png[iu] != bin) {
            err << "binary mask[" << i << "] " << mask_png[iu] << " vs " << bin;
            return err.str();
        }
        if (std::lround(soft_png[iu] * 255.0) != std::lround(ref.mask[i] * 255.0)) {
            err << "soft mask[" << i << "]";
            return err.str();
        }
        for (int c = 0; c < 3; ++c) {
            const auto j = static_cast<std::size_t>(i * 3 + c);
            if (x_raw[j] != static_cast<double>(static_cast<float>(ref.restored[i][c]))) {
                err << "raw restored[" << i << "," << c << "] " << x_raw[j] << " vs " << ref.restored[i][c];
                return err.str();
            }
            if (std::lround(x_png[j] * 255.0) != std::lround(ref.restored[i][c] * 255.0)) {
                err << "png restored[" << i << "," << c << "]";
                return err.str();
            }
        }
    }
    return {};
}

std::vector<ToyItem> degraded_toy_set(std::size_t count, std::size_t size, const nun::DegradationSpec& spec,
                                      std::uint64_t seed) {
    std::vector<ToyItem> out;
    std::size_t i = 0;
    for (auto& s : nun::toy::make_set(count, seed, size)) {
        ToyItem item{s.id, s.clean, s.mask, nun::degrade::apply_spec(s.clean, nun::degrade::reseeded(spec, seed, i++))};
        out.push_back(std::move(item));
    }
    return out;
}

fs::path write_toy_dataset(const std::vector<ToyItem>& items, const fs::path& dir) {
    fs::create_directories(dir);
    nun::app::DatasetManifest m;
    m.root = dir;
    for (const auto& it : items) {
        nun::io::write_png(dir / (it.id + ".png"), it.degraded);
        nun::io::write_png(dir / (it.id + "_clean.png"), it.clean);
        nun::io::write_mask_png(dir / (it.id + "_mask.png"), it.mask);
        m.entries.push_back({it.id, it.id + ".png", it.id + "_mask.png", it.id + "_clean.png"});
    }
    m.save(dir / "manifest.json");
    return dir / "manifest.json";
}

}  // namespace support
