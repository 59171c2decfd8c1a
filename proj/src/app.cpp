#include "nun/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nun/config_io.hpp"
#include "nun/degrade.hpp"
#include "nun/io.hpp"
#include "nun/toy.hpp"

namespace nun::app {

using nlohmann::json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    };
    if (workers == 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io::IoError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw io::IoError("write failed for " + path.string());
}

std::size_t column_index(const std::string& name) {
    const auto it = std::find(kMetricColumns.begin(), kMetricColumns.end(), name);
    if (it == kMetricColumns.end()) throw std::out_of_range("unknown metric column " + name);
    return static_cast<std::size_t>(it - kMetricColumns.begin());
}

ReportRow empty_row(std::string id) {
    ReportRow row;
    row.id = std::move(id);
    row.values.assign(kMetricColumns.size(), std::nullopt);
    return row;
}

void set(ReportRow& row, const std::string& column, double v) { row.values[column_index(column)] = v; }

fs::path relative_if_possible(const fs::path& p, const fs::path& base) {
    std::error_code ec;
    const fs::path abs = fs::absolute(p, ec);
    const fs::path rel = fs::relative(abs, fs::absolute(base), ec);
    if (ec || rel.empty() || *rel.begin() == "..") return abs.lexically_normal();
    return rel;
}

struct Loaded {
    Raster image;
    std::optional<MaskMap> mask;
    std::optional<Raster> clean;
};

Loaded load_entry(const DatasetManifest& manifest, const ManifestEntry& e) {
    Loaded l;
    l.image = io::read_png(manifest.resolve(e.image));
    if (e.mask) {
        l.mask = io::read_mask_png(manifest.resolve(*e.mask));
        require_same_extent(*l.mask, l.image, "mask vs image");
    }
    if (e.clean) {
        l.clean = io::read_png(manifest.resolve(*e.clean));
        if (l.clean->channels() != l.image.channels()) {
            throw ShapeError("clean image channel count differs from the input image");
        }
        require_same_extent(*l.clean, l.image, "clean vs image");
    }
    return l;
}

struct ItemOutcome {
    std::optional<ReportRow> row;
    std::string error;
    std::string csc_lines;
};

ItemOutcome run_item(const DatasetManifest& manifest, const ManifestEntry& e, const RunConfig& cfg,
                     const fs::path* out_dir, const RunOptions& opts) {
    ItemOutcome out;
    try {
        const Loaded l = load_entry(manifest, e);
        const bui::DualTrace trace = bui::run_dual_pipeline(l.image, cfg);
        out.row = metrics_row(e.id, trace, l.mask ? &*l.mask : nullptr, l.clean ? &*l.clean : nullptr, cfg);
        std::ostringstream csc;
        for (std::size_t k = 0; k < trace.primary.size(); ++k) {
            csc << e.id << "," << (k + 1) << "," << format_value(trace.csc_terms[k].wbce) << ","
                << format_value(trace.csc_terms[k].wiou) << "," << format_value(trace.csc_per_stage[k]) << "\n";
        }
        out.csc_lines = csc.str();
        if (out_dir) {
            const StageState& last = trace.final_stage();
            io::write_mask_png(*out_dir / "masks" / (e.id + ".png"), last.mask.binarized(cfg.binarize_threshold));
            io::write_mask_png(*out_dir / "masks_soft" / (e.id + ".png"), last.mask);
            io::write_png(*out_dir / "restored" / (e.id + ".png"), last.x_t1);
            if (opts.save_raw) {
                io::write_raw(*out_dir / "raw" / (e.id + "_mask.nunr"), last.mask.plane());
                io::write_raw(*out_dir / "raw" / (e.id + "_restored.nunr"), last.x_t1);
            }
        }
    } catch (const std::exception& ex) {
        out.row.reset();
        out.error = e.id + ": " + ex.what();
    }
    return out;
}

RunReport run_all(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path* out_dir,
                  const RunOptions& opts, std::string* csc_csv) {
    std::vector<ItemOutcome> outcomes(manifest.entries.size());
    parallel_for(outcomes.size(), opts.threads,
                 [&](std::size_t i) { outcomes[i] = run_item(manifest, manifest.entries[i], cfg, out_dir, opts); });
    RunReport report;
    for (auto& o : outcomes) {
        if (o.row) report.rows.push_back(std::move(*o.row));
        if (!o.error.empty()) report.failures.push_back(o.error);
        if (csc_csv) *csc_csv += o.csc_lines;
    }
    return report;
}

void print_failures(const RunReport& r) {
    for (const auto& f : r.failures) std::fprintf(stderr, "error: %s\n", f.c_str());
}

}  // namespace

// ---------------------------------------------------------------------------
// manifest
// ---------------------------------------------------------------------------

DatasetManifest DatasetManifest::load(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw io::IoError("cannot open manifest " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    const fs::path root = j.value("root", std::string("."));
    m.root = fs::absolute(root.is_absolute() ? root : base / root).lexically_normal();
    m.split = j.value("split", std::string());
    for (const auto& item : j.at("entries")) {
        ManifestEntry e;
        e.image = item.at("image").get<std::string>();
        e.id = item.value("id", e.image.stem().string());
        if (item.contains("mask") && !item["mask"].is_null()) e.mask = fs::path(item["mask"].get<std::string>());
        if (item.contains("clean") && !item["clean"].is_null()) e.clean = fs::path(item["clean"].get<std::string>());
        m.entries.push_back(std::move(e));
    }
    return m;
}

void DatasetManifest::save(const fs::path& path) const {
    const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    json j;
    j["root"] = ".";
    j["split"] = split;
    j["entries"] = json::array();
    for (const auto& e : entries) {
        json item{{"id", e.id}, {"image", relative_if_possible(resolve(e.image), base).generic_string()}};
        if (e.mask) item["mask"] = relative_if_possible(resolve(*e.mask), base).generic_string();
        if (e.clean) item["clean"] = relative_if_possible(resolve(*e.clean), base).generic_string();
        j["entries"].push_back(item);
    }
    write_text(path, j.dump(2) + "\n");
}

void DatasetManifest::validate() const {
    for (const auto& e : entries) {
        for (const auto* p : {&e.image, e.mask ? &*e.mask : nullptr, e.clean ? &*e.clean : nullptr}) {
            if (p && !fs::exists(resolve(*p))) throw io::IoError(e.id + ": missing file " + resolve(*p).string());
        }
    }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

std::optional<double> ReportRow::get(const std::string& column) const { return values.at(column_index(column)); }

std::vector<ReportRow> RunReport::aggregate() const {
    std::vector<std::string> configs;
    for (const auto& r : rows) {
        if (std::find(configs.begin(), configs.end(), r.config) == configs.end()) configs.push_back(r.config);
    }
    if (configs.empty()) configs.push_back("");
    std::vector<ReportRow> out;
    for (const auto& cfg : configs) {
        ReportRow agg = empty_row("mean");
        agg.config = cfg;
        for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                if (r.config == cfg && r.values[c]) {
                    sum += *r.values[c];
                    ++n;
                }
            }
            if (n) agg.values[c] = sum / static_cast<double>(n);
        }
        out.push_back(std::move(agg));
    }
    return out;
}

std::string RunReport::to_csv(bool with_config_column) const {
    std::ostringstream os;
    if (with_config_column) os << "config,";
    os << "id";
    for (const auto& c : kMetricColumns) os << "," << c;
    os << "\n";
    auto emit = [&](const ReportRow& r) {
        if (with_config_column) os << r.config << ",";
        os << r.id;
        for (const auto& v : r.values) {
            os << ",";
            if (v) os << format_value(*v);
        }
        os << "\n";
    };
    for (const auto& r : rows) emit(r);
    for (const auto& r : aggregate()) emit(r);
    return os.str();
}

ReportRow metrics_row(const std::string& id, const bui::DualTrace& trace, const MaskMap* gt, const Raster* clean,
                      const RunConfig& cfg) {
    ReportRow row = empty_row(id);
    const StageState& last = trace.final_stage();
    if (gt) {
        const MaskMap w = metrics::boundary_weight_map(*gt, cfg.metrics.weight_radius, cfg.metrics.weight_gain);
        set(row, "mae", metrics::mae(last.mask, *gt));
        set(row, "f_beta", metrics::f_beta(last.mask, *gt, cfg.metrics.beta2));
        set(row, "m_iou", metrics::m_iou(last.mask, *gt, cfg.binarize_threshold));
        set(row, "m_dice", metrics::m_dice(last.mask, *gt, cfg.binarize_threshold));
        set(row, "wbce", metrics::weighted_bce(last.mask, *gt, w));
        set(row, "wiou", metrics::weighted_iou_loss(last.mask, *gt, w));
    }
    if (clean) set(row, "psnr", metrics::psnr(last.x_t1, *clean));
    set(row, "l_csc", trace.l_csc);
    if (gt && clean) {
        const auto losses = metrics::with_consistency(metrics::l_basic(trace.primary, *gt, *clean, cfg.metrics),
                                                      trace.l_csc, cfg.metrics.epsilon);
        set(row, "l_basic", losses.l_basic);
        set(row, "l_total", losses.l_total);
    }
    return row;
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

RunReport cmd_degrade(const DatasetManifest& manifest, const DegradationSpec& spec, std::uint64_t seed,
                      const fs::path& out_dir, const RunOptions& opts) {
    spec.validate();
    fs::create_directories(out_dir);
    const std::size_t n = manifest.entries.size();
    std::vector<std::string> errors(n);
    std::vector<json> provenance(n);
    std::vector<double> psnr(n, 0.0);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        try {
            const Raster x = io::read_png(manifest.resolve(e.image));
            const DegradationSpec item_spec = degrade::reseeded(spec, seed, i);
            const Raster y = degrade::apply_spec(x, item_spec);
            io::write_png(out_dir / (e.id + ".png"), y);
            psnr[i] = metrics::psnr(io::read_png(out_dir / (e.id + ".png")), x);
            provenance[i] = json{{"id", e.id},
                                 {"source", manifest.resolve(e.image).generic_string()},
                                 {"output", e.id + ".png"},
                                 {"run_seed", seed},
                                 {"index", i},
                                 {"spec", config_io::to_json(item_spec)}};
        } catch (const std::exception& ex) {
            errors[i] = e.id + ": " + ex.what();
        }
    });

    RunReport report;
    DatasetManifest generated;
    generated.root = fs::absolute(out_dir);
    generated.split = manifest.split;
    json prov = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            report.failures.push_back(errors[i]);
            continue;
        }
        const ManifestEntry& e = manifest.entries[i];
        ReportRow row = empty_row(e.id);
        set(row, "psnr", psnr[i]);
        report.rows.push_back(std::move(row));
        ManifestEntry g{e.id, e.id + ".png", std::nullopt, fs::absolute(manifest.resolve(e.image))};
        if (e.mask) g.mask = fs::absolute(manifest.resolve(*e.mask));
        generated.entries.push_back(std::move(g));
        prov.push_back(provenance[i]);
    }
    write_text(out_dir / "provenance.json", json{{"spec", config_io::to_json(spec)}, {"seed", seed}, {"items", prov}}.dump(2) + "\n");
    generated.save(out_dir / "manifest.json");
    write_text(out_dir / "report.csv", report.to_csv(false));
    print_failures(report);
    return report;
}

RunReport cmd_segment(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path& out_dir,
                      const RunOptions& opts) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    for (const char* sub : {"masks", "masks_soft", "restored"}) fs::create_directories(out_dir / sub);
    if (opts.save_raw) fs::create_directories(out_dir / "raw");

    std::string csc = "id,stage,wbce,wiou,weighted\n";
    RunReport report = run_all(manifest, cfg, &out_dir, opts, &csc);
    write_text(out_dir / "report.csv", report.to_csv(false));
    write_text(out_dir / "csc.csv", csc);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json info{{"config", config_io::to_json(cfg)},
                    {"seed", cfg.seed},
                    {"threads", opts.threads},
                    {"items", manifest.entries.size()},
                    {"failures", report.failures},
                    {"wall_time_seconds", wall}};
    write_text(out_dir / "run_info.json", info.dump(2) + "\n");
    print_failures(report);
    return report;
}

RunReport cmd_eval(const fs::path& pred_dir, const DatasetManifest& gt_manifest, const RunConfig& cfg) {
    std::map<std::string, fs::path> preds;
    for (const auto& de : fs::directory_iterator(pred_dir)) {
        if (de.is_regular_file() && de.path().extension() == ".png") preds[de.path().stem().string()] = de.path();
    }
    RunReport report;
    for (const auto& e : gt_manifest.entries) {
        const auto it = preds.find(e.id);
        if (it == preds.end()) {
            report.failures.push_back(e.id + ": no prediction in " + pred_dir.string());
            continue;
        }
        const fs::path pred_path = it->second;
        preds.erase(it);
        if (!e.mask) {
            report.failures.push_back(e.id + ": manifest entry has no ground-truth mask");
            continue;
        }
        try {
            const MaskMap pred = io::read_mask_png(pred_path);
            const MaskMap gt = io::read_mask_png(gt_manifest.resolve(*e.mask));
            require_same_extent(pred, gt, "prediction vs ground truth");
            const MaskMap w = metrics::boundary_weight_map(gt, cfg.metrics.weight_radius, cfg.metrics.weight_gain);
            ReportRow row = empty_row(e.id);
            set(row, "mae", metrics::mae(pred, gt));
            set(row, "f_beta", metrics::f_beta(pred, gt, cfg.metrics.beta2));
            set(row, "m_iou", metrics::m_iou(pred, gt, cfg.binarize_threshold));
            set(row, "m_dice", metrics::m_dice(pred, gt, cfg.binarize_threshold));
            set(row, "wbce", metrics::weighted_bce(pred, gt, w));
            set(row, "wiou", metrics::weighted_iou_loss(pred, gt, w));
            report.rows.push_back(std::move(row));
        } catch (const std::exception& ex) {
            report.failures.push_back(e.id + ": " + ex.what());
        }
    }
    for (const auto& [stem, path] : preds) report.failures.push_back(stem + ": prediction has no ground truth");
    print_failures(report);
    return report;
}

RunReport cmd_ablate(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path& out_dir,
                     const RunOptions& opts) {
    cfg.validate();
    fs::create_directories(out_dir);
    RunReport combined;
    for (Ablation a : {Ablation::sodun_minus, Ablation::sodun, Ablation::derun, Ablation::bui}) {
        RunConfig variant = cfg;
        variant.ablation = a;
        RunReport r = run_all(manifest, variant, nullptr, opts, nullptr);
        for (auto& row : r.rows) {
            row.config = to_string(a);
            combined.rows.push_back(std::move(row));
        }
        for (auto& f : r.failures) combined.failures.push_back(to_string(a) + "/" + f);
    }
    write_text(out_dir / "ablate.csv", combined.to_csv(true));
    print_failures(combined);
    return combined;
}

DatasetManifest cmd_synth(std::size_t count, std::uint64_t seed, std::size_t size, const fs::path& out_dir) {
    fs::create_directories(out_dir / "clean");
    fs::create_directories(out_dir / "masks");
    DatasetManifest m;
    m.root = fs::absolute(out_dir);
    m.split = "toy";
    for (const auto& s : toy::make_set(count, seed, size)) {
        io::write_png(out_dir / "clean" / (s.id + ".png"), s.clean);
        io::write_mask_png(out_dir / "masks" / (s.id + ".png"), s.mask);
        m.entries.push_back(ManifestEntry{s.id, "clean/" + s.id + ".png", "masks/" + s.id + ".png", std::nullopt});
    }
    m.save(out_dir / "manifest.json");
    return m;
}

}  // namespace nun::app
