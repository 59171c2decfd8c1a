#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nun/bui.hpp"
#include "nun/config.hpp"
#include "nun/metrics.hpp"

// Dataset-level orchestration behind the command-line tool.
namespace nun::app {

namespace fs = std::filesystem;

struct ManifestEntry {
    std::string id;
    fs::path image;
    std::optional<fs::path> mask;
    std::optional<fs::path> clean;
};

/// JSON manifest: {"root": dir, "split": tag, "entries": [{"id", "image", "mask"?, "clean"?}]}.
/// Relative paths resolve against root, and root against the manifest's directory.
struct DatasetManifest {
    fs::path root;
    std::string split;
    std::vector<ManifestEntry> entries;

    static DatasetManifest load(const fs::path& path);
    /// Writes paths relative to the manifest's directory where possible.
    void save(const fs::path& path) const;

    fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : root / p; }
    /// Every referenced file exists and image/mask extents agree.
    void validate() const;
};

/// Fixed CSV schema, in order.
inline const std::vector<std::string> kMetricColumns{"mae", "f_beta", "m_iou", "m_dice", "psnr",
                                                      "wbce", "wiou", "l_basic", "l_csc", "l_total"};

struct ReportRow {
    std::string config;  // empty outside ablation reports
    std::string id;
    std::vector<std::optional<double>> values;  // aligned with kMetricColumns

    std::optional<double> get(const std::string& column) const;
};

struct RunReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> failures;  // "id: message"

    /// Column means over rows that have a value (per config when present).
    std::vector<ReportRow> aggregate() const;
    /// Header, per-item rows in input order, then one "mean" row per config.
    std::string to_csv(bool with_config_column) const;
    bool ok() const { return failures.empty(); }
};

struct RunOptions {
    int threads = 1;
    bool save_raw = false;
};

/// Writes <out>/<id>.png for every entry, plus provenance.json and a
/// manifest.json for the generated set (clean = the source image).
RunReport cmd_degrade(const DatasetManifest& manifest, const DegradationSpec& spec, std::uint64_t seed,
                      const fs::path& out_dir, const RunOptions& opts = {});

/// Runs the full nested unfolding on every entry. Writes masks/ (binarised),
/// masks_soft/, restored/, optional raw/ tensors, csc.csv, report.csv and
/// run_info.json into out_dir.
RunReport cmd_segment(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path& out_dir,
                      const RunOptions& opts = {});

/// Scores <pred_dir>/<id>.png masks against the manifest's ground truth.
/// Unmatched files on either side are listed as failures.
RunReport cmd_eval(const fs::path& pred_dir, const DatasetManifest& gt_manifest, const RunConfig& cfg);

/// Runs sodun_minus, sodun, derun and bui configurations; writes ablate.csv.
RunReport cmd_ablate(const DatasetManifest& manifest, const RunConfig& cfg, const fs::path& out_dir,
                     const RunOptions& opts = {});

/// Writes a synthetic dataset: clean/, masks/ and manifest.json.
DatasetManifest cmd_synth(std::size_t count, std::uint64_t seed, std::size_t size, const fs::path& out_dir);

/// Per-image metric row for one pipeline result; masks/clean may be absent.
ReportRow metrics_row(const std::string& id, const bui::DualTrace& trace, const MaskMap* gt, const Raster* clean,
                      const RunConfig& cfg);

}  // namespace nun::app
