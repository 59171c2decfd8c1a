// nun: degrade, segment, evaluate and ablate image sets with the nested
// unfolding solver.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nun/app.hpp"
#include "nun/config_io.hpp"

namespace {

nun::Ablation parse_ablate_flag(const std::string& s) {
    if (s == "no-derun") return nun::Ablation::sodun;
    return nun::parse_ablation(s);
}

int finish(const nun::app::RunReport& r, const char* what) {
    std::fprintf(stderr, "%s: %zu ok, %zu failed\n", what, r.rows.size(), r.failures.size());
    return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested unfolding segmentation and restoration for degraded images"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool dump_config = false;
    app.add_option("--config", config_path, "JSON run config (sections core/degrade/derun/sodun/bui/metrics)")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Overrides core.seed");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--dump-config", dump_config, "Print the effective config and exit");

    std::string manifest_path, out_dir, pred_dir, ablate_mode, report_path;
    bool save_raw = false;
    std::size_t count = 20, size = 64;

    auto* degrade = app.add_subcommand("degrade", "Apply the configured degradation to every image");
    degrade->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    degrade->add_option("--out", out_dir)->required();

    auto* segment = app.add_subcommand("segment", "Run the pipeline and write masks, restorations and metrics");
    segment->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    segment->add_option("--out", out_dir)->required();
    segment->add_option("--ablate", ablate_mode, "sodun_minus | sodun | no-derun | derun | bui");
    segment->add_flag("--save-raw", save_raw, "Also write NUNR float tensors");

    auto* eval = app.add_subcommand("eval", "Score predicted masks against a ground-truth manifest");
    eval->add_option("--pred", pred_dir)->required()->check(CLI::ExistingDirectory);
    eval->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--report", report_path, "CSV path (default: stdout)");

    auto* ablate = app.add_subcommand("ablate", "Run the four ablation configurations");
    ablate->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    ablate->add_option("--out", out_dir)->required();

    auto* synth = app.add_subcommand("synth", "Write a synthetic textured-object dataset");
    synth->add_option("--count", count);
    synth->add_option("--size", size)->check(CLI::Range(8, 4096));
    synth->add_option("--out", out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        nun::RunConfig cfg = config_path.empty() ? nun::RunConfig{} : nun::config_io::load(config_path);
        if (seed) cfg.seed = *seed;
        if (!ablate_mode.empty()) cfg.ablation = parse_ablate_flag(ablate_mode);
        cfg.validate();

        if (dump_config) {
            std::cout << nun::config_io::dump(cfg);
            return 0;
        }
        const nun::app::RunOptions opts{threads, save_raw};

        if (*degrade) {
            const auto m = nun::app::DatasetManifest::load(manifest_path);
            return finish(nun::app::cmd_degrade(m, cfg.degrade, cfg.seed, out_dir, opts), "degrade");
        }
        if (*segment) {
            const auto m = nun::app::DatasetManifest::load(manifest_path);
            return finish(nun::app::cmd_segment(m, cfg, out_dir, opts), "segment");
        }
        if (*eval) {
            const auto m = nun::app::DatasetManifest::load(manifest_path);
            const auto report = nun::app::cmd_eval(pred_dir, m, cfg);
            if (report_path.empty()) {
                std::cout << report.to_csv(false);
            } else {
                std::ofstream(report_path, std::ios::binary) << report.to_csv(false);
            }
            return finish(report, "eval");
        }
        if (*ablate) {
            const auto m = nun::app::DatasetManifest::load(manifest_path);
            const auto report = nun::app::cmd_ablate(m, cfg, out_dir, opts);
            double lo = 0.0, hi = 0.0;
            for (const auto& row : report.aggregate()) {
                const auto v = row.get("m_iou");
                if (row.config == "sodun_minus" && v) lo = *v;
                if (row.config == "bui" && v) hi = *v;
            }
            std::fprintf(stderr, "m_iou sodun_minus %.4f -> bui %.4f (%s)\n", lo, hi,
                         hi >= lo ? "non-decreasing" : "decreasing");
            return finish(report, "ablate");
        }
        if (*synth) {
            const auto m = nun::app::cmd_synth(count, cfg.seed, size, out_dir);
            std::fprintf(stderr, "synth: wrote %zu samples to %s\n", m.entries.size(), out_dir.c_str());
            return 0;
        }
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
