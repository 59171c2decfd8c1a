#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nun/app.hpp"
#include "nun/bui.hpp"
#include "nun/config_io.hpp"
#include "nun/degrade.hpp"
#include "nun/io.hpp"
#include "nun/metrics.hpp"
#include "nun/toy.hpp"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

// (H, W) or (H, W, C) float array -> Raster.
nun::Raster to_raster(const Array& a) {
    if (a.ndim() != 2 && a.ndim() != 3) throw nun::ShapeError("expected an (H, W) or (H, W, C) array");
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    const std::size_t c = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : 1;
    return nun::Raster(h, w, c, std::vector<double>(a.data(), a.data() + a.size()));
}

nun::MaskMap to_mask(const Array& a) {
    if (a.ndim() != 2) throw nun::ShapeError("expected an (H, W) mask");
    return nun::MaskMap(to_raster(a));
}

Array from_raster(const nun::Raster& r) {
    Array out({r.height(), r.width(), r.channels()});
    std::copy(r.values().begin(), r.values().end(), out.mutable_data());
    return out;
}

Array from_mask(const nun::MaskMap& m) {
    Array out({m.height(), m.width()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

nun::RunConfig parse_config(const std::string& text) {
    nun::RunConfig cfg = text.empty() ? nun::RunConfig{} : nun::config_io::from_json(nlohmann::json::parse(text));
    cfg.validate();
    return cfg;
}

py::dict report_dict(const nun::app::RunReport& r) {
    py::list rows;
    for (const auto& row : r.rows) {
        py::dict d;
        if (!row.config.empty()) d["config"] = row.config;
        d["id"] = row.id;
        for (std::size_t i = 0; i < nun::app::kMetricColumns.size(); ++i)
            d[py::str(nun::app::kMetricColumns[i])] = row.values[i] ? py::cast(*row.values[i]) : py::none();
        rows.append(d);
    }
    py::dict out;
    out["rows"] = rows;
    out["failures"] = r.failures;
    return out;
}

}  // namespace

PYBIND11_MODULE(_nun, m) {
    m.doc() = "Nested unfolding segmentation and restoration";

    py::register_exception<nun::ShapeError>(m, "ShapeError", PyExc_ValueError);

    m.def("default_config", [] { return nun::config_io::dump(nun::RunConfig{}); },
          "Default run config as a JSON string.");
    m.def("normalize_config", [](const std::string& text) { return nun::config_io::dump(parse_config(text)); },
          py::arg("config"), "Validates a JSON config and returns it with every default filled in.");

    m.def(
        "degrade",
        [](const Array& image, const std::string& spec, std::uint64_t seed) {
            auto s = nun::config_io::spec_from_json(nlohmann::json::parse(spec));
            s = nun::degrade::reseeded(s, seed, 0);
            return from_raster(nun::degrade::apply_spec(to_raster(image), s));
        },
        py::arg("image"), py::arg("spec"), py::arg("seed") = 0);

    m.def(
        "segment",
        [](const Array& image, const std::string& config) {
            const nun::RunConfig cfg = parse_config(config);
            const nun::Raster y = to_raster(image);
            nun::bui::DualTrace trace;
            {
                py::gil_scoped_release release;
                trace = nun::bui::run_dual_pipeline(y, cfg);
            }
            const auto& last = trace.final_stage();
            py::list t1, t2, scores;
            for (std::size_t k = 0; k < trace.primary.size(); ++k) {
                t1.append(trace.primary[k].t1_index);
                t2.append(trace.primary[k].t2_index);
                scores.append(trace.primary[k].quality_scores);
            }
            py::dict out;
            out["mask"] = from_mask(last.mask);
            out["background"] = from_raster(last.background);
            out["restored"] = from_raster(last.x_t1);
            out["stages"] = trace.primary.size();
            out["t1"] = t1;
            out["t2"] = t2;
            out["quality_scores"] = scores;
            out["csc_per_stage"] = trace.csc_per_stage;
            out["l_csc"] = trace.l_csc;
            return out;
        },
        py::arg("image"), py::arg("config") = std::string());

    m.def(
        "quality_score",
        [](const Array& image, const std::string& config) {
            const auto q = nun::bui::score(to_raster(image), parse_config(config).bui);
            py::dict d;
            d["sharpness"] = q.sharpness;
            d["contrast"] = q.contrast;
            d["exposure"] = q.exposure;
            d["clarity"] = q.clarity;
            d["composite"] = q.composite;
            return d;
        },
        py::arg("image"), py::arg("config") = std::string());
    m.def("select_top_two", [](const std::vector<double>& s) { return nun::bui::select_top_two(s); },
          py::arg("scores"));

    m.def("mae", [](const Array& p, const Array& t) { return nun::metrics::mae(to_mask(p), to_mask(t)); });
    m.def(
        "f_beta", [](const Array& p, const Array& t, double b2) { return nun::metrics::f_beta(to_mask(p), to_mask(t), b2); },
        py::arg("pred"), py::arg("target"), py::arg("beta2") = 0.3);
    m.def(
        "m_iou", [](const Array& p, const Array& t, double th) { return nun::metrics::m_iou(to_mask(p), to_mask(t), th); },
        py::arg("pred"), py::arg("target"), py::arg("threshold") = 0.5);
    m.def(
        "m_dice", [](const Array& p, const Array& t, double th) { return nun::metrics::m_dice(to_mask(p), to_mask(t), th); },
        py::arg("pred"), py::arg("target"), py::arg("threshold") = 0.5);
    m.def("psnr", [](const Array& a, const Array& b) { return nun::metrics::psnr(to_raster(a), to_raster(b)); });
    m.def("stage_weights", &nun::metrics::stage_weights, py::arg("stages"));

    m.def("read_png", [](const std::filesystem::path& p) { return from_raster(nun::io::read_png(p)); });
    m.def("write_png", [](const std::filesystem::path& p, const Array& a) { nun::io::write_png(p, to_raster(a)); });

    m.def(
        "toy_sample",
        [](std::uint64_t seed, std::size_t size) {
            const auto s = nun::toy::make_sample(seed, size);
            return py::make_tuple(from_raster(s.clean), from_mask(s.mask));
        },
        py::arg("seed") = 0, py::arg("size") = 64, "(clean image, binary mask) for a synthetic object.");

    m.def(
        "segment_manifest",
        [](const std::filesystem::path& manifest, const std::filesystem::path& out, const std::string& config,
           int threads) {
            const auto mf = nun::app::DatasetManifest::load(manifest);
            const auto cfg = parse_config(config);
            nun::app::RunReport r;
            {
                py::gil_scoped_release release;
                r = nun::app::cmd_segment(mf, cfg, out, {threads, false});
            }
            return report_dict(r);
        },
        py::arg("manifest"), py::arg("out"), py::arg("config") = std::string(), py::arg("threads") = 1);
}
