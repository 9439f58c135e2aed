#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "depthforge/batch.hpp"
#include "depthforge/curate.hpp"
#include "depthforge/fit.hpp"
#include "depthforge/io.hpp"
#include "depthforge/loss.hpp"
#include "depthforge/metrics.hpp"
#include "depthforge/refine.hpp"
#include "depthforge/synth.hpp"

namespace py = pybind11;
using namespace depthforge;

namespace {

// Depth maps cross the boundary as float32 (h, w) arrays with NaN marking
// invalid pixels; log-depth grids as float64; masks as uint8 category codes.

DepthMap depth_from_array(const py::array_t<float, py::array::c_style |
                                                       py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DimensionError("depth array must be 2-d");
  int h = static_cast<int>(a.shape(0));
  int w = static_cast<int>(a.shape(1));
  std::vector<float> data(a.data(), a.data() + a.size());
  return DepthMap::from_data(w, h, std::move(data));
}

py::array_t<float> depth_to_array(const DepthMap& map) {
  py::array_t<float> out({map.height(), map.width()});
  std::copy(map.data().begin(), map.data().end(), out.mutable_data());
  return out;
}

LogDepthMap log_from_array(const py::array_t<double, py::array::c_style |
                                                         py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DimensionError("log-depth array must be 2-d");
  int h = static_cast<int>(a.shape(0));
  int w = static_cast<int>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + a.size());
  return LogDepthMap::from_values(w, h, std::move(data));
}

py::array_t<double> log_to_array(const LogDepthMap& map) {
  py::array_t<double> out({map.height(), map.width()});
  std::copy(map.values().begin(), map.values().end(), out.mutable_data());
  return out;
}

SemanticCategoryMask mask_from_array(
    const py::array_t<std::uint8_t,
                      py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DimensionError("mask array must be 2-d");
  int h = static_cast<int>(a.shape(0));
  int w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> codes(a.data(), a.data() + a.size());
  return SemanticCategoryMask::from_codes(w, h, codes);
}

py::array_t<std::uint8_t> mask_to_array(const SemanticCategoryMask& mask) {
  py::array_t<std::uint8_t> out({mask.height(), mask.width()});
  auto* ptr = out.mutable_data();
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    ptr[i] = static_cast<std::uint8_t>(mask.at(i));
  }
  return out;
}

py::array_t<double> grid_to_array(const std::vector<double>& grid, int w,
                                  int h) {
  py::array_t<double> out({h, w});
  std::copy(grid.begin(), grid.end(), out.mutable_data());
  return out;
}

std::vector<OrdinalPair> pairs_from_list(
    const std::vector<std::tuple<int, int, int, int, int>>& raw) {
  std::vector<OrdinalPair> pairs;
  pairs.reserve(raw.size());
  for (const auto& [ix, iy, jx, jy, r] : raw) {
    pairs.push_back({ix, iy, jx, jy, r});
  }
  return pairs;
}

using PairTuple = std::tuple<int, int, int, int, int>;

std::vector<PairTuple> pairs_to_list(const std::vector<OrdinalPair>& pairs) {
  std::vector<PairTuple> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.emplace_back(p.ix, p.iy, p.jx, p.jy, p.relation);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MVS depth supervision toolkit: refinement, curation, losses, "
            "metrics and synthetic fixtures";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<EmptyOverlapError>(m, "EmptyOverlapError",
                                            PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // Configs --------------------------------------------------------------
  py::class_<refine::RefineConfig>(m, "RefineConfig")
      .def(py::init<>())
      .def_readwrite("median_kernel", &refine::RefineConfig::median_kernel)
      .def_readwrite("instability_rel_tol",
                     &refine::RefineConfig::instability_rel_tol)
      .def_readwrite("fg_valid_threshold",
                     &refine::RefineConfig::fg_valid_threshold)
      .def_readwrite("min_valid_neighbors",
                     &refine::RefineConfig::min_valid_neighbors);

  py::class_<curate::CurateConfig>(m, "CurateConfig")
      .def(py::init<>())
      .def_readwrite("euclidean_threshold",
                     &curate::CurateConfig::euclidean_threshold)
      .def_readwrite("min_component_fraction",
                     &curate::CurateConfig::min_component_fraction)
      .def_readwrite("quartile_fraction",
                     &curate::CurateConfig::quartile_fraction)
      .def_readwrite("pairs_per_image", &curate::CurateConfig::pairs_per_image)
      .def_readwrite("rng_seed_base", &curate::CurateConfig::rng_seed_base);

  py::class_<loss::LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &loss::LossConfig::alpha)
      .def_readwrite("beta", &loss::LossConfig::beta)
      .def_readwrite("tau", &loss::LossConfig::tau)
      .def_readwrite("num_scales", &loss::LossConfig::num_scales);

  py::class_<metrics::MetricConfig>(m, "MetricConfig")
      .def(py::init<>())
      .def_readwrite("delta", &metrics::MetricConfig::delta)
      .def_readwrite("whdr_delta", &metrics::MetricConfig::whdr_delta)
      .def_readwrite("sdr_max_pairs", &metrics::MetricConfig::sdr_max_pairs)
      .def_readwrite("rng_seed", &metrics::MetricConfig::rng_seed)
      .def_readwrite("depth_cap", &metrics::MetricConfig::depth_cap)
      .def_readwrite("align_scale", &metrics::MetricConfig::align_scale);

  // Core -----------------------------------------------------------------
  m.def("to_log", [](const py::array_t<float, py::array::c_style |
                                                  py::array::forcecast>& a) {
    return log_to_array(to_log(depth_from_array(a)));
  });
  m.def("from_log", [](const py::array_t<double, py::array::c_style |
                                                     py::array::forcecast>& a) {
    return depth_to_array(from_log(log_from_array(a)));
  });
  m.def("valid_fraction",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& depth,
           const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& mask) {
          return valid_fraction(depth_from_array(depth),
                                mask_from_array(mask));
        });
  m.def("read_depth",
        [](const std::string& path) { return depth_to_array(read_depth(path)); });
  m.def("write_depth",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& a,
           const std::string& path) { write_depth(depth_from_array(a), path); });
  m.def("read_mask", [](const std::string& path) {
    return mask_to_array(read_mask_auto(path, default_category_mapping()));
  });
  m.def("write_mask",
        [](const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& a,
           const std::string& path) { write_mask(mask_from_array(a), path); });

  // Refinement ------------------------------------------------------------
  m.def(
      "keep_closer_fuse",
      [](const std::vector<py::array_t<
             float, py::array::c_style | py::array::forcecast>>& arrays) {
        std::vector<DepthMap> maps;
        maps.reserve(arrays.size());
        for (const auto& a : arrays) maps.push_back(depth_from_array(a));
        return depth_to_array(refine::keep_closer_fuse(maps));
      });
  m.def("median_stabilize",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& a,
           const refine::RefineConfig& cfg) {
          return depth_to_array(refine::median_stabilize(depth_from_array(a), cfg));
        },
        py::arg("depth"), py::arg("config") = refine::RefineConfig{});
  m.def("semantic_filter",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& a,
           const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& mask,
           const refine::RefineConfig& cfg) {
          return depth_to_array(refine::semantic_filter(
              depth_from_array(a), mask_from_array(mask), cfg));
        },
        py::arg("depth"), py::arg("mask"),
        py::arg("config") = refine::RefineConfig{});
  m.def("remove_sky",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& a,
           const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& mask) {
          return depth_to_array(
              refine::remove_sky(depth_from_array(a), mask_from_array(mask)));
        });
  m.def(
      "refine_pipeline",
      [](const std::vector<py::array_t<
             float, py::array::c_style | py::array::forcecast>>& arrays,
         const py::array_t<std::uint8_t,
                           py::array::c_style | py::array::forcecast>& mask,
         const refine::RefineConfig& cfg) {
        std::vector<DepthMap> maps;
        maps.reserve(arrays.size());
        for (const auto& a : arrays) maps.push_back(depth_from_array(a));
        return depth_to_array(
            refine::refine_pipeline(maps, mask_from_array(mask), cfg));
      },
      py::arg("iterations"), py::arg("mask"),
      py::arg("config") = refine::RefineConfig{});

  // Curation ----------------------------------------------------------------
  m.def("classify_image",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& depth,
           const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& mask,
           const curate::CurateConfig& cfg) {
          return std::string(verdict_name(curate::classify_image(
              depth_from_array(depth), mask_from_array(mask), cfg)));
        },
        py::arg("depth"), py::arg("mask"),
        py::arg("config") = curate::CurateConfig{});
  m.def("extract_ordinal_regions",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& depth,
           const py::array_t<std::uint8_t,
                             py::array::c_style | py::array::forcecast>& mask,
           const curate::CurateConfig& cfg) {
          auto regions = curate::extract_ordinal_regions(
              depth_from_array(depth), mask_from_array(mask), cfg);
          py::array_t<bool> f({regions.height, regions.width});
          py::array_t<bool> b({regions.height, regions.width});
          for (std::size_t i = 0; i < regions.f_ord.size(); ++i) {
            f.mutable_data()[i] = regions.f_ord[i] != 0;
            b.mutable_data()[i] = regions.b_ord[i] != 0;
          }
          return py::make_tuple(f, b);
        },
        py::arg("depth"), py::arg("mask"),
        py::arg("config") = curate::CurateConfig{});
  m.def("sample_ordinal_pairs",
        [](const py::array_t<bool, py::array::c_style |
                                       py::array::forcecast>& f_ord,
           const py::array_t<bool, py::array::c_style |
                                       py::array::forcecast>& b_ord,
           const std::string& image_id, const curate::CurateConfig& cfg) {
          if (f_ord.ndim() != 2 || b_ord.ndim() != 2 ||
              f_ord.shape(0) != b_ord.shape(0) ||
              f_ord.shape(1) != b_ord.shape(1)) {
            throw DimensionError("region arrays must share a 2-d shape");
          }
          curate::OrdinalRegions regions;
          regions.height = static_cast<int>(f_ord.shape(0));
          regions.width = static_cast<int>(f_ord.shape(1));
          regions.f_ord.assign(f_ord.data(), f_ord.data() + f_ord.size());
          regions.b_ord.assign(b_ord.data(), b_ord.data() + b_ord.size());
          return pairs_to_list(
              curate::sample_ordinal_pairs(regions, image_id, cfg));
        },
        py::arg("f_ord"), py::arg("b_ord"), py::arg("image_id"),
        py::arg("config") = curate::CurateConfig{});

  // Losses -------------------------------------------------------------------
  m.def("data_loss",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& pred,
           const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& gt) {
          LogDepthMap p = log_from_array(pred);
          auto res = loss::data_loss(p, log_from_array(gt));
          return py::make_tuple(res.value,
                                grid_to_array(res.grad, p.width(), p.height()));
        });
  m.def("grad_loss",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& pred,
           const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& gt,
           const loss::LossConfig& cfg) {
          LogDepthMap p = log_from_array(pred);
          auto res = loss::grad_loss(p, log_from_array(gt), cfg);
          return py::make_tuple(res.value,
                                grid_to_array(res.grad, p.width(), p.height()));
        },
        py::arg("pred"), py::arg("gt"), py::arg("config") = loss::LossConfig{});
  m.def("ord_loss",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& pred,
           const std::vector<PairTuple>& pairs, const loss::LossConfig& cfg) {
          LogDepthMap p = log_from_array(pred);
          auto res = loss::ord_loss(p, pairs_from_list(pairs), cfg);
          return py::make_tuple(res.value,
                                grid_to_array(res.grad, p.width(), p.height()),
                                res.used_pairs, res.skipped_pairs);
        },
        py::arg("pred"), py::arg("pairs"),
        py::arg("config") = loss::LossConfig{});
  m.def("total_loss",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& pred,
           const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& gt,
           const std::vector<PairTuple>& pairs, const loss::LossConfig& cfg) {
          LogDepthMap p = log_from_array(pred);
          auto report =
              loss::total_loss(p, log_from_array(gt), pairs_from_list(pairs), cfg);
          py::dict out;
          out["data_term"] = report.data_term;
          out["grad_term"] = report.grad_term;
          out["ord_term"] = report.ord_term;
          out["total"] = report.total;
          out["n_pixels"] = report.n_pixels;
          out["used_pairs"] = report.used_pairs;
          out["skipped_pairs"] = report.skipped_pairs;
          out["grad_wrt_log_depth"] =
              grid_to_array(report.grad_wrt_log_depth, p.width(), p.height());
          return out;
        },
        py::arg("pred"), py::arg("gt"),
        py::arg("pairs") = std::vector<PairTuple>{},
        py::arg("config") = loss::LossConfig{});

  // Metrics ---------------------------------------------------------------
  m.def("align_scale",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& pred,
           const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& gt) {
          return metrics::align_scale(depth_from_array(pred),
                                      depth_from_array(gt));
        });
  m.def("si_rmse",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& pred,
           const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& gt) {
          return metrics::si_rmse(depth_from_array(pred), depth_from_array(gt));
        });
  m.def("ord", &metrics::ord, py::arg("a"), py::arg("b"),
        py::arg("delta") = 0.1);
  m.def("sdr",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& pred,
           const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& gt,
           const metrics::MetricConfig& cfg) {
          auto res = metrics::sdr(depth_from_array(pred), depth_from_array(gt),
                                  cfg);
          py::dict out;
          out["sdr"] = res.sdr;
          out["sdr_eq"] = res.sdr_eq;
          out["sdr_neq"] = res.sdr_neq;
          out["n"] = res.n;
          out["n_eq"] = res.n_eq;
          out["n_neq"] = res.n_neq;
          return out;
        },
        py::arg("pred"), py::arg("gt"),
        py::arg("config") = metrics::MetricConfig{});
  m.def("whdr",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& pred,
           const std::vector<PairTuple>& pairs, const metrics::MetricConfig& cfg) {
          std::vector<OrdinalPairRow> rows;
          for (const auto& p : pairs_from_list(pairs)) rows.push_back({"", p, 1.0});
          return metrics::whdr(depth_from_array(pred), rows, cfg);
        },
        py::arg("pred"), py::arg("pairs"),
        py::arg("config") = metrics::MetricConfig{});
  m.def("standard_metrics",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& pred,
           const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& gt,
           const metrics::MetricConfig& cfg) {
          auto res = metrics::standard_metrics(depth_from_array(pred),
                                               depth_from_array(gt), cfg);
          py::dict out;
          out["rms"] = res.rms;
          out["rms_log"] = res.rms_log;
          out["abs_rel"] = res.abs_rel;
          out["sq_rel"] = res.sq_rel;
          out["log10"] = res.log10;
          out["n_pixels"] = res.n_pixels;
          out["scale"] = res.scale;
          return out;
        },
        py::arg("pred"), py::arg("gt"),
        py::arg("config") = metrics::MetricConfig{});

  // Fit harness -------------------------------------------------------------
  py::class_<fitkit::FitConfig> fit_config(m, "FitConfig");
  fit_config.def(py::init<>())
      .def_readwrite("steps", &fitkit::FitConfig::steps)
      .def_readwrite("learning_rate", &fitkit::FitConfig::learning_rate)
      .def_readwrite("init", &fitkit::FitConfig::init)
      .def_readwrite("init_seed", &fitkit::FitConfig::init_seed)
      .def_readwrite("init_stddev", &fitkit::FitConfig::init_stddev)
      .def_readwrite("loss", &fitkit::FitConfig::loss)
      .def_readwrite("fd_check_every", &fitkit::FitConfig::fd_check_every);
  py::enum_<fitkit::FitConfig::Init>(fit_config, "Init")
      .value("CONSTANT_ZERO", fitkit::FitConfig::Init::ConstantZero)
      .value("RANDOM", fitkit::FitConfig::Init::Random);

  m.def("fit_log_depth",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& gt,
           const std::vector<PairTuple>& pairs, const fitkit::FitConfig& cfg) {
          LogDepthMap g = log_from_array(gt);
          auto res = fitkit::fit_log_depth(g, pairs_from_list(pairs), cfg);
          return py::make_tuple(log_to_array(res.fitted), res.trace);
        },
        py::arg("gt"), py::arg("pairs") = std::vector<PairTuple>{},
        py::arg("config") = fitkit::FitConfig{});
  m.def("finite_diff_audit",
        [](const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& pred,
           const py::array_t<double, py::array::c_style |
                                         py::array::forcecast>& gt,
           const std::vector<PairTuple>& pairs, const fitkit::FitConfig& cfg) {
          auto res = fitkit::finite_diff_audit(
              log_from_array(pred), log_from_array(gt), pairs_from_list(pairs),
              cfg);
          return py::make_tuple(res.max_rel_error, res.evaluated);
        },
        py::arg("pred"), py::arg("gt"),
        py::arg("pairs") = std::vector<PairTuple>{},
        py::arg("config") = fitkit::FitConfig{});

  // Synthetic fixtures -------------------------------------------------------
  m.def("render_preset", [](const std::string& name) {
    auto p = synth::preset(name);
    auto [depth, mask] = synth::render(p.scene);
    return py::make_tuple(depth_to_array(depth), mask_to_array(mask));
  });
  m.def("corrupt_preset", [](const std::string& name) {
    auto p = synth::preset(name);
    auto [depth, mask] = synth::render(p.scene);
    auto iterations = synth::corrupt(depth, mask, p.noise);
    std::vector<py::array_t<float>> out;
    out.reserve(iterations.size());
    for (const auto& it : iterations) out.push_back(depth_to_array(it));
    return out;
  });
  m.def("preset_names", &synth::preset_names);
  m.def("true_ordinal",
        [](const py::array_t<float, py::array::c_style |
                                        py::array::forcecast>& clean,
           const PairTuple& pair) {
          auto [ix, iy, jx, jy, r] = pair;
          return synth::true_ordinal(depth_from_array(clean),
                                     {ix, iy, jx, jy, r});
        });

  m.attr("SKY") = static_cast<int>(Category::Sky);
  m.attr("FOREGROUND") = static_cast<int>(Category::Foreground);
  m.attr("BACKGROUND") = static_cast<int>(Category::Background);
  m.attr("UNKNOWN") = static_cast<int>(Category::Unknown);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
