#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "depthforge/batch.hpp"
#include "depthforge/curate.hpp"
#include "depthforge/fit.hpp"
#include "depthforge/io.hpp"
#include "depthforge/loss.hpp"
#include "depthforge/metrics.hpp"
#include "depthforge/refine.hpp"
#include "depthforge/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace depthforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

struct GlobalOptions {
  std::string config_path;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool log_json = false;
};

void log_event(const GlobalOptions& opts, const std::string& event,
               const json& fields = json::object()) {
  if (opts.log_json) {
    json j;
    j["event"] = event;
    for (auto& [k, v] : fields.items()) j[k] = v;
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << event;
    for (auto& [k, v] : fields.items()) {
      std::cerr << ' ' << k << '=' << v.dump();
    }
    std::cerr << '\n';
  }
}

batch::PipelineConfig load_config(const GlobalOptions& opts) {
  batch::PipelineConfig cfg;
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("DEPTHFORGE_CONFIG")) path = env;
  }
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    cfg = batch::pipeline_config_overlay(cfg, text);
  }
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.seed) {
    cfg.curate.rng_seed_base = *opts.seed;
    cfg.metrics.rng_seed = *opts.seed;
  }
  cfg.validate();
  return cfg;
}

CategoryMapping load_mapping(const std::string& path) {
  if (path.empty()) return default_category_mapping();
  return read_category_mapping(path);
}

void write_resolved_config(const batch::PipelineConfig& cfg,
                           const std::string& dir) {
  std::ofstream out(dir + "/pipeline_config.json");
  out << batch::pipeline_config_to_json(cfg) << '\n';
}

json loss_report_json(const loss::LossReport& report) {
  json j;
  j["data_term"] = report.data_term;
  j["grad_term"] = report.grad_term;
  j["ord_term"] = report.ord_term;
  j["total"] = report.total;
  j["n_pixels"] = report.n_pixels;
  j["used_pairs"] = report.used_pairs;
  j["skipped_pairs"] = report.skipped_pairs;
  return j;
}

json metric_report_json(const metrics::MetricReport& r) {
  json j;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      j[key] = *v;
    } else {
      j[key] = nullptr;
    }
  };
  put("si_rmse", r.si_rmse);
  put("sdr", r.sdr);
  put("sdr_eq", r.sdr_eq);
  put("sdr_neq", r.sdr_neq);
  put("whdr", r.whdr);
  put("rms", r.rms);
  put("rms_log", r.rms_log);
  put("abs_rel", r.abs_rel);
  put("sq_rel", r.sq_rel);
  put("log10", r.log10);
  j["n_pairs"] = r.n_pairs;
  j["n_pairs_eq"] = r.n_pairs_eq;
  j["n_pairs_neq"] = r.n_pairs_neq;
  j["n_pixels"] = r.n_pixels;
  j["scale"] = r.scale;
  return j;
}

std::vector<OrdinalPair> pairs_for_image(
    const std::vector<OrdinalPairRow>& rows, const std::string& image_id) {
  std::vector<OrdinalPair> out;
  for (const auto& row : rows) {
    if (image_id.empty() || row.image_id == image_id) out.push_back(row.pair);
  }
  return out;
}

synth::SceneSpec scene_from_json(const json& j) {
  synth::SceneSpec spec;
  spec.width = j.at("width").get<int>();
  spec.height = j.at("height").get<int>();
  spec.sky_band = j.value("sky_band", 0);
  spec.seed = j.value("seed", std::uint64_t{0});
  for (const auto& item : j.value("layers", json::array())) {
    synth::Layer layer;
    std::string kind = item.at("kind").get<std::string>();
    if (kind == "rect") {
      layer.kind = synth::Layer::Kind::Rect;
      layer.x = item.at("x").get<int>();
      layer.y = item.at("y").get<int>();
      layer.w = item.at("w").get<int>();
      layer.h = item.at("h").get<int>();
    } else if (kind == "disc") {
      layer.kind = synth::Layer::Kind::Disc;
      layer.cx = item.at("cx").get<double>();
      layer.cy = item.at("cy").get<double>();
      layer.r = item.at("r").get<double>();
    } else {
      throw ConfigError("layer kind must be rect or disc");
    }
    auto category = category_from_name(item.at("category").get<std::string>());
    if (!category) throw ConfigError("bad layer category");
    layer.category = *category;
    const auto& d = item.at("depth");
    layer.depth.a = d.value("a", 1.0);
    layer.depth.b = d.value("b", 0.0);
    layer.depth.c = d.value("c", 0.0);
    spec.layers.push_back(layer);
  }
  return spec;
}

synth::NoiseSpec noise_from_json(const json& j) {
  synth::NoiseSpec noise;
  noise.bleed_width = j.value("bleed_width", 0);
  noise.transient_valid_fraction = j.value("transient_valid_fraction", 0.0);
  noise.speckle_rate = j.value("speckle_rate", 0.0);
  noise.iterations = j.value("iterations", 1);
  noise.seed = j.value("seed", std::uint64_t{0});
  return noise;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth supervision toolkit"};
  app.require_subcommand(1);

  GlobalOptions opts;
  int workers_flag = 0;
  std::uint64_t seed_flag = 0;
  app.add_option("--config", opts.config_path,
                 "pipeline config JSON (env DEPTHFORGE_CONFIG as fallback)");
  auto* workers_opt =
      app.add_option("--workers", workers_flag, "worker threads for batches");
  auto* seed_opt = app.add_option("--seed", seed_flag,
                                  "override sampling seeds (curate, metrics)");
  app.add_flag("--log-json", opts.log_json, "structured JSON logs on stderr");

  // refine ------------------------------------------------------------
  auto* cmd_refine = app.add_subcommand(
      "refine", "fuse + stabilize + filter one image or a manifest batch");
  std::vector<std::string> refine_iters;
  std::string refine_mask, refine_out, refine_manifest, refine_image_id;
  std::string refine_batch, refine_out_dir, refine_manifest_out;
  std::string refine_mapping;
  std::optional<int> flag_kernel;
  std::optional<double> flag_tol, flag_fg_threshold;
  std::optional<int> flag_min_neighbors;
  cmd_refine->add_option("--iter", refine_iters,
                         "depth iteration file, ordered, repeatable");
  cmd_refine->add_option("--mask", refine_mask, "category or raw mask file");
  cmd_refine->add_option("--out", refine_out, "output depth file");
  cmd_refine->add_option("--manifest", refine_manifest,
                         "manifest to append the result record to");
  cmd_refine->add_option("--image-id", refine_image_id, "record id");
  cmd_refine->add_option("--batch", refine_batch, "input manifest for batch");
  cmd_refine->add_option("--out-dir", refine_out_dir, "batch output dir");
  cmd_refine->add_option("--manifest-out", refine_manifest_out,
                         "batch output manifest");
  cmd_refine->add_option("--mapping", refine_mapping,
                         "category mapping file for raw masks");
  cmd_refine->add_option("--median-kernel", flag_kernel, "window size");
  cmd_refine->add_option("--instability-tol", flag_tol,
                         "relative deviation threshold");
  cmd_refine->add_option("--fg-threshold", flag_fg_threshold,
                         "component valid-depth threshold");
  cmd_refine->add_option("--min-neighbors", flag_min_neighbors,
                         "median neighbor floor");

  // curate ------------------------------------------------------------
  auto* cmd_curate =
      app.add_subcommand("curate", "write verdicts into a manifest");
  std::string curate_manifest, curate_manifest_out, curate_out_dir;
  std::string curate_mapping;
  std::optional<double> flag_euclidean_threshold;
  cmd_curate->add_option("--manifest", curate_manifest, "input manifest")
      ->required();
  cmd_curate->add_option("--manifest-out", curate_manifest_out,
                         "output manifest (defaults to rewriting input)");
  cmd_curate->add_option("--out-dir", curate_out_dir,
                         "where the resolved config is written");
  cmd_curate->add_option("--mapping", curate_mapping, "category mapping file");
  cmd_curate->add_option("--euclidean-threshold", flag_euclidean_threshold,
                         "valid fraction needed for EUCLIDEAN");

  // label-ordinal -------------------------------------------------------
  auto* cmd_label = app.add_subcommand(
      "label-ordinal", "sample ordinal pairs for ORDINAL manifest records");
  std::string label_manifest, label_out, label_out_dir, label_mapping;
  std::optional<int> flag_pairs_per_image;
  cmd_label->add_option("--manifest", label_manifest, "input manifest")
      ->required();
  cmd_label->add_option("--out", label_out, "output pair CSV")->required();
  cmd_label->add_option("--out-dir", label_out_dir,
                        "where the resolved config is written");
  cmd_label->add_option("--mapping", label_mapping, "category mapping file");
  cmd_label->add_option("--pairs-per-image", flag_pairs_per_image,
                        "pairs sampled per ORDINAL image");

  // loss ---------------------------------------------------------------
  auto* cmd_loss = app.add_subcommand("loss", "evaluate the training loss");
  std::string loss_pred, loss_gt, loss_pairs, loss_emit_grad, loss_image_id;
  std::optional<double> flag_alpha, flag_beta, flag_tau;
  std::optional<int> flag_scales;
  cmd_loss->add_option("--pred", loss_pred, "predicted depth file")
      ->required();
  cmd_loss->add_option("--gt", loss_gt, "ground truth depth file")->required();
  cmd_loss->add_option("--pairs", loss_pairs, "ordinal pair CSV");
  cmd_loss->add_option("--image-id", loss_image_id,
                       "only use pairs with this image id");
  cmd_loss->add_option("--emit-grad", loss_emit_grad,
                       "write the gradient grid to this path");
  cmd_loss->add_option("--alpha", flag_alpha, "gradient term weight");
  cmd_loss->add_option("--beta", flag_beta, "ordinal term weight");
  cmd_loss->add_option("--tau", flag_tau, "ordinal knee");
  cmd_loss->add_option("--scales", flag_scales, "pyramid levels");

  // metrics --------------------------------------------------------------
  auto* cmd_metrics = app.add_subcommand("metrics", "evaluate a prediction");
  std::string metrics_pred, metrics_gt, metrics_pairs, metrics_csv,
      metrics_image_id;
  std::optional<double> flag_delta, flag_whdr_delta, flag_depth_cap;
  std::optional<std::uint64_t> flag_max_pairs;
  bool flag_align = false;
  cmd_metrics->add_option("--pred", metrics_pred, "predicted depth file")
      ->required();
  cmd_metrics->add_option("--gt", metrics_gt, "reference depth file")
      ->required();
  cmd_metrics->add_option("--pairs", metrics_pairs, "labeled pair CSV");
  cmd_metrics->add_option("--image-id", metrics_image_id,
                          "only use pairs with this image id");
  cmd_metrics->add_option("--csv", metrics_csv, "append a row to this table");
  cmd_metrics->add_option("--delta", flag_delta, "ord tolerance");
  cmd_metrics->add_option("--whdr-delta", flag_whdr_delta, "WHDR tolerance");
  cmd_metrics->add_option("--max-pairs", flag_max_pairs, "SDR pair cap");
  cmd_metrics->add_option("--depth-cap", flag_depth_cap, "GT depth cutoff");
  cmd_metrics->add_flag("--align", flag_align, "least-squares scale first");

  // fit -------------------------------------------------------------------
  auto* cmd_fit = app.add_subcommand(
      "fit", "gradient-descent a log-depth grid against the loss");
  std::string fit_gt, fit_pairs, fit_out, fit_trace, fit_init = "zero",
                                                     fit_image_id;
  int fit_steps = 1000;
  double fit_lr = 0.5;
  std::uint64_t fit_init_seed = 0;
  double fit_init_stddev = 0.1;
  std::optional<int> fit_fd_every;
  std::optional<double> fit_alpha, fit_beta, fit_tau;
  std::optional<int> fit_scales;
  cmd_fit->add_option("--gt", fit_gt, "ground truth depth file")->required();
  cmd_fit->add_option("--pairs", fit_pairs, "ordinal pair CSV");
  cmd_fit->add_option("--image-id", fit_image_id,
                      "only use pairs with this image id");
  cmd_fit->add_option("--out", fit_out, "fitted depth output file");
  cmd_fit->add_option("--trace", fit_trace, "per-step loss CSV");
  cmd_fit->add_option("--steps", fit_steps, "descent steps");
  cmd_fit->add_option("--lr", fit_lr, "learning rate");
  cmd_fit->add_option("--init", fit_init, "zero | random");
  cmd_fit->add_option("--init-seed", fit_init_seed, "random init seed");
  cmd_fit->add_option("--init-stddev", fit_init_stddev, "random init spread");
  cmd_fit->add_option("--fd-check-every", fit_fd_every,
                      "audit the gradient every N steps");
  cmd_fit->add_option("--alpha", fit_alpha, "gradient term weight");
  cmd_fit->add_option("--beta", fit_beta, "ordinal term weight");
  cmd_fit->add_option("--tau", fit_tau, "ordinal knee");
  cmd_fit->add_option("--scales", fit_scales, "pyramid levels");

  // synth -------------------------------------------------------------------
  auto* cmd_synth =
      app.add_subcommand("synth", "generate synthetic fixtures");
  std::string synth_spec, synth_preset, synth_out_dir;
  cmd_synth->add_option("--spec", synth_spec, "scene+noise JSON file");
  cmd_synth->add_option("--preset", synth_preset,
                        "bleed | transient | speckle | mixed");
  cmd_synth->add_option("--out-dir", synth_out_dir, "output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);
  if (workers_opt->count()) opts.workers = workers_flag;
  if (seed_opt->count()) opts.seed = seed_flag;

  try {
    batch::PipelineConfig cfg = load_config(opts);
    if (flag_kernel) cfg.refine.median_kernel = *flag_kernel;
    if (flag_tol) cfg.refine.instability_rel_tol = *flag_tol;
    if (flag_fg_threshold) cfg.refine.fg_valid_threshold = *flag_fg_threshold;
    if (flag_min_neighbors) cfg.refine.min_valid_neighbors = *flag_min_neighbors;
    if (flag_euclidean_threshold) {
      cfg.curate.euclidean_threshold = *flag_euclidean_threshold;
    }
    if (flag_pairs_per_image) cfg.curate.pairs_per_image = *flag_pairs_per_image;
    if (flag_alpha) cfg.loss.alpha = *flag_alpha;
    if (flag_beta) cfg.loss.beta = *flag_beta;
    if (flag_tau) cfg.loss.tau = *flag_tau;
    if (flag_scales) cfg.loss.num_scales = *flag_scales;
    if (flag_delta) cfg.metrics.delta = *flag_delta;
    if (flag_whdr_delta) cfg.metrics.whdr_delta = *flag_whdr_delta;
    if (flag_max_pairs) cfg.metrics.sdr_max_pairs = *flag_max_pairs;
    if (flag_depth_cap) cfg.metrics.depth_cap = *flag_depth_cap;
    if (flag_align) cfg.metrics.align_scale = true;
    cfg.validate();

    if (cmd_refine->parsed()) {
      if (!refine_batch.empty()) {
        if (refine_out_dir.empty() || refine_manifest_out.empty()) {
          throw ConfigError("batch refine needs --out-dir and --manifest-out");
        }
        fs::create_directories(refine_out_dir);
        auto manifest = read_manifest(refine_batch);
        auto outcome =
            batch::run_batch(manifest, cfg, batch::BatchOp::Refine,
                             refine_out_dir, load_mapping(refine_mapping));
        write_manifest(outcome.records, refine_manifest_out);
        write_resolved_config(cfg, refine_out_dir);
        log_event(opts, "refine_batch_done",
                  {{"images", manifest.size()}, {"failed", outcome.failed}});
        return outcome.failed ? kExitPartial : kExitOk;
      }
      if (refine_iters.empty() || refine_mask.empty() || refine_out.empty()) {
        throw ConfigError("refine needs --iter, --mask and --out");
      }
      std::vector<DepthMap> iterations;
      for (const auto& p : refine_iters) iterations.push_back(read_depth(p));
      SemanticCategoryMask mask =
          read_mask_auto(refine_mask, load_mapping(refine_mapping));
      DepthMap refined = refine::refine_pipeline(iterations, mask, cfg.refine);
      write_depth(refined, refine_out);
      if (!refine_manifest.empty()) {
        ImageRecord record;
        record.image_id = refine_image_id.empty()
                              ? fs::path(refine_out).stem().string()
                              : refine_image_id;
        record.depth_path = refine_out;
        record.mask_path = refine_mask;
        record.valid_fraction = valid_fraction(refined, mask);
        record.provenance = "refine";
        append_manifest_line(record, refine_manifest);
      }
      log_event(opts, "refine_done",
                {{"out", refine_out},
                 {"valid_fraction", valid_fraction(refined, mask)}});
      return kExitOk;
    }

    if (cmd_curate->parsed()) {
      auto manifest = read_manifest(curate_manifest);
      auto outcome = batch::run_batch(manifest, cfg, batch::BatchOp::Curate,
                                      ".", load_mapping(curate_mapping));
      std::string out_path = curate_manifest_out.empty() ? curate_manifest
                                                         : curate_manifest_out;
      write_manifest(outcome.records, out_path);
      if (!curate_out_dir.empty()) {
        fs::create_directories(curate_out_dir);
        write_resolved_config(cfg, curate_out_dir);
      }
      log_event(opts, "curate_done",
                {{"images", manifest.size()}, {"failed", outcome.failed}});
      return outcome.failed ? kExitPartial : kExitOk;
    }

    if (cmd_label->parsed()) {
      auto manifest = read_manifest(label_manifest);
      auto outcome =
          batch::run_batch(manifest, cfg, batch::BatchOp::LabelOrdinal, ".",
                           load_mapping(label_mapping));
      write_ordinal_pairs(outcome.pairs, label_out);
      if (!label_out_dir.empty()) {
        fs::create_directories(label_out_dir);
        write_resolved_config(cfg, label_out_dir);
      }
      log_event(opts, "label_ordinal_done",
                {{"pairs", outcome.pairs.size()}, {"failed", outcome.failed}});
      return outcome.failed ? kExitPartial : kExitOk;
    }

    if (cmd_loss->parsed()) {
      LogDepthMap pred = to_log(read_depth(loss_pred));
      LogDepthMap gt = to_log(read_depth(loss_gt));
      std::vector<OrdinalPair> pairs;
      if (!loss_pairs.empty()) {
        pairs = pairs_for_image(read_ordinal_pairs(loss_pairs), loss_image_id);
      }
      loss::LossReport report = loss::total_loss(pred, gt, pairs, cfg.loss);
      if (!loss_emit_grad.empty()) {
        std::vector<float> grid(report.grad_wrt_log_depth.begin(),
                                report.grad_wrt_log_depth.end());
        write_grid(pred.width(), pred.height(), grid, loss_emit_grad);
      }
      std::cout << loss_report_json(report).dump(2) << '\n';
      return kExitOk;
    }

    if (cmd_metrics->parsed()) {
      DepthMap pred = read_depth(metrics_pred);
      DepthMap gt = read_depth(metrics_gt);
      metrics::MetricReport report;
      report.si_rmse = metrics::si_rmse(pred, gt);
      metrics::StandardMetrics std_metrics =
          metrics::standard_metrics(pred, gt, cfg.metrics);
      report.rms = std_metrics.rms;
      report.rms_log = std_metrics.rms_log;
      report.abs_rel = std_metrics.abs_rel;
      report.sq_rel = std_metrics.sq_rel;
      report.log10 = std_metrics.log10;
      report.n_pixels = std_metrics.n_pixels;
      report.scale = std_metrics.scale;
      try {
        metrics::SdrResult s = metrics::sdr(pred, gt, cfg.metrics);
        report.sdr = s.sdr;
        report.sdr_eq = s.sdr_eq;
        report.sdr_neq = s.sdr_neq;
        report.n_pairs = s.n;
        report.n_pairs_eq = s.n_eq;
        report.n_pairs_neq = s.n_neq;
      } catch (const EmptyOverlapError&) {
        // fewer than two shared pixels: SDR entries stay absent
      }
      if (!metrics_pairs.empty()) {
        auto rows = read_ordinal_pairs(metrics_pairs);
        if (!metrics_image_id.empty()) {
          std::vector<OrdinalPairRow> filtered;
          for (auto& r : rows) {
            if (r.image_id == metrics_image_id) filtered.push_back(r);
          }
          rows = std::move(filtered);
        }
        if (!rows.empty()) report.whdr = metrics::whdr(pred, rows, cfg.metrics);
      }
      json j = metric_report_json(report);
      if (!metrics_csv.empty()) {
        bool fresh = !fs::exists(metrics_csv) || fs::file_size(metrics_csv) == 0;
        std::ofstream csv(metrics_csv, std::ios::app);
        if (!csv) throw FormatError("cannot append to " + metrics_csv);
        if (fresh) {
          csv << "pred,gt";
          for (auto& [k, v] : j.items()) csv << ',' << k;
          csv << '\n';
        }
        csv << metrics_pred << ',' << metrics_gt;
        for (auto& [k, v] : j.items()) {
          csv << ',' << (v.is_null() ? "" : v.dump());
        }
        csv << '\n';
      }
      std::cout << j.dump(2) << '\n';
      return kExitOk;
    }

    if (cmd_fit->parsed()) {
      fitkit::FitConfig fit_cfg;
      fit_cfg.steps = fit_steps;
      fit_cfg.learning_rate = fit_lr;
      if (fit_init == "zero") {
        fit_cfg.init = fitkit::FitConfig::Init::ConstantZero;
      } else if (fit_init == "random") {
        fit_cfg.init = fitkit::FitConfig::Init::Random;
      } else {
        throw ConfigError("--init must be zero or random");
      }
      fit_cfg.init_seed = fit_init_seed;
      fit_cfg.init_stddev = fit_init_stddev;
      fit_cfg.loss = cfg.loss;
      if (fit_alpha) fit_cfg.loss.alpha = *fit_alpha;
      if (fit_beta) fit_cfg.loss.beta = *fit_beta;
      if (fit_tau) fit_cfg.loss.tau = *fit_tau;
      if (fit_scales) fit_cfg.loss.num_scales = *fit_scales;
      fit_cfg.fd_check_every = fit_fd_every;

      LogDepthMap gt = to_log(read_depth(fit_gt));
      std::vector<OrdinalPair> pairs;
      if (!fit_pairs.empty()) {
        pairs = pairs_for_image(read_ordinal_pairs(fit_pairs), fit_image_id);
      }
      fitkit::FitResult result = fitkit::fit_log_depth(gt, pairs, fit_cfg);
      if (!fit_out.empty()) write_depth(from_log(result.fitted), fit_out);
      if (!fit_trace.empty()) {
        std::ofstream trace(fit_trace);
        trace << "step,total_loss\n";
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
          trace << i << ',' << result.trace[i] << '\n';
        }
      }
      json summary;
      summary["steps"] = fit_cfg.steps;
      summary["final_loss"] = result.trace.back();
      if (!result.audits.empty()) {
        double worst = 0.0;
        for (auto& [step, err] : result.audits) worst = std::max(worst, err);
        summary["max_fd_error"] = worst;
      }
      std::cout << summary.dump(2) << '\n';
      return kExitOk;
    }

    if (cmd_synth->parsed()) {
      synth::SceneSpec scene;
      synth::NoiseSpec noise;
      std::string stem = "scene";
      if (!synth_preset.empty()) {
        synth::Preset p = synth::preset(synth_preset);
        scene = p.scene;
        noise = p.noise;
        stem = p.name;
      } else if (!synth_spec.empty()) {
        std::ifstream in(synth_spec);
        if (!in) throw FormatError("cannot open " + synth_spec);
        json j = json::parse(in);
        scene = scene_from_json(j.at("scene"));
        if (j.contains("noise")) noise = noise_from_json(j["noise"]);
        stem = fs::path(synth_spec).stem().string();
      } else {
        throw ConfigError("synth needs --preset or --spec");
      }
      fs::create_directories(synth_out_dir);
      auto [clean, mask] = synth::render(scene);
      write_depth(clean, synth_out_dir + "/" + stem + "_clean.dfd");
      write_mask(mask, synth_out_dir + "/" + stem + "_mask.dfm");
      auto iterations = synth::corrupt(clean, mask, noise);
      for (std::size_t i = 0; i < iterations.size(); ++i) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_iter_%02zu.dfd", i);
        write_depth(iterations[i], synth_out_dir + "/" + stem + suffix);
      }
      log_event(opts, "synth_done",
                {{"out_dir", synth_out_dir}, {"iterations", iterations.size()}});
      return kExitOk;
    }

    return kExitOk;
  } catch (const ConfigError& e) {
    log_event(opts, "config_error", {{"error", e.what()}});
    return kExitConfig;
  } catch (const std::exception& e) {
    log_event(opts, "error", {{"error", e.what()}});
    return kExitIo;
  }
}
