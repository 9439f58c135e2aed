#include "depthforge/batch.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <nlohmann/json.hpp>

#include "depthforge/io.hpp"

namespace depthforge::batch {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

void PipelineConfig::validate() const {
  refine.validate();
  curate.validate();
  loss.validate();
  metrics.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  json j;
  j["refine"] = {{"median_kernel", cfg.refine.median_kernel},
                 {"instability_rel_tol", cfg.refine.instability_rel_tol},
                 {"fg_valid_threshold", cfg.refine.fg_valid_threshold},
                 {"min_valid_neighbors", cfg.refine.min_valid_neighbors}};
  j["curate"] = {{"euclidean_threshold", cfg.curate.euclidean_threshold},
                 {"min_component_fraction", cfg.curate.min_component_fraction},
                 {"quartile_fraction", cfg.curate.quartile_fraction},
                 {"pairs_per_image", cfg.curate.pairs_per_image},
                 {"rng_seed_base", cfg.curate.rng_seed_base}};
  j["loss"] = {{"alpha", cfg.loss.alpha},
               {"beta", cfg.loss.beta},
               {"tau", cfg.loss.tau},
               {"num_scales", cfg.loss.num_scales}};
  j["metrics"] = {{"delta", cfg.metrics.delta},
                  {"whdr_delta", cfg.metrics.whdr_delta},
                  {"sdr_max_pairs", cfg.metrics.sdr_max_pairs},
                  {"rng_seed", cfg.metrics.rng_seed},
                  {"align_scale", cfg.metrics.align_scale}};
  if (cfg.metrics.depth_cap) {
    j["metrics"]["depth_cap"] = *cfg.metrics.depth_cap;
  } else {
    j["metrics"]["depth_cap"] = nullptr;
  }
  j["workers"] = cfg.workers;
  return j.dump(2);
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) {
    out = j[key].get<T>();
  }
}

}  // namespace

PipelineConfig pipeline_config_overlay(PipelineConfig base,
                                       const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config document: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config document must be an object");
  if (j.contains("refine")) {
    const json& r = j["refine"];
    maybe_get(r, "median_kernel", base.refine.median_kernel);
    maybe_get(r, "instability_rel_tol", base.refine.instability_rel_tol);
    maybe_get(r, "fg_valid_threshold", base.refine.fg_valid_threshold);
    maybe_get(r, "min_valid_neighbors", base.refine.min_valid_neighbors);
  }
  if (j.contains("curate")) {
    const json& c = j["curate"];
    maybe_get(c, "euclidean_threshold", base.curate.euclidean_threshold);
    maybe_get(c, "min_component_fraction", base.curate.min_component_fraction);
    maybe_get(c, "quartile_fraction", base.curate.quartile_fraction);
    maybe_get(c, "pairs_per_image", base.curate.pairs_per_image);
    maybe_get(c, "rng_seed_base", base.curate.rng_seed_base);
  }
  if (j.contains("loss")) {
    const json& l = j["loss"];
    maybe_get(l, "alpha", base.loss.alpha);
    maybe_get(l, "beta", base.loss.beta);
    maybe_get(l, "tau", base.loss.tau);
    maybe_get(l, "num_scales", base.loss.num_scales);
  }
  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    maybe_get(m, "delta", base.metrics.delta);
    maybe_get(m, "whdr_delta", base.metrics.whdr_delta);
    maybe_get(m, "sdr_max_pairs", base.metrics.sdr_max_pairs);
    maybe_get(m, "rng_seed", base.metrics.rng_seed);
    maybe_get(m, "align_scale", base.metrics.align_scale);
    if (m.contains("depth_cap") && !m["depth_cap"].is_null()) {
      base.metrics.depth_cap = m["depth_cap"].get<double>();
    }
  }
  maybe_get(j, "workers", base.workers);
  base.validate();
  return base;
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  return pipeline_config_overlay(PipelineConfig{}, text);
}

std::vector<std::string> split_paths(const std::string& joined) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= joined.size()) {
    std::size_t sep = joined.find(';', start);
    if (sep == std::string::npos) {
      out.push_back(joined.substr(start));
      break;
    }
    out.push_back(joined.substr(start, sep - start));
    start = sep + 1;
  }
  return out;
}

namespace {

struct TaskResult {
  ImageRecord record;
  std::vector<OrdinalPairRow> pairs;
  bool failed = false;
};

TaskResult process_record(const ImageRecord& input,
                          const PipelineConfig& config, BatchOp op,
                          const std::string& out_dir,
                          const CategoryMapping& mapping) {
  TaskResult result;
  result.record = input;
  try {
    switch (op) {
      case BatchOp::Refine: {
        std::vector<DepthMap> iterations;
        for (const std::string& p : split_paths(input.depth_path)) {
          iterations.push_back(read_depth(p));
        }
        SemanticCategoryMask mask = read_mask_auto(input.mask_path, mapping);
        DepthMap refined =
            refine::refine_pipeline(iterations, mask, config.refine);
        std::string out_path = out_dir + "/" + input.image_id + ".dfd";
        write_depth(refined, out_path);
        result.record.depth_path = out_path;
        result.record.valid_fraction = valid_fraction(refined, mask);
        result.record.provenance = input.provenance.empty()
                                       ? "refine"
                                       : input.provenance + " | refine";
        break;
      }
      case BatchOp::Curate: {
        DepthMap map = read_depth(split_paths(input.depth_path).front());
        SemanticCategoryMask mask = read_mask_auto(input.mask_path, mapping);
        result.record.curation_verdict =
            curate::classify_image(map, mask, config.curate);
        result.record.valid_fraction = valid_fraction(map, mask);
        result.record.provenance = input.provenance.empty()
                                       ? "curate"
                                       : input.provenance + " | curate";
        break;
      }
      case BatchOp::LabelOrdinal: {
        if (input.curation_verdict != Verdict::Ordinal) break;
        DepthMap map = read_depth(split_paths(input.depth_path).front());
        SemanticCategoryMask mask = read_mask_auto(input.mask_path, mapping);
        curate::OrdinalRegions regions =
            curate::extract_ordinal_regions(map, mask, config.curate);
        for (const OrdinalPair& p : curate::sample_ordinal_pairs(
                 regions, input.image_id, config.curate)) {
          result.pairs.push_back({input.image_id, p, 1.0});
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    result.failed = true;
    std::string note = std::string("FAILED: ") + e.what();
    result.record.provenance = input.provenance.empty()
                                   ? note
                                   : input.provenance + " | " + note;
  }
  return result;
}

}  // namespace

BatchOutcome run_batch(const std::vector<ImageRecord>& manifest,
                       const PipelineConfig& config, BatchOp op,
                       const std::string& out_dir,
                       const CategoryMapping& mapping) {
  config.validate();
  std::vector<TaskResult> results(manifest.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= manifest.size()) break;
      results[i] = process_record(manifest[i], config, op, out_dir, mapping);
    }
  };

  std::size_t cap = std::max<std::size_t>(manifest.size(), 1);
  int pool = config.workers;
  if (static_cast<std::size_t>(pool) > cap) pool = static_cast<int>(cap);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  BatchOutcome outcome;
  outcome.records.reserve(results.size());
  for (auto& r : results) {
    outcome.failed += r.failed;
    outcome.records.push_back(std::move(r.record));
    for (auto& p : r.pairs) outcome.pairs.push_back(std::move(p));
  }
  return outcome;
}

}  // namespace depthforge::batch
