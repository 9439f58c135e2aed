#pragma once

#include <functional>
#include <string>
#include <vector>

#include "depthforge/curate.hpp"
#include "depthforge/loss.hpp"
#include "depthforge/metrics.hpp"
#include "depthforge/refine.hpp"
#include "depthforge/types.hpp"

namespace depthforge::batch {

// Every tunable in one place; serializes to a single JSON document written
// alongside batch outputs.
struct PipelineConfig {
  refine::RefineConfig refine;
  curate::CurateConfig curate;
  loss::LossConfig loss;
  metrics::MetricConfig metrics;
  int workers = 1;

  void validate() const;
};

std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const std::string& text);
// Defaults overlaid with any fields present in the document.
PipelineConfig pipeline_config_overlay(PipelineConfig base,
                                       const std::string& text);

enum class BatchOp { Refine, Curate, LabelOrdinal };

struct BatchOutcome {
  std::vector<ImageRecord> records;   // input order
  std::vector<OrdinalPairRow> pairs;  // LabelOrdinal only, input order
  std::size_t failed = 0;
};

// Applies one operation to every manifest record using a pool of
// config.workers threads. Per-image failures are recorded in the record's
// provenance and do not abort the batch. Output order always matches input
// order, so results are identical for any worker count.
//
// Refine reads the record's depth_path (';'-separated when several MVS
// iterations feed the fusion), refines against mask_path, and writes
// <out_dir>/<image_id>.dfd, updating depth_path and valid_fraction.
// Curate fills curation_verdict and valid_fraction. LabelOrdinal samples
// pairs for records already holding an ORDINAL verdict.
BatchOutcome run_batch(const std::vector<ImageRecord>& manifest,
                       const PipelineConfig& config, BatchOp op,
                       const std::string& out_dir,
                       const CategoryMapping& mapping);

// Splits a ';'-separated path list.
std::vector<std::string> split_paths(const std::string& joined);

}  // namespace depthforge::batch
