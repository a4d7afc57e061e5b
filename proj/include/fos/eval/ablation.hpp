#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fos/dataset/corpus.hpp"
#include "fos/encoder/query_encoder.hpp"
#include "fos/eval/eval_set.hpp"
#include "fos/eval/metrics.hpp"

namespace fos {

// Reference results from the original full-scale study (large labelled photo
// corpus, 2048-d encoders, millions of triplets). Reported in the ablation
// table for context only; desk-scale runs are not comparable and these are
// never asserted against.
struct FullScaleReference {
  double baseline_map_pct = 43.30;
  double early_fusion_map_pct = 48.98;
  double no_aug_map_pct = 51.91;
  double no_bg_freeze_map_pct = 53.61;
  double multi_task_map_pct = 54.48;
  double ours_map_pct = 53.72;
  double classifier_top1_pct = 53.15;
  double classifier_top5_pct = 85.79;
};

struct AblationRow {
  std::string mode;
  bool trained = false;
  std::string error;           // set when the variant failed to train
  double map = 0.0;            // instance-level mAP on the shared eval set
  double pattern_map = 0.0;    // secondary pattern-level mAP
  double random_baseline = 0.0;
  double seconds = 0.0;
  bool teacher_frozen_ok = true;  // full mode: weights bit-identical
};

struct AblationReport {
  std::vector<AblationRow> rows;
  FullScaleReference reference;
  uint64_t seed = 0;
  std::string config_hash;

  std::string to_json() const;
  std::string to_table() const;  // printable comparison table
};

struct AblationEvalParams {
  int min_pattern_size = 10;
  int per_pattern = 5;
  int n_queries = 100;
};

// Trains every requested variant from the same corpus, teacher and seed, and
// evaluates each on the eval set embedded with that variant's own foreground
// encoder. A variant that throws is recorded as a failed row and the suite
// continues.
AblationReport run_ablation_suite(const DatasetCorpus& corpus, const ForegroundEncoder& teacher,
                                  const QueryTrainConfig& base_cfg,
                                  const AblationEvalParams& eval_params, uint64_t seed,
                                  const std::vector<AblationMode>& modes =
                                      {AblationMode::kBaselineProxy, AblationMode::kEarlyFusion,
                                       AblationMode::kNoAug, AblationMode::kNoBgFreeze,
                                       AblationMode::kMultiTask, AblationMode::kFull},
                                  std::ostream* log = nullptr);

}  // namespace fos
