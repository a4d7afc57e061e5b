#pragma once

#include <cstdint>

#include "fos/dataset/corpus.hpp"

namespace fos {

// Desk-scale procedural corpus. Each pattern index maps to a distinct
// attribute tuple; the rendered foreground (shape family, hue, elongation,
// rotation, fill, bottom crop) is a pure function of that tuple plus
// per-instance jitter. Backgrounds carry one of the patterns' hue classes and
// the query rectangle carries an aspect class (wide/tall); a pattern is
// compatible with a query iff its hue class and aspect class both match.
// The rule is deterministic and invertible, so exact relevance labels exist.
struct SyntheticConfig {
  int patterns = 8;
  int instances_per_pattern = 30;
  int queries = 250;
  int test_queries = 50;  // tail of the query list, marked split=test
  int image_size = 64;    // background side, pixels
  int fg_size = 48;       // foreground canvas side, pixels
};

DatasetCorpus generate_synthetic_corpus(const SyntheticConfig& cfg, uint64_t seed);

// The attribute tuple assigned to synthetic pattern index p (exposed for
// tests and for deriving background-classifier labels). The hue classes are
// spread over the motion dimension, so the tuple depends on the total count.
AttributeVector synthetic_pattern_attributes(int p, int total_patterns);

// Hue class (= motion value index) and aspect class (0 wide / 1 tall) that a
// synthetic pattern responds to.
int synthetic_pattern_hue_class(int p, int total_patterns);
int synthetic_pattern_aspect_class(int p);

}  // namespace fos
