#pragma once

#include <string>
#include <vector>

#include "fos/dataset/corpus.hpp"
#include "fos/dataset/decompose.hpp"

namespace fos {

// Thin adapter over a segmentation-annotation manifest:
//   { "composites": [ { "id": "...", "image": "rel/path.png",
//                       "mask": "rel/mask.png", "category": "person",
//                       "attributes": { "orientation": "front", ... } } ] }
// Mask PNGs are binary: any nonzero pixel is foreground.
//
// Each composite yields one (query, foreground) pair; pairs whose mask fails
// the decompose thresholds are skipped and counted. Labelled instances are
// grouped into patterns; each query is compatible with its own instance's
// pattern (they come from the same photograph).
struct IngestResult {
  DatasetCorpus corpus;
  int skipped = 0;
};

IngestResult build_dataset_from_annotations(const std::string& annotations_path,
                                            const DecomposeConfig& cfg,
                                            const InpaintFn& inpainter);

}  // namespace fos
