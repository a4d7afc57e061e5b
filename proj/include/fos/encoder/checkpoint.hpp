#pragma once

#include <stdexcept>
#include <string>

#include "fos/encoder/fg_encoder.hpp"
#include "fos/encoder/query_encoder.hpp"

namespace fos {

// A checkpoint that exists but fails validation (bad magic, bad checksum,
// truncated payload). The CLI maps this to its own exit code.
class CorruptArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-file container: magic, JSON header (format version, kind, configs,
// labels, schema hash, array table, payload checksum) and a little-endian
// float64 payload.
void save_foreground_checkpoint(ForegroundEncoder& encoder, const std::string& path,
                                const std::string& config_hash = "");
ForegroundEncoder load_foreground_checkpoint(const std::string& path);

// Query checkpoints embed the paired foreground encoder: identical to the
// training teacher in frozen modes, the fine-tuned/jointly-trained one
// otherwise, so retrieval always uses matching latent spaces.
void save_query_checkpoint(QueryEncoder& encoder, ForegroundEncoder& paired_fg,
                           const std::string& path, const std::string& config_hash = "");
struct LoadedQueryCheckpoint {
  QueryEncoder encoder;
  ForegroundEncoder paired_fg;
};
LoadedQueryCheckpoint load_query_checkpoint(const std::string& path);

}  // namespace fos
