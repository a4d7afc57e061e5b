#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fos {

// The six attribute dimensions that define a foreground pattern.
// Cardinalities are fixed (8/6/12/31/4/3) and validated against any schema
// file at load; the value names themselves are data, not code constants.
enum class AttrDim { kOrientation = 0, kTruncation, kSport, kMotion, kViewpoint, kState };

constexpr int kNumAttrDims = 6;
constexpr std::array<int, kNumAttrDims> kAttrCardinality = {8, 6, 12, 31, 4, 3};
// Orientation and truncation must always carry a value; the rest may be
// left unspecified.
constexpr std::array<bool, kNumAttrDims> kAttrMandatory = {true, true, false, false, false, false};

struct AttributeSchema {
  struct Dimension {
    std::string name;
    bool mandatory = false;
    std::vector<std::string> values;
  };
  std::vector<Dimension> dims;

  const Dimension& dim(AttrDim d) const { return dims[static_cast<int>(d)]; }

  // Throws if dimension count, cardinalities or mandatory flags do not match
  // the fixed contract above.
  void validate() const;

  std::string to_json_string() const;
  static AttributeSchema from_json_string(const std::string& text);
  static AttributeSchema load(const std::string& path);
  void save(const std::string& path) const;

  // Built-in schema with generic value names at the exact cardinalities.
  static const AttributeSchema& builtin();

  std::string hash() const;  // content hash, recorded in checkpoints
};

// Value indices per dimension; nullopt means "unspecified" (allowed only on
// the optional dimensions).
struct AttributeVector {
  int orientation = 0;
  int truncation = 0;
  std::optional<int> sport;
  std::optional<int> motion;
  std::optional<int> viewpoint;
  std::optional<int> state;

  std::optional<int> get(AttrDim d) const;
  void set(AttrDim d, std::optional<int> v);

  // Throws if an index is out of range or a mandatory dimension is missing.
  void validate() const;

  // Canonical pattern key, e.g. "pat_o3_t0_s04_m07_v1_e2" ('u' = unspecified).
  // Identical keys <=> identical values in every dimension.
  std::string pattern_key() const;

  bool operator==(const AttributeVector& o) const;
};

}  // namespace fos
