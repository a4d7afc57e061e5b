#include "fos/schema.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fos/hash.hpp"
#include "json.hpp"

namespace fos {

namespace {
const char* kDimNames[kNumAttrDims] = {"orientation", "truncation", "sport",
                                       "motion",      "viewpoint",  "state"};
}

void AttributeSchema::validate() const {
  if (static_cast<int>(dims.size()) != kNumAttrDims)
    throw std::runtime_error("attribute schema must have exactly 6 dimensions");
  for (int i = 0; i < kNumAttrDims; ++i) {
    const auto& d = dims[i];
    if (d.name != kDimNames[i])
      throw std::runtime_error("attribute schema dimension " + std::to_string(i) +
                               " must be named '" + kDimNames[i] + "', got '" + d.name + "'");
    if (static_cast<int>(d.values.size()) != kAttrCardinality[i])
      throw std::runtime_error("dimension '" + d.name + "' must have " +
                               std::to_string(kAttrCardinality[i]) + " values, got " +
                               std::to_string(d.values.size()));
    if (d.mandatory != kAttrMandatory[i])
      throw std::runtime_error("dimension '" + d.name + "' has wrong mandatory flag");
  }
}

std::string AttributeSchema::to_json_string() const {
  nlohmann::json j;
  j["format_version"] = 1;
  auto& arr = j["dimensions"] = nlohmann::json::array();
  for (const auto& d : dims) {
    nlohmann::json jd;
    jd["name"] = d.name;
    jd["mandatory"] = d.mandatory;
    jd["values"] = d.values;
    arr.push_back(jd);
  }
  return j.dump(2) + "\n";
}

AttributeSchema AttributeSchema::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  AttributeSchema s;
  for (const auto& jd : j.at("dimensions")) {
    Dimension d;
    d.name = jd.at("name").get<std::string>();
    d.mandatory = jd.at("mandatory").get<bool>();
    d.values = jd.at("values").get<std::vector<std::string>>();
    s.dims.push_back(std::move(d));
  }
  s.validate();
  return s;
}

AttributeSchema AttributeSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

void AttributeSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write schema file: " + path);
  out << to_json_string();
}

const AttributeSchema& AttributeSchema::builtin() {
  static const AttributeSchema schema = [] {
    AttributeSchema s;
    auto add = [&s](const char* name, bool mandatory, std::vector<std::string> values) {
      Dimension d;
      d.name = name;
      d.mandatory = mandatory;
      d.values = std::move(values);
      s.dims.push_back(std::move(d));
    };
    add("orientation", true,
        {"front", "front-right", "right", "back-right", "back", "back-left", "left",
         "front-left"});
    add("truncation", true,
        {"full", "ankle-up", "knee-up", "hip-up", "waist-up", "chest-up"});
    add("sport", false,
        {"none", "ball-game", "racket-game", "cycling", "riding", "skating", "skiing",
         "surfing", "swimming", "climbing", "gymnastics", "track"});
    // 31 motion values.
    add("motion", false,
        {"standing",  "walking",   "running",   "sitting",   "lying",      "jumping",
         "crouching", "kneeling",  "bending",   "reaching",  "throwing",   "catching",
         "kicking",   "swinging",  "serving",   "dribbling", "shooting",   "pedaling",
         "rowing",    "paddling",  "diving",    "sliding",   "balancing",  "stretching",
         "waving",    "pointing",  "carrying",  "pushing",   "pulling",    "climbing-up",
         "dancing"});
    add("viewpoint", false, {"eye-level", "high-angle", "low-angle", "aerial"});
    add("state", false, {"static", "dynamic", "airborne"});
    s.validate();
    return s;
  }();
  return schema;
}

std::string AttributeSchema::hash() const { return hash_hex(to_json_string()); }

std::optional<int> AttributeVector::get(AttrDim d) const {
  switch (d) {
    case AttrDim::kOrientation: return orientation;
    case AttrDim::kTruncation: return truncation;
    case AttrDim::kSport: return sport;
    case AttrDim::kMotion: return motion;
    case AttrDim::kViewpoint: return viewpoint;
    case AttrDim::kState: return state;
  }
  return std::nullopt;
}

void AttributeVector::set(AttrDim d, std::optional<int> v) {
  switch (d) {
    case AttrDim::kOrientation: orientation = v.value(); break;
    case AttrDim::kTruncation: truncation = v.value(); break;
    case AttrDim::kSport: sport = v; break;
    case AttrDim::kMotion: motion = v; break;
    case AttrDim::kViewpoint: viewpoint = v; break;
    case AttrDim::kState: state = v; break;
  }
}

void AttributeVector::validate() const {
  for (int i = 0; i < kNumAttrDims; ++i) {
    auto v = get(static_cast<AttrDim>(i));
    if (!v.has_value()) {
      if (kAttrMandatory[i])
        throw std::runtime_error("mandatory attribute dimension missing a value");
      continue;
    }
    if (*v < 0 || *v >= kAttrCardinality[i])
      throw std::runtime_error("attribute value index out of range for dimension " +
                               std::to_string(i));
  }
}

std::string AttributeVector::pattern_key() const {
  validate();
  auto tok = [](std::optional<int> v, int width) {
    if (!v.has_value()) return std::string("u");
    std::string s = std::to_string(*v);
    while (static_cast<int>(s.size()) < width) s = "0" + s;
    return s;
  };
  std::string key = "pat_o" + tok(orientation, 1) + "_t" + tok(truncation, 1) + "_s" +
                    tok(sport, 2) + "_m" + tok(motion, 2) + "_v" + tok(viewpoint, 1) + "_e" +
                    tok(state, 1);
  return key;
}

bool AttributeVector::operator==(const AttributeVector& o) const {
  return orientation == o.orientation && truncation == o.truncation && sport == o.sport &&
         motion == o.motion && viewpoint == o.viewpoint && state == o.state;
}

}  // namespace fos
