#include "fos/dataset/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fos {

namespace fs = std::filesystem;

const ForegroundInstance* DatasetCorpus::find_instance(const std::string& id) const {
  for (const auto& inst : instances)
    if (inst.id == id) return &inst;
  return nullptr;
}

const QueryInput* DatasetCorpus::find_query(const std::string& id) const {
  for (const auto& q : queries)
    if (q.id == id) return &q;
  return nullptr;
}

std::vector<int> DatasetCorpus::query_indices(QuerySplit split) const {
  std::vector<int> out;
  for (size_t i = 0; i < queries.size(); ++i)
    if (queries[i].split == split) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<Pattern> group_patterns(const std::vector<ForegroundInstance>& instances) {
  std::map<std::string, Pattern> by_key;
  for (const auto& inst : instances) {
    if (!inst.attributes.has_value()) continue;  // unlabelled instances excluded
    const std::string key = inst.attributes->pattern_key();
    auto& pat = by_key[key];
    if (pat.member_ids.empty()) {
      pat.pattern_id = key;
      pat.attribute_key = *inst.attributes;
    }
    pat.member_ids.push_back(inst.id);
  }
  std::vector<Pattern> out;
  out.reserve(by_key.size());
  for (auto& [key, pat] : by_key) {
    std::sort(pat.member_ids.begin(), pat.member_ids.end());
    auto dup = std::adjacent_find(pat.member_ids.begin(), pat.member_ids.end());
    if (dup != pat.member_ids.end())
      throw std::runtime_error("group_patterns: duplicate instance id " + *dup);
    out.push_back(std::move(pat));
  }
  return out;
}

namespace {

nlohmann::json attributes_to_json(const AttributeVector& a, const AttributeSchema& schema) {
  nlohmann::json j;
  for (int i = 0; i < kNumAttrDims; ++i) {
    auto v = a.get(static_cast<AttrDim>(i));
    if (!v.has_value()) continue;
    const auto& dim = schema.dims[static_cast<size_t>(i)];
    j[dim.name] = dim.values[static_cast<size_t>(*v)];
  }
  return j;
}

AttributeVector attributes_from_json(const nlohmann::json& j, const AttributeSchema& schema) {
  AttributeVector a;
  bool have_orientation = false, have_truncation = false;
  for (int i = 0; i < kNumAttrDims; ++i) {
    const auto& dim = schema.dims[static_cast<size_t>(i)];
    if (!j.contains(dim.name)) {
      if (dim.mandatory)
        throw std::runtime_error("manifest attributes missing mandatory dimension " + dim.name);
      continue;
    }
    const std::string name = j.at(dim.name).get<std::string>();
    auto it = std::find(dim.values.begin(), dim.values.end(), name);
    if (it == dim.values.end())
      throw std::runtime_error("unknown attribute value '" + name + "' in dimension " + dim.name);
    int idx = static_cast<int>(it - dim.values.begin());
    a.set(static_cast<AttrDim>(i), idx);
    if (i == 0) have_orientation = true;
    if (i == 1) have_truncation = true;
  }
  if (!have_orientation || !have_truncation)
    throw std::runtime_error("manifest attributes missing mandatory dimension");
  return a;
}

std::string split_name(QuerySplit s) { return s == QuerySplit::kTrain ? "train" : "test"; }

QuerySplit split_from_name(const std::string& s) {
  if (s == "train") return QuerySplit::kTrain;
  if (s == "test") return QuerySplit::kTest;
  throw std::runtime_error("unknown query split: " + s);
}

}  // namespace

std::string corpus_manifest_json(const DatasetCorpus& corpus) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["seed"] = corpus.seed;
  j["config_hash"] = corpus.config_hash;
  j["schema"] = "schema.json";

  auto& ji = j["instances"] = nlohmann::json::array();
  for (const auto& inst : corpus.instances) {
    nlohmann::json e;
    e["id"] = inst.id;
    e["image"] = "images/fg/" + inst.id + ".png";
    if (inst.attributes.has_value())
      e["attributes"] = attributes_to_json(*inst.attributes, corpus.schema);
    if (inst.pattern_id.has_value()) e["pattern_id"] = *inst.pattern_id;
    ji.push_back(e);
  }

  auto& jq = j["queries"] = nlohmann::json::array();
  for (const auto& q : corpus.queries) {
    nlohmann::json e;
    e["id"] = q.id;
    e["background"] = "images/bg/" + q.id + ".png";
    e["rect"] = {{"cx", q.rect.cx}, {"cy", q.rect.cy}, {"w", q.rect.w}, {"h", q.rect.h}};
    e["split"] = split_name(q.split);
    jq.push_back(e);
  }

  auto& jc = j["compatibility"] = nlohmann::json::object();
  for (const auto& [qid, pats] : corpus.compatibility) jc[qid] = pats;

  return j.dump(2) + "\n";
}

void save_corpus(const DatasetCorpus& corpus, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "images" / "fg");
  fs::create_directories(fs::path(dir) / "images" / "bg");
  corpus.schema.save((fs::path(dir) / "schema.json").string());
  for (const auto& inst : corpus.instances)
    write_png(inst.image, (fs::path(dir) / "images" / "fg" / (inst.id + ".png")).string());
  for (const auto& q : corpus.queries)
    write_png(q.background, (fs::path(dir) / "images" / "bg" / (q.id + ".png")).string());
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << corpus_manifest_json(corpus);
}

DatasetCorpus load_corpus(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw std::runtime_error("cannot open dataset manifest in " + dir);
  nlohmann::json j = nlohmann::json::parse(in);

  DatasetCorpus corpus;
  corpus.seed = j.at("seed").get<uint64_t>();
  corpus.config_hash = j.value("config_hash", std::string());
  corpus.schema = AttributeSchema::load((fs::path(dir) / j.at("schema").get<std::string>()).string());

  std::set<std::string> pattern_ids;
  for (const auto& e : j.at("instances")) {
    ForegroundInstance inst;
    inst.id = e.at("id").get<std::string>();
    inst.image = read_png((fs::path(dir) / e.at("image").get<std::string>()).string());
    if (inst.image.h != inst.image.w)
      throw std::runtime_error("foreground image not square: " + inst.id);
    if (e.contains("attributes"))
      inst.attributes = attributes_from_json(e.at("attributes"), corpus.schema);
    if (e.contains("pattern_id")) {
      inst.pattern_id = e.at("pattern_id").get<std::string>();
      if (inst.attributes.has_value() && *inst.pattern_id != inst.attributes->pattern_key())
        throw std::runtime_error("pattern_id does not match attribute key for " + inst.id);
      pattern_ids.insert(*inst.pattern_id);
    }
    corpus.instances.push_back(std::move(inst));
  }

  for (const auto& e : j.at("queries")) {
    QueryInput q;
    q.id = e.at("id").get<std::string>();
    q.background = read_png((fs::path(dir) / e.at("background").get<std::string>()).string());
    const auto& r = e.at("rect");
    q.rect = Rectangle(r.at("cx").get<double>(), r.at("cy").get<double>(), r.at("w").get<double>(),
                       r.at("h").get<double>());
    q.split = split_from_name(e.value("split", "train"));
    corpus.queries.push_back(std::move(q));
  }

  if (j.contains("compatibility")) {
    for (auto it = j.at("compatibility").begin(); it != j.at("compatibility").end(); ++it) {
      std::vector<std::string> pats = it.value().get<std::vector<std::string>>();
      for (const auto& p : pats)
        if (!pattern_ids.count(p))
          throw std::runtime_error("compatibility references unknown pattern " + p);
      corpus.compatibility[it.key()] = std::move(pats);
    }
  }
  return corpus;
}

}  // namespace fos
