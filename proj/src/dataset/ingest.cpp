#include "fos/dataset/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fos/hash.hpp"
#include "json.hpp"

namespace fos {

namespace fs = std::filesystem;

IngestResult build_dataset_from_annotations(const std::string& annotations_path,
                                            const DecomposeConfig& cfg,
                                            const InpaintFn& inpainter) {
  std::ifstream in(annotations_path);
  if (!in) throw std::runtime_error("cannot open annotations manifest: " + annotations_path);
  nlohmann::json j = nlohmann::json::parse(in);
  const fs::path base = fs::path(annotations_path).parent_path();

  IngestResult result;
  result.corpus.schema = AttributeSchema::builtin();
  const auto& schema = result.corpus.schema;

  for (const auto& e : j.at("composites")) {
    AnnotatedComposite comp;
    comp.id = e.at("id").get<std::string>();
    comp.image = read_png((base / e.at("image").get<std::string>()).string());
    comp.category = e.value("category", std::string("unknown"));
    Image mask_img = read_png((base / e.at("mask").get<std::string>()).string());
    if (mask_img.h != comp.image.h || mask_img.w != comp.image.w)
      throw std::runtime_error("mask size mismatch for composite " + comp.id);
    comp.mask.assign(static_cast<size_t>(mask_img.h) * mask_img.w, 0);
    for (int y = 0; y < mask_img.h; ++y)
      for (int x = 0; x < mask_img.w; ++x)
        if (mask_img.at(y, x, 0) > 0.0f || mask_img.at(y, x, 1) > 0.0f ||
            mask_img.at(y, x, 2) > 0.0f)
          comp.mask[static_cast<size_t>(y) * mask_img.w + x] = 1;

    std::pair<QueryInput, ForegroundInstance> pair;
    try {
      pair = decompose(comp, inpainter, cfg);
    } catch (const std::exception&) {
      ++result.skipped;  // heavily occluded / small / incomplete samples
      continue;
    }

    if (e.contains("attributes")) {
      AttributeVector attrs;
      for (int i = 0; i < kNumAttrDims; ++i) {
        const auto& dim = schema.dims[static_cast<size_t>(i)];
        if (!e.at("attributes").contains(dim.name)) continue;
        const std::string name = e.at("attributes").at(dim.name).get<std::string>();
        auto it = std::find(dim.values.begin(), dim.values.end(), name);
        if (it == dim.values.end())
          throw std::runtime_error("unknown attribute value '" + name + "' for " + comp.id);
        attrs.set(static_cast<AttrDim>(i), static_cast<int>(it - dim.values.begin()));
      }
      attrs.validate();
      pair.second.attributes = attrs;
      pair.second.pattern_id = attrs.pattern_key();
      result.corpus.compatibility[pair.first.id] = {attrs.pattern_key()};
    }

    result.corpus.queries.push_back(std::move(pair.first));
    result.corpus.instances.push_back(std::move(pair.second));
  }

  result.corpus.config_hash = hash_hex(fnv1a64(annotations_path));
  return result;
}

}  // namespace fos
