#include "fos/encoder/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "fos/hash.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint and embedding-store payloads are little-endian");

namespace fos {

namespace {

constexpr char kMagic[8] = {'F', 'O', 'S', 'C', 'K', 'P', 'T', '1'};

using ArrayList = std::vector<std::pair<std::string, Eigen::MatrixXd*>>;

void write_container(const std::string& path, nlohmann::json header, const ArrayList& arrays) {
  std::vector<double> payload;
  auto& table = header["arrays"] = nlohmann::json::array();
  for (const auto& [name, mat] : arrays) {
    nlohmann::json e;
    e["name"] = name;
    e["rows"] = mat->rows();
    e["cols"] = mat->cols();
    e["offset"] = payload.size();
    table.push_back(e);
    payload.insert(payload.end(), mat->data(), mat->data() + mat->size());
  }
  header["payload_checksum"] =
      hash_hex(fnv1a64(payload.data(), payload.size() * sizeof(double)));
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const uint32_t hlen = static_cast<uint32_t>(htext.size());
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

nlohmann::json read_container(const std::string& path, std::vector<double>* payload) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CorruptArtifactError("bad checkpoint magic: " + path);
  uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in) throw CorruptArtifactError("truncated checkpoint header: " + path);
  std::string htext(hlen, '\0');
  in.read(htext.data(), hlen);
  if (!in) throw CorruptArtifactError("truncated checkpoint header: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const std::exception&) {
    throw CorruptArtifactError("unparsable checkpoint header: " + path);
  }
  payload->clear();
  std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (rest.size() % sizeof(double) != 0)
    throw CorruptArtifactError("payload size not a multiple of 8: " + path);
  payload->resize(rest.size() / sizeof(double));
  std::memcpy(payload->data(), rest.data(), rest.size());
  const std::string checksum =
      hash_hex(fnv1a64(payload->data(), payload->size() * sizeof(double)));
  if (checksum != header.value("payload_checksum", std::string()))
    throw CorruptArtifactError("checkpoint checksum mismatch: " + path);
  return header;
}

void load_arrays(const nlohmann::json& header, const std::vector<double>& payload,
                 const ArrayList& arrays, const std::string& path) {
  std::map<std::string, const nlohmann::json*> table;
  for (const auto& e : header.at("arrays")) table[e.at("name").get<std::string>()] = &e;
  for (const auto& [name, mat] : arrays) {
    auto it = table.find(name);
    if (it == table.end()) throw CorruptArtifactError("checkpoint missing array " + name + ": " + path);
    const auto& e = *it->second;
    const Eigen::Index rows = e.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = e.at("cols").get<Eigen::Index>();
    const size_t offset = e.at("offset").get<size_t>();
    if (rows != mat->rows() || cols != mat->cols())
      throw CorruptArtifactError("checkpoint array shape mismatch for " + name + ": " + path);
    if (offset + static_cast<size_t>(mat->size()) > payload.size())
      throw CorruptArtifactError("checkpoint array out of bounds: " + path);
    std::memcpy(mat->data(), payload.data() + offset, sizeof(double) * static_cast<size_t>(mat->size()));
  }
}

nlohmann::json net_config_json(const nn::ConvNetConfig& cfg) {
  return {{"channels", cfg.channels}, {"feature_dim", cfg.feature_dim}};
}

nn::ConvNetConfig net_config_from_json(const nlohmann::json& j) {
  nn::ConvNetConfig cfg;
  cfg.channels = j.at("channels").get<std::vector<int>>();
  cfg.feature_dim = j.at("feature_dim").get<int>();
  return cfg;
}

ArrayList fg_arrays(ForegroundEncoder& enc, const std::string& prefix) {
  ArrayList arrays;
  for (auto& [name, mat] : enc.extractor.named_arrays()) arrays.emplace_back(prefix + name, mat);
  arrays.emplace_back(prefix + "classifier.w", &enc.classifier.W);
  arrays.emplace_back(prefix + "classifier.b", &enc.classifier.b);
  arrays.emplace_back(prefix + "centers", &enc.centers);
  return arrays;
}

nlohmann::json fg_header(const ForegroundEncoder& enc) {
  nlohmann::json j;
  j["net"] = net_config_json(enc.extractor.config());
  j["input_size"] = enc.input_size;
  j["labels"] = enc.labels;
  j["schema_hash"] = enc.schema_hash;
  return j;
}

ForegroundEncoder fg_from_header(const nlohmann::json& j) {
  return ForegroundEncoder(net_config_from_json(j.at("net")), j.at("input_size").get<int>(),
                           j.at("labels").get<std::vector<std::string>>(),
                           j.value("schema_hash", std::string()));
}

}  // namespace

void save_foreground_checkpoint(ForegroundEncoder& encoder, const std::string& path,
                                const std::string& config_hash) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["kind"] = "foreground";
  header["config_hash"] = config_hash;
  header["foreground"] = fg_header(encoder);
  write_container(path, std::move(header), fg_arrays(encoder, "fg."));
}

ForegroundEncoder load_foreground_checkpoint(const std::string& path) {
  std::vector<double> payload;
  nlohmann::json header = read_container(path, &payload);
  if (header.value("kind", std::string()) != "foreground")
    throw CorruptArtifactError("not a foreground checkpoint: " + path);
  ForegroundEncoder enc = fg_from_header(header.at("foreground"));
  load_arrays(header, payload, fg_arrays(enc, "fg."), path);
  return enc;
}

void save_query_checkpoint(QueryEncoder& encoder, ForegroundEncoder& paired_fg,
                           const std::string& path, const std::string& config_hash) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["kind"] = "query";
  header["config_hash"] = config_hash;
  header["ablation_mode"] = ablation_mode_name(encoder.mode);
  header["query"] = {{"net", net_config_json(encoder.background_net.config())},
                     {"input_size", encoder.input_size},
                     {"hidden", encoder.head1.out},
                     {"out_dim", encoder.head2.out}};
  header["foreground"] = fg_header(paired_fg);

  ArrayList arrays;
  for (auto& [name, mat] : encoder.background_net.named_arrays())
    arrays.emplace_back("bg." + name, mat);
  arrays.emplace_back("head1.w", &encoder.head1.W);
  arrays.emplace_back("head1.b", &encoder.head1.b);
  arrays.emplace_back("head2.w", &encoder.head2.W);
  arrays.emplace_back("head2.b", &encoder.head2.b);
  for (auto& [name, mat] : fg_arrays(paired_fg, "fg.")) arrays.emplace_back(name, mat);
  write_container(path, std::move(header), arrays);
}

LoadedQueryCheckpoint load_query_checkpoint(const std::string& path) {
  std::vector<double> payload;
  nlohmann::json header = read_container(path, &payload);
  if (header.value("kind", std::string()) != "query")
    throw CorruptArtifactError("not a query checkpoint: " + path);

  LoadedQueryCheckpoint out;
  const auto& jq = header.at("query");
  out.encoder = QueryEncoder(net_config_from_json(jq.at("net")), jq.at("input_size").get<int>(),
                             jq.at("hidden").get<int>(), jq.at("out_dim").get<int>(),
                             ablation_mode_from_name(header.at("ablation_mode").get<std::string>()));
  out.paired_fg = fg_from_header(header.at("foreground"));

  ArrayList arrays;
  for (auto& [name, mat] : out.encoder.background_net.named_arrays())
    arrays.emplace_back("bg." + name, mat);
  arrays.emplace_back("head1.w", &out.encoder.head1.W);
  arrays.emplace_back("head1.b", &out.encoder.head1.b);
  arrays.emplace_back("head2.w", &out.encoder.head2.W);
  arrays.emplace_back("head2.b", &out.encoder.head2.b);
  for (auto& [name, mat] : fg_arrays(out.paired_fg, "fg.")) arrays.emplace_back(name, mat);
  load_arrays(header, payload, arrays, path);
  return out;
}

}  // namespace fos
