#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sumlife/checkpoint.hpp"
#include "sumlife/common.hpp"
#include "sumlife/siphash.hpp"

namespace sumlife::nn {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'G', 'S', 'L', 'C'};

template <typename T>
T byteswap(T v) {
  if constexpr (sizeof(T) == 4) return __builtin_bswap32(v);
  else return __builtin_bswap64(v);
}

template <typename T>
void put_le(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("truncated checkpoint at byte offset " + std::to_string(pos));
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
  return v;
}

std::string digest_hex(const std::string& s) {
  return summary::to_hex(summary::EqcHash{siphash24(digest_key(), s)});
}

json config_to_json(const ModelConfig& c) {
  return json{{"architecture", std::string(to_string(c.arch))},
              {"hidden", c.hidden},
              {"dropout", c.dropout},
              {"lr", c.lr},
              {"alpha", c.alpha},
              {"tau", c.tau},
              {"normalize", c.normalize},
              {"zero_init_growth", c.zero_init_growth}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.arch = parse_architecture(j.at("architecture").get<std::string>());
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.dropout = j.at("dropout").get<double>();
  c.lr = j.at("lr").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.tau = j.at("tau").get<double>();
  c.normalize = j.at("normalize").get<bool>();
  c.zero_init_growth = j.at("zero_init_growth").get<bool>();
  return c;
}

}  // namespace

std::string vocabulary_digest(const learn::PredicateVocabulary& v) {
  std::string s;
  for (const auto& e : v.entries()) s.append(e).push_back('\n');
  return digest_hex(s);
}

std::string vocabulary_digest(const learn::ClassVocabulary& v) {
  std::string s;
  for (const auto& e : v.entries()) s.append(summary::to_hex(e)).push_back('\n');
  return digest_hex(s);
}

std::string encode_checkpoint(const Checkpoint& c) {
  const Network& net = c.network;
  json tensors = json::array();
  for (const auto& p : net.params()) {
    tensors.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  std::vector<std::string> classes;
  for (const auto& h : c.classes.entries()) classes.push_back(summary::to_hex(h));
  const json header{
      {"format", "sumlife-checkpoint"},
      {"model", config_to_json(net.config())},
      {"input_width", net.input_width()},
      {"classes", net.class_count()},
      {"seed", c.meta.seed},
      {"task", c.meta.task},
      {"summary_model", c.meta.summary_model},
      {"timestamp", c.meta.timestamp},
      {"dtype", "f64le"},
      {"tensors", tensors},
      {"predicate_vocabulary", c.predicates.entries()},
      {"predicate_vocabulary_digest", vocabulary_digest(c.predicates)},
      {"class_vocabulary", classes},
      {"class_vocabulary_digest", vocabulary_digest(c.classes)},
  };
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& p : net.params()) {
    for (double v : p.value.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a checkpoint (bad magic at byte offset 0)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw IoError("truncated checkpoint header at byte offset " + std::to_string(pos));
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint header: ") + e.what());
  }
  pos += header_len;

  try {
    auto predicates = learn::PredicateVocabulary::from_entries(header.at("predicate_vocabulary").get<std::vector<std::string>>());
    std::vector<summary::EqcHash> hashes;
    for (const auto& h : header.at("class_vocabulary")) hashes.push_back(summary::parse_hex(h.get<std::string>()));
    auto classes = learn::ClassVocabulary::from_entries(std::move(hashes));
    if (vocabulary_digest(predicates) != header.at("predicate_vocabulary_digest").get<std::string>() ||
        vocabulary_digest(classes) != header.at("class_vocabulary_digest").get<std::string>()) {
      throw IoError("checkpoint vocabulary digest mismatch");
    }

    std::vector<Parameter> params;
    for (const auto& t : header.at("tensors")) {
      Tensor v(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>());
      for (auto& x : v.values()) x = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
      params.push_back({t.at("name").get<std::string>(), std::move(v)});
    }
    if (pos != bytes.size()) throw IoError("trailing bytes after checkpoint payload at byte offset " + std::to_string(pos));

    CheckpointMeta meta;
    meta.seed = header.at("seed").get<std::uint64_t>();
    meta.task = header.at("task").get<std::uint64_t>();
    meta.summary_model = header.at("summary_model").get<std::string>();
    meta.timestamp = header.at("timestamp").get<std::string>();
    Network net(config_from_json(header.at("model")), header.at("input_width").get<std::size_t>(),
                header.at("classes").get<std::size_t>(), std::move(params));
    if (net.input_width() != predicates.width() || net.class_count() != classes.width()) {
      throw IoError("checkpoint dimensions disagree with its vocabularies");
    }
    return Checkpoint{std::move(net), std::move(predicates), std::move(classes), std::move(meta)};
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  const std::string bytes = encode_checkpoint(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " at byte offset 0");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_checkpoint(ss.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace sumlife::nn
