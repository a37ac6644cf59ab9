#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "sumlife/cli.hpp"
#include "sumlife/common.hpp"
#include "sumlife/kernels.hpp"

namespace sumlife::cli {

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys{
      {"snapshots", "", "comma-separated snapshot files or directories, in time order"},
      {"timestamps", "auto", "comma-separated labels, one per snapshot (auto: file stem)"},
      {"output", "out", "output directory; nothing is written outside it"},
      {"model", "ac1", "summary model: ac1 or ac2"},
      {"degree_cap", "auto", "drop vertices with degree above N: an integer, none, or auto (100 for ac2)"},
      {"degree_mode", "total", "degree used by the cap: total, out or in"},
      {"include_rdf_type", "false", "treat rdf:type edges like any other predicate"},
      {"js_normalization", "mass", "JS divergence probabilities: mass (ext/total) or vertices (ext/|C|)"},
      {"architecture", "mlp", "classifier: mlp, graph-mlp, gcn or gcn-edges"},
      {"hidden", "auto", "comma-separated hidden sizes (auto: per architecture)"},
      {"dropout", "auto", "dropout rate (auto: per architecture)"},
      {"lr", "auto", "Adam learning rate (auto: per architecture)"},
      {"alpha", "auto", "Graph-MLP contrastive weight (auto: 1)"},
      {"tau", "auto", "Graph-MLP temperature (auto: 2)"},
      {"normalize", "false", "degree-normalize the GCN adjacency"},
      {"zero_init_growth", "false", "initialize grown weights with zeros instead of Glorot-uniform"},
      {"iterations", "100", "training iterations per task"},
      {"batch_cap", "1000", "maximum vertices per batch"},
      {"seed", "0", "run seed (SUMLIFE_SEED overrides the file, flags override both)"},
      {"threads", "1", "worker threads; 0 uses every core; results do not depend on it"},
      {"restart", "warm", "lifelong restart mode: warm or cold"},
      {"validate_every", "0", "validation accuracy every N iterations (0: never)"},
      {"kernel", "auto", "dense kernels: auto, scalar, avx2 or neon"},
      {"time_warp", "", "old checkpoint to apply to the first snapshot (lifelong)"},
      {"checkpoint", "", "checkpoint to evaluate (eval)"},
      {"matrix", "", "result-matrix CSV to report on (report)"},
      {"synth_kind", "drift", "synthetic data: drift, disjoint, pattern or random"},
      {"synth_tasks", "3", "synthetic snapshots to generate"},
      {"synth_vertices", "500", "vertices per synthetic snapshot (random: edges = 5x)"},
      {"synth_classes", "8", "classes per synthetic snapshot"},
  };
  return keys;
}

namespace {

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : config_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_uint(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return d;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::string default_timestamp(const std::filesystem::path& p) {
  std::filesystem::path name = p.filename();
  if (name.empty()) name = p.parent_path().filename();
  std::string s = name.string();
  for (const char* ext : {".gz", ".nq", ".nt"}) {
    if (s.size() > std::strlen(ext) && s.ends_with(ext)) s.resize(s.size() - std::strlen(ext));
  }
  return s;
}

std::string format_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

}  // namespace

void Config::set(std::string_view key, std::string value) {
  if (find_key(key) == nullptr) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  values_.insert_or_assign(std::string(key), trim(value));
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::string Config::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const KeySpec* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return std::string(k->default_value);
}

void Config::merge_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(no) + ": expected 'key = value'");
    }
    try {
      set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string() + " at byte offset 0");
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path.string());
}

void Config::apply_environment() {
  if (const char* s = std::getenv("SUMLIFE_SEED"); s != nullptr && *s != '\0') set("seed", s);
}

lifelong::SequenceConfig RunConfig::sequence_config() const {
  lifelong::SequenceConfig s;
  s.model = model;
  s.network = network;
  s.iterations = iterations;
  s.batch_cap = batch_cap;
  s.seed = seed;
  s.threads = threads;
  s.include_rdf_type = include_rdf_type;
  s.validate_every = validate_every;
  return s;
}

RunConfig resolve(const Config& c) {
  RunConfig r;
  for (const auto& s : split_list(c.get("snapshots"))) r.snapshots.emplace_back(s);
  const std::string ts = c.get("timestamps");
  if (ts == "auto") {
    for (const auto& p : r.snapshots) r.timestamps.push_back(default_timestamp(p));
  } else {
    r.timestamps = split_list(ts);
    if (r.timestamps.size() != r.snapshots.size()) {
      throw ConfigError("'timestamps' needs one label per snapshot (" + std::to_string(r.snapshots.size()) + ")");
    }
  }
  r.output = c.get("output");
  if (r.output.empty()) throw ConfigError("'output' must not be empty");
  r.model = summary::parse_model(c.get("model"));

  const std::string cap = c.get("degree_cap");
  if (cap == "auto") {
    r.degree_cap = r.model == summary::SummaryModel::kAc2 ? 100 : rdf::kNoDegreeCap;
  } else if (cap == "none") {
    r.degree_cap = rdf::kNoDegreeCap;
  } else {
    r.degree_cap = parse_uint<std::size_t>("degree_cap", cap);
    if (r.degree_cap < 1) throw ConfigError("'degree_cap' must be >= 1");
  }
  const std::string mode = c.get("degree_mode");
  if (mode == "total") r.degree_mode = rdf::DegreeMode::kTotal;
  else if (mode == "out") r.degree_mode = rdf::DegreeMode::kOut;
  else if (mode == "in") r.degree_mode = rdf::DegreeMode::kIn;
  else throw ConfigError("'degree_mode' expects total, out or in");

  r.include_rdf_type = parse_bool("include_rdf_type", c.get("include_rdf_type"));
  const std::string js = c.get("js_normalization");
  if (js == "mass") r.js_normalization = measures::JsNormalization::kExtensionMass;
  else if (js == "vertices") r.js_normalization = measures::JsNormalization::kSummaryVertices;
  else throw ConfigError("'js_normalization' expects mass or vertices");

  r.network = nn::ModelConfig::defaults(nn::parse_architecture(c.get("architecture")));
  if (const auto h = c.get("hidden"); h != "auto") {
    r.network.hidden.clear();
    for (const auto& s : split_list(h)) r.network.hidden.push_back(parse_uint<std::size_t>("hidden", s));
  }
  if (const auto v = c.get("dropout"); v != "auto") r.network.dropout = parse_double("dropout", v);
  if (const auto v = c.get("lr"); v != "auto") r.network.lr = parse_double("lr", v);
  if (const auto v = c.get("alpha"); v != "auto") r.network.alpha = parse_double("alpha", v);
  if (const auto v = c.get("tau"); v != "auto") r.network.tau = parse_double("tau", v);
  r.network.normalize = parse_bool("normalize", c.get("normalize"));
  r.network.zero_init_growth = parse_bool("zero_init_growth", c.get("zero_init_growth"));
  r.network.validate();

  r.iterations = parse_uint<std::size_t>("iterations", c.get("iterations"));
  r.batch_cap = parse_uint<std::size_t>("batch_cap", c.get("batch_cap"));
  if (r.batch_cap < 1) throw ConfigError("'batch_cap' must be >= 1");
  r.seed = parse_uint<std::uint64_t>("seed", c.get("seed"));
  r.threads = parse_uint<unsigned>("threads", c.get("threads"));
  r.restart = lifelong::parse_restart(c.get("restart"));
  r.validate_every = parse_uint<std::size_t>("validate_every", c.get("validate_every"));
  r.kernel = c.get("kernel");
  kernels::parse_kind(r.kernel);
  if (const auto v = c.get("time_warp"); !v.empty()) r.time_warp = v;
  if (const auto v = c.get("checkpoint"); !v.empty()) r.checkpoint = v;
  if (const auto v = c.get("matrix"); !v.empty()) r.matrix = v;
  r.synth_kind = c.get("synth_kind");
  if (r.synth_kind != "drift" && r.synth_kind != "disjoint" && r.synth_kind != "pattern" && r.synth_kind != "random") {
    throw ConfigError("'synth_kind' expects drift, disjoint, pattern or random");
  }
  r.synth_tasks = parse_uint<std::size_t>("synth_tasks", c.get("synth_tasks"));
  r.synth_vertices = parse_uint<std::size_t>("synth_vertices", c.get("synth_vertices"));
  r.synth_classes = parse_uint<std::size_t>("synth_classes", c.get("synth_classes"));
  return r;
}

std::string resolved_text(const Config& c) {
  const RunConfig r = resolve(c);
  std::map<std::string, std::string> resolved;
  for (const auto& k : config_keys()) resolved[std::string(k.key)] = c.get(k.key);
  auto join = [](const auto& items) {
    std::string out;
    for (const auto& i : items) {
      if (!out.empty()) out += ",";
      if constexpr (std::is_same_v<std::decay_t<decltype(i)>, std::filesystem::path>) out += i.string();
      else if constexpr (std::is_arithmetic_v<std::decay_t<decltype(i)>>) out += std::to_string(i);
      else out += i;
    }
    return out;
  };
  resolved["timestamps"] = join(r.timestamps);
  resolved["degree_cap"] = r.degree_cap == rdf::kNoDegreeCap ? "none" : std::to_string(r.degree_cap);
  resolved["hidden"] = join(r.network.hidden);
  resolved["dropout"] = format_double(r.network.dropout);
  resolved["lr"] = format_double(r.network.lr);
  resolved["alpha"] = format_double(r.network.alpha);
  resolved["tau"] = format_double(r.network.tau);
  resolved["seed"] = std::to_string(r.seed);

  std::string out;
  for (const auto& k : config_keys()) out += std::string(k.key) + " = " + resolved[std::string(k.key)] + "\n";
  return out;
}

}  // namespace sumlife::cli
