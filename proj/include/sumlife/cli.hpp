#pragma once

// Configuration, run manifests, report rendering and the command
// implementations behind the `sumlife` executable.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sumlife/lifelong.hpp"
#include "sumlife/measures.hpp"
#include "sumlife/nn.hpp"
#include "sumlife/rdf.hpp"

namespace sumlife::cli {

// ---- configuration --------------------------------------------------------

struct KeySpec {
  std::string_view key;
  std::string_view default_value;  // "auto": resolved from other keys
  std::string_view help;
};

/// Every accepted configuration key, in documentation order.
const std::vector<KeySpec>& config_keys();

/// Flat `key = value` configuration. Lines starting with '#' are comments.
class Config {
 public:
  /// Throws ConfigError for an unknown key.
  void set(std::string_view key, std::string value);
  bool has(std::string_view key) const;
  /// Explicit value or the key's default.
  std::string get(std::string_view key) const;

  void merge_text(std::string_view text, std::string_view origin);
  void merge_file(const std::filesystem::path& path);  // IoError / ConfigError
  /// Applies SUMLIFE_SEED when set in the environment.
  void apply_environment();

  const std::map<std::string, std::string, std::less<>>& explicit_values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Typed view over a Config with every "auto" default resolved.
struct RunConfig {
  std::vector<std::filesystem::path> snapshots;
  std::vector<std::string> timestamps;
  std::filesystem::path output;
  summary::SummaryModel model = summary::SummaryModel::kAc1;
  std::size_t degree_cap = rdf::kNoDegreeCap;
  rdf::DegreeMode degree_mode = rdf::DegreeMode::kTotal;
  bool include_rdf_type = false;
  measures::JsNormalization js_normalization = measures::JsNormalization::kExtensionMass;
  nn::ModelConfig network;
  std::size_t iterations = 100;
  std::size_t batch_cap = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  lifelong::Restart restart = lifelong::Restart::kWarm;
  std::size_t validate_every = 0;
  std::string kernel = "auto";
  std::optional<std::filesystem::path> time_warp;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> matrix;
  std::string synth_kind = "drift";
  std::size_t synth_tasks = 3;
  std::size_t synth_vertices = 500;
  std::size_t synth_classes = 8;

  lifelong::SequenceConfig sequence_config() const;
};

/// Throws ConfigError for malformed values.
RunConfig resolve(const Config& c);

/// `key = value` for every key, resolved; feeding it back reproduces the run.
std::string resolved_text(const Config& c);

// ---- manifest -------------------------------------------------------------

/// Hex SipHash digest (keyed with the digest key) of bytes / a file.
std::string digest_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

/// Build identity: version, checkpoint format, compiler.
std::string code_digest();

/// Peak resident set size of this process in bytes.
std::uint64_t peak_rss_bytes();

class Manifest {
 public:
  Manifest(std::string command, std::string resolved_config);

  /// Times a stage; call finish_stage with the same name afterwards.
  void start_stage(std::string name);
  void finish_stage();
  /// Registers an output file (path relative to the output directory).
  void add_output(const std::filesystem::path& root, const std::filesystem::path& relative);
  /// Writes manifest.json into root (it is not listed among its own outputs).
  void write(const std::filesystem::path& root) const;

  const std::map<std::string, std::string>& outputs() const { return outputs_; }

 private:
  struct Stage {
    std::string name;
    double seconds;
    std::uint64_t peak_rss;
  };
  std::string command_;
  std::string config_;
  std::vector<Stage> stages_;
  std::optional<std::pair<std::string, std::chrono::steady_clock::time_point>> open_;
  std::map<std::string, std::string> outputs_;
};

// ---- rendering ------------------------------------------------------------

nlohmann::json stats_json(const summary::SummaryGraph& s, const measures::SummaryStats& st);
std::string histogram_csv(const measures::Histogram& h, std::string_view value_column);
nlohmann::json diff_json(const measures::DiffReport& d, std::string_view from, std::string_view to);
/// Columns: index,timestamp,eqcs,added,deleted,recurring,new_vs_first,
/// reappearing,cumulative_seen,jaccard_vs_prev,js_vs_prev
std::string meta_csv(const std::vector<std::string>& timestamps, const measures::MetaTrack& track,
                     const std::vector<measures::DiffReport>& diffs);
nlohmann::json report_json(const lifelong::LifelongReport& r);
/// Self-contained SVG accuracy heatmap; cell text is R[i][j] to 2 decimals.
std::string heatmap_svg(const lifelong::ResultMatrix& r, const std::vector<std::string>& labels);
nlohmann::json evaluation_json(const lifelong::Evaluation& e);

/// Writes text to root/relative, creating parent directories.
void write_text(const std::filesystem::path& root, const std::filesystem::path& relative, std::string_view text);

// ---- commands -------------------------------------------------------------

// Each command reads the configuration, writes into cfg `output`, and throws
// IoError / ConfigError / NumericalError on failure.
void cmd_summarize(const Config& c, std::ostream& log);
void cmd_diff(const Config& c, std::ostream& log);
void cmd_lifelong(const Config& c, std::ostream& log);
void cmd_eval(const Config& c, std::ostream& log);
void cmd_report(const Config& c, std::ostream& log);
void cmd_synth(const Config& c, std::ostream& log);

/// Dispatches by name and maps exceptions to exit codes
/// (0 ok, 1 I/O, 2 configuration, 3 numerical).
int run_command(std::string_view name, const Config& c, std::ostream& log, std::ostream& err);

}  // namespace sumlife::cli
