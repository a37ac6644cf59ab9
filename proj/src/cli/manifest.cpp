#include <sys/resource.h>

#include <fstream>
#include <sstream>

#include "sumlife/checkpoint.hpp"
#include "sumlife/cli.hpp"
#include "sumlife/common.hpp"
#include "sumlife/siphash.hpp"

#ifndef SUMLIFE_VERSION
#define SUMLIFE_VERSION "0.0.0"
#endif

namespace sumlife::cli {

std::string digest_bytes(std::string_view bytes) {
  return summary::to_hex(summary::EqcHash{siphash24(digest_key(), bytes)});
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " at byte offset 0");
  std::ostringstream ss;
  ss << in.rdbuf();
  return digest_bytes(ss.str());
}

std::string code_digest() {
  std::string id = "sumlife " SUMLIFE_VERSION;
  id += " checkpoint-v" + std::to_string(nn::kCheckpointVersion);
#ifdef __VERSION__
  id += " " __VERSION__;
#endif
  return digest_bytes(id);
}

std::uint64_t peak_rss_bytes() {
  rusage u{};
  if (getrusage(RUSAGE_SELF, &u) != 0) return 0;
  return static_cast<std::uint64_t>(u.ru_maxrss) * 1024;  // Linux reports KiB
}

Manifest::Manifest(std::string command, std::string resolved_config)
    : command_(std::move(command)), config_(std::move(resolved_config)) {}

void Manifest::start_stage(std::string name) {
  if (open_) finish_stage();
  open_.emplace(std::move(name), std::chrono::steady_clock::now());
}

void Manifest::finish_stage() {
  if (!open_) return;
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - open_->second;
  stages_.push_back({open_->first, d.count(), peak_rss_bytes()});
  open_.reset();
}

void Manifest::add_output(const std::filesystem::path& root, const std::filesystem::path& relative) {
  outputs_[relative.generic_string()] = digest_file(root / relative);
}

void Manifest::write(const std::filesystem::path& root) const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : stages_) {
    stages.push_back({{"name", s.name}, {"seconds", s.seconds}, {"peak_rss_bytes", s.peak_rss}});
  }
  nlohmann::json config = nlohmann::json::object();
  std::istringstream in(config_);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  const nlohmann::json m{
      {"command", command_},
      {"version", SUMLIFE_VERSION},
      {"code_digest", code_digest()},
      {"config", config},
      {"config_digest", digest_bytes(config_)},
      {"stages", stages},
      {"outputs", outputs_},
  };
  write_text(root, "manifest.json", m.dump(2) + "\n");
}

}  // namespace sumlife::cli
