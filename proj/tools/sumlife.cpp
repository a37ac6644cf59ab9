#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sumlife/cli.hpp"
#include "sumlife/common.hpp"

namespace {

using sumlife::cli::Config;

std::string dashed(std::string_view key) {
  std::string s(key);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_subcommand(CLI::App& root, Subcommand& s, const std::string& name, const std::string& help) {
  s.app = root.add_subcommand(name, help);
  s.app->add_option("--config", s.config_file, "flat key = value configuration file");
  s.app->add_option("--in", s.inputs, "snapshot file or directory (repeatable, in time order)");
  for (const auto& k : sumlife::cli::config_keys()) {
    const std::string key(k.key);
    std::string flags = "--" + dashed(key);
    if (key == "output") flags += ",--out";
    std::string help_text(k.help);
    if (!k.default_value.empty()) help_text += " [default: " + std::string(k.default_value) + "]";
    s.options[key] = s.app->add_option(flags, s.values[key], help_text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural graph summaries and lifelong learning over RDF snapshot sequences"};
  app.require_subcommand(1);
  std::map<std::string, Subcommand> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"summarize", "summarize snapshots into EQCs, summary edges and statistics"},
      {"diff", "compare consecutive summaries and track EQC changes"},
      {"lifelong", "train incrementally over a snapshot sequence and evaluate every task"},
      {"eval", "apply a checkpoint to snapshots"},
      {"report", "recompute lifelong measures and the heatmap from a result-matrix CSV"},
      {"synth", "write seeded synthetic snapshots as N-Triples"},
  };
  for (const auto& [name, help] : commands) add_subcommand(app, subs[name], name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    Config c;
    try {
      if (!s.config_file.empty()) c.merge_file(s.config_file);
      c.apply_environment();
      for (const auto& [key, opt] : s.options) {
        if (opt->count() > 0) c.set(key, s.values[key]);
      }
      if (!s.inputs.empty()) {
        std::string joined;
        for (const auto& in : s.inputs) joined += (joined.empty() ? "" : ",") + in;
        c.set("snapshots", joined);
      }
    } catch (const sumlife::IoError& e) {
      std::cerr << "I/O error: " << e.what() << "\n";
      return 1;
    } catch (const sumlife::ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 2;
    }
    return sumlife::cli::run_command(name, c, std::cerr, std::cerr);
  }
  return 2;
}
