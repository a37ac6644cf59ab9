#include <fstream>
#include <ostream>
#include <sstream>

#include "sumlife/checkpoint.hpp"
#include "sumlife/cli.hpp"
#include "sumlife/common.hpp"
#include "sumlife/kernels.hpp"
#include "sumlife/rng.hpp"
#include "sumlife/synth.hpp"

namespace sumlife::cli {

namespace {

namespace fs = std::filesystem;

// Shared run bookkeeping: resolved config, output root, manifest.
class Run {
 public:
  Run(const Config& c, std::string command)
      : config_text_(resolved_text(c)), cfg_(resolve(c)), manifest_(std::move(command), config_text_) {
    kernels::set_active(kernels::parse_kind(cfg_.kernel));
    std::error_code ec;
    fs::create_directories(cfg_.output, ec);
    if (ec) throw IoError("cannot create output directory " + cfg_.output.string() + ": " + ec.message());
  }

  const RunConfig& cfg() const { return cfg_; }
  Manifest& manifest() { return manifest_; }
  const fs::path& root() const { return cfg_.output; }

  void text(const fs::path& rel, std::string_view body) {
    write_text(root(), rel, body);
    manifest_.add_output(root(), rel);
  }
  void json(const fs::path& rel, const nlohmann::json& j) { text(rel, j.dump(2) + "\n"); }
  /// Registers a file some other writer already produced.
  void produced(const fs::path& rel) { manifest_.add_output(root(), rel); }
  fs::path prepare(const fs::path& rel) {
    const fs::path p = root() / rel;
    fs::create_directories(p.parent_path());
    return p;
  }

  void finish() {
    manifest_.finish_stage();
    write_text(root(), "resolved.conf", config_text_);
    manifest_.write(root());
  }

 private:
  std::string config_text_;
  RunConfig cfg_;
  Manifest manifest_;
};

std::vector<rdf::SnapshotGraph> load_graphs(const RunConfig& cfg, std::ostream& log) {
  std::vector<rdf::SnapshotGraph> out;
  for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
    rdf::SnapshotGraph g = rdf::load_snapshot(cfg.snapshots[i], cfg.timestamps[i]);
    log << "loaded " << cfg.snapshots[i].string() << ": " << g.vertex_count() << " vertices, " << g.edge_count()
        << " edges, " << g.skipped_lines() << " skipped lines\n";
    if (cfg.degree_cap != rdf::kNoDegreeCap) {
      g = rdf::filter_high_degree(g, cfg.degree_cap, cfg.degree_mode);
      log << "  degree cap " << cfg.degree_cap << ": " << g.vertex_count() << " vertices, " << g.edge_count()
          << " edges remain\n";
    }
    out.push_back(std::move(g));
  }
  return out;
}

void require_snapshots(const RunConfig& cfg, std::size_t n, std::string_view command) {
  if (cfg.snapshots.size() < n) {
    throw ConfigError(std::string(command) + " needs at least " + std::to_string(n) + " snapshot(s)");
  }
}

summary::SummaryOptions summary_options(const RunConfig& cfg) {
  summary::SummaryOptions o;
  o.include_rdf_type = cfg.include_rdf_type;
  o.threads = cfg.threads;
  return o;
}

bool is_summary_dir(const fs::path& p) {
  return fs::is_directory(p) && fs::exists(p / "stats.json") && fs::exists(p / "eqcs.tsv") &&
         fs::exists(p / "summary.tsv");
}

summary::Summary load_summary_dir(const fs::path& dir) {
  std::ifstream in(dir / "stats.json");
  if (!in) throw IoError("cannot open " + (dir / "stats.json").string());
  nlohmann::json stats;
  try {
    in >> stats;
    return summary::read_summary_tsv(dir / "eqcs.tsv", dir / "summary.tsv",
                                     summary::parse_model(stats.at("model").get<std::string>()),
                                     stats.at("timestamp").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed " + (dir / "stats.json").string() + ": " + e.what());
  }
}

std::string checkpoint_name(std::size_t task) { return "checkpoints/task-" + std::to_string(task + 1) + ".ckpt"; }

nlohmann::json diagnostics_json(const lifelong::SequenceResult& res, const lifelong::TaskSequence& seq) {
  nlohmann::json tasks = nlohmann::json::array();
  for (std::size_t i = 0; i < res.diagnostics.size(); ++i) {
    const auto& d = res.diagnostics[i];
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& e : d.evaluations) evals.push_back(evaluation_json(e));
    nlohmann::json validation = nlohmann::json::array();
    for (const auto& [it, a] : d.training.validation) validation.push_back({it, a});
    tasks.push_back({{"task", i + 1},
                     {"timestamp", seq.tasks[i].timestamp},
                     {"predicates", seq.tasks[i].predicate_width},
                     {"classes", seq.tasks[i].class_width},
                     {"losses", d.training.losses},
                     {"validation", validation},
                     {"evaluations", evals}});
  }
  return {{"tasks", tasks}};
}

nlohmann::json time_warp_json(const lifelong::TimeWarpResult& w, const nn::Checkpoint& old, std::string_view next) {
  return {{"checkpoint_timestamp", old.meta.timestamp},
          {"snapshot", next},
          {"frozen", evaluation_json(w.frozen)},
          {"retrained_warm", evaluation_json(w.retrained)},
          {"cold", evaluation_json(w.cold)}};
}

void check_checkpoint_model(const nn::Checkpoint& ck, const RunConfig& cfg) {
  if (ck.meta.summary_model != summary::to_string(cfg.model)) {
    throw ConfigError("checkpoint was trained on " + ck.meta.summary_model + " summaries but model = " +
                      std::string(summary::to_string(cfg.model)));
  }
}

}  // namespace

void cmd_summarize(const Config& c, std::ostream& log) {
  Run run(c, "summarize");
  const RunConfig& cfg = run.cfg();
  require_snapshots(cfg, 1, "summarize");
  run.manifest().start_stage("ingest");
  const auto graphs = load_graphs(cfg, log);
  run.manifest().start_stage("summarize");
  for (const auto& g : graphs) {
    // A single snapshot writes into the output root, several into one subdirectory each.
    const fs::path dir = graphs.size() == 1 ? fs::path() : fs::path(g.timestamp());
    const summary::Summary s = summary::summarize(g, cfg.model, summary_options(cfg));
    summary::write_eqcs_tsv(g, s, run.prepare(dir / "eqcs.tsv"));
    run.produced(dir / "eqcs.tsv");
    summary::write_summary_tsv(s.graph, run.prepare(dir / "summary.tsv"));
    run.produced(dir / "summary.tsv");
    if (s.graph.eqcs.empty()) {
      log << g.timestamp() << ": empty summary, no statistics\n";
      run.json(dir / "stats.json", {{"timestamp", s.graph.timestamp},
                                    {"model", std::string(summary::to_string(s.graph.model))},
                                    {"eqcs", 0}});
      continue;
    }
    const auto st = measures::unary_stats(s.graph, s.ext);
    run.json(dir / "stats.json", stats_json(s.graph, st));
    run.text(dir / "hist_attrs_per_eqc.csv", histogram_csv(st.dist_attrs_per_eqc, "attributes"));
    run.text(dir / "hist_members_per_eqc.csv", histogram_csv(st.dist_members_per_eqc, "members"));
    run.text(dir / "hist_predicate_usage.csv", histogram_csv(st.dist_predicate_usage, "usage"));
    log << g.timestamp() << ": " << s.graph.eqcs.size() << " EQCs, " << s.graph.edges.size() << " summary edges\n";
  }
  run.finish();
}

void cmd_diff(const Config& c, std::ostream& log) {
  Run run(c, "diff");
  const RunConfig& cfg = run.cfg();
  require_snapshots(cfg, 2, "diff");
  run.manifest().start_stage("summarize");
  std::vector<summary::Summary> seq;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
    if (is_summary_dir(cfg.snapshots[i])) {
      seq.push_back(load_summary_dir(cfg.snapshots[i]));
      log << "read summary " << cfg.snapshots[i].string() << "\n";
    } else {
      rdf::SnapshotGraph g = rdf::load_snapshot(cfg.snapshots[i], cfg.timestamps[i]);
      if (cfg.degree_cap != rdf::kNoDegreeCap) g = rdf::filter_high_degree(g, cfg.degree_cap, cfg.degree_mode);
      seq.push_back(summary::summarize(g, cfg.model, summary_options(cfg)));
      log << "summarized " << cfg.snapshots[i].string() << "\n";
    }
    labels.push_back(cfg.timestamps[i]);
    if (seq.back().graph.model != seq.front().graph.model) {
      throw ConfigError("summary models differ: " + labels.front() + " is " +
                        std::string(summary::to_string(seq.front().graph.model)) + ", " + labels.back() + " is " +
                        std::string(summary::to_string(seq.back().graph.model)));
    }
  }
  run.manifest().start_stage("diff");
  std::vector<measures::DiffReport> diffs;
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 1; i < seq.size(); ++i) {
    diffs.push_back(measures::diff(seq[i - 1], seq[i], cfg.js_normalization));
    pairs.push_back(diff_json(diffs.back(), labels[i - 1], labels[i]));
  }
  const auto track = measures::meta_track(std::span<const summary::Summary>(seq));
  run.json("diff.json", {{"model", std::string(summary::to_string(seq.front().graph.model))}, {"pairs", pairs}});
  run.text("meta.csv", meta_csv(labels, track, diffs));
  run.finish();
}

void cmd_lifelong(const Config& c, std::ostream& log) {
  Run run(c, "lifelong");
  const RunConfig& cfg = run.cfg();
  require_snapshots(cfg, 1, "lifelong");
  const auto scfg = cfg.sequence_config();
  run.manifest().start_stage("ingest");
  auto graphs = load_graphs(cfg, log);

  if (cfg.time_warp) {
    run.manifest().start_stage("time_warp");
    const nn::Checkpoint old = nn::load_checkpoint(*cfg.time_warp);
    check_checkpoint_model(old, cfg);
    const auto w = lifelong::time_warp(old, graphs.front(), scfg);
    log << "time warp " << old.meta.timestamp << " -> " << graphs.front().timestamp() << ": frozen "
        << w.frozen.accuracy << ", retrained " << w.retrained.accuracy << ", cold " << w.cold.accuracy << "\n";
    run.json("timewarp.json", time_warp_json(w, old, graphs.front().timestamp()));
  }

  run.manifest().start_stage("prepare");
  const auto seq = lifelong::prepare_sequence(std::move(graphs), scfg);
  run.manifest().start_stage("train_evaluate");
  const auto res = lifelong::run_sequence(seq, cfg.restart, [&](std::size_t i, const nn::Checkpoint&) {
    log << "task " << i + 1 << "/" << seq.tasks.size() << " (" << seq.tasks[i].timestamp << ") done\n";
  });

  run.manifest().start_stage("report");
  for (std::size_t i = 0; i < res.checkpoints.size(); ++i) {
    nn::save_checkpoint(res.checkpoints[i], run.prepare(checkpoint_name(i)));
    run.produced(checkpoint_name(i));
  }
  seq.predicates.save(run.prepare("vocab/predicates.txt"));
  run.produced("vocab/predicates.txt");
  seq.classes.save(run.prepare("vocab/classes.txt"));
  run.produced("vocab/classes.txt");

  std::vector<std::string> labels;
  for (const auto& t : seq.tasks) labels.push_back(t.timestamp);
  run.text("R.csv", lifelong::result_matrix_csv(res.r));
  nlohmann::json report = report_json(lifelong::make_report(res.r));
  report["restart"] = std::string(lifelong::to_string(cfg.restart));
  report["architecture"] = std::string(nn::to_string(cfg.network.arch));
  report["timestamps"] = labels;
  run.json("report.json", report);
  run.text("heatmap.svg", heatmap_svg(res.r, labels));
  run.json("diagnostics.json", diagnostics_json(res, seq));
  log << "ACC " << lifelong::acc(res.r) << "\n";
  run.finish();
}

void cmd_eval(const Config& c, std::ostream& log) {
  Run run(c, "eval");
  const RunConfig& cfg = run.cfg();
  if (!cfg.checkpoint) throw ConfigError("eval needs 'checkpoint'");
  require_snapshots(cfg, 1, "eval");
  run.manifest().start_stage("ingest");
  const nn::Checkpoint ck = nn::load_checkpoint(*cfg.checkpoint);
  check_checkpoint_model(ck, cfg);
  const auto graphs = load_graphs(cfg, log);
  run.manifest().start_stage("evaluate");
  auto scfg = cfg.sequence_config();
  scfg.network = ck.network.config();
  nlohmann::json results = nlohmann::json::array();
  for (const auto& g : graphs) {
    auto predicates = ck.predicates;
    auto classes = ck.classes;
    const auto task = lifelong::prepare_task(g, predicates, classes, scfg);
    const auto e = lifelong::evaluate(ck.network, task, scfg);
    nlohmann::json j = evaluation_json(e);
    j["timestamp"] = g.timestamp();
    results.push_back(j);
    log << g.timestamp() << ": accuracy " << e.accuracy << " over " << e.tested << " test vertices\n";
  }
  run.json("eval.json", {{"checkpoint_timestamp", ck.meta.timestamp},
                         {"checkpoint_task", ck.meta.task + 1},
                         {"snapshots", results}});
  run.finish();
}

void cmd_report(const Config& c, std::ostream& log) {
  Run run(c, "report");
  const RunConfig& cfg = run.cfg();
  if (!cfg.matrix) throw ConfigError("report needs 'matrix'");
  std::ifstream in(*cfg.matrix, std::ios::binary);
  if (!in) throw IoError("cannot open " + cfg.matrix->string() + " at byte offset 0");
  std::ostringstream ss;
  ss << in.rdbuf();
  run.manifest().start_stage("report");
  const auto r = lifelong::parse_result_matrix_csv(ss.str());
  lifelong::check_square(r);
  std::vector<std::string> labels = cfg.timestamps;
  if (labels.size() != r.size()) {
    labels.clear();
    for (std::size_t i = 0; i < r.size(); ++i) labels.push_back(std::to_string(i + 1));
  }
  run.json("report.json", report_json(lifelong::make_report(r)));
  run.text("heatmap.svg", heatmap_svg(r, labels));
  log << "ACC " << lifelong::acc(r) << "\n";
  run.finish();
}

void cmd_synth(const Config& c, std::ostream& log) {
  Run run(c, "synth");
  const RunConfig& cfg = run.cfg();
  run.manifest().start_stage("generate");
  std::vector<rdf::SnapshotGraph> graphs;
  if (cfg.synth_kind == "drift") {
    synth::DriftSpec d;
    d.tasks = cfg.synth_tasks;
    d.vertices = cfg.synth_vertices;
    d.shared_classes = cfg.synth_classes / 2;
    d.unique_classes = cfg.synth_classes - d.shared_classes;
    d.seed = cfg.seed;
    graphs = synth::drift_sequence(d);
  } else if (cfg.synth_kind == "disjoint") {
    graphs = synth::disjoint_pair(cfg.synth_vertices, cfg.synth_classes, cfg.seed);
  } else {
    for (std::size_t t = 0; t < cfg.synth_tasks; ++t) {
      if (cfg.synth_kind == "pattern") {
        synth::PatternGraphSpec p;
        p.vertices = cfg.synth_vertices;
        p.patterns = synth::binary_patterns(cfg.synth_classes, "http://example.org/p/");
        p.seed = derive_seed(cfg.seed, t);
        graphs.push_back(synth::pattern_graph(p, synth::task_timestamp(t)));
      } else {
        synth::RandomGraphSpec r;
        r.vertices = cfg.synth_vertices;
        r.edges = cfg.synth_vertices * 5;
        r.predicates = cfg.synth_classes;
        r.seed = derive_seed(cfg.seed, t);
        graphs.push_back(synth::random_graph(r, synth::task_timestamp(t)));
      }
    }
  }
  for (const auto& g : graphs) {
    const fs::path rel = g.timestamp() + ".nt";
    rdf::write_ntriples(g, run.prepare(rel));
    run.produced(rel);
    log << "wrote " << (run.root() / rel).string() << " (" << g.edge_count() << " edges)\n";
  }
  run.finish();
}

int run_command(std::string_view name, const Config& c, std::ostream& log, std::ostream& err) {
  try {
    if (name == "summarize") cmd_summarize(c, log);
    else if (name == "diff") cmd_diff(c, log);
    else if (name == "lifelong") cmd_lifelong(c, log);
    else if (name == "eval") cmd_eval(c, log);
    else if (name == "report") cmd_report(c, log);
    else if (name == "synth") cmd_synth(c, log);
    else throw ConfigError("unknown command '" + std::string(name) + "'");
    return 0;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sumlife::cli
