// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles/bisimulation.hpp"
#include "../support/nn_support.hpp"
#include "../support/summary_fixtures.hpp"
#include "sumlife/checkpoint.hpp"
#include "sumlife/cli.hpp"
#include "sumlife/lifelong.hpp"
#include "sumlife/measures.hpp"
#include "sumlife/rng.hpp"
#include "sumlife/summarizer.hpp"
#include "sumlife/synth.hpp"

namespace fs = std::filesystem;
using namespace sumlife;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sumlife_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  Rng pick(20240101);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    synth::RandomGraphSpec spec;
    spec.vertices = 1 + pick.below(200);
    spec.edges = pick.below(1001);
    spec.predicates = 1 + pick.below(8);
    spec.literal_fraction = pick.uniform01() * 0.3;
    spec.seed = pick.next();
    const auto g = synth::random_graph(spec, "t");
    for (int k : {1, 2}) {
      if (!oracle::same_partition(summary::compute_eqcs(g, k), oracle::bisimulation_blocks(g, k))) ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 60.0, std::to_string(mismatches) + " mismatching partitions, " + fmt("%.2f", s) + " s"};
}

Outcome xor_regression() {
  const auto multi = rdf::load_snapshot_text(
      "<http://v> <http://p> <http://y1> .\n<http://v> <http://p> <http://y2> .\n"
      "<http://u> <http://q> <http://v> .\n",
      "t");
  const auto simple = rdf::load_snapshot_text(
      "<http://v> <http://p> <http://y1> .\n<http://u> <http://q> <http://v> .\n", "t");
  bool ok = true;
  for (int k : {1, 2}) {
    for (const char* iri : {"http://v", "http://u"}) {
      const auto a = summary::eqc_hash(multi, *multi.find_vertex(iri), k);
      const auto b = summary::eqc_hash(simple, *simple.find_vertex(iri), k);
      ok = ok && a == b && a.value != 0;
    }
  }
  return {ok, ok ? "parallel edges hash like the simple graph" : "parallel edges changed an EQC"};
}

Outcome lifelong_fixtures() {
  using namespace lifelong;
  const ResultMatrix r{{0.9, 0.4, 0.3}, {0.8, 0.85, 0.5}, {0.7, 0.6, 0.8}};
  const Omega o = omega(r);
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  auto round4 = [](double x) { return std::round(x * 1e4) / 1e4; };
  bool ok = near(acc(r), 0.7) && near(bwt(r), -0.225) && near(fwt(r), -0.375) && near(o.base, 5.0 / 6.0) &&
            near(o.fresh, 0.825) && near(o.all, 85.0 / 108.0) && near(forgetting(r, 3), 0.225) &&
            round4(o.base) == 0.8333 && round4(o.all) == 0.7870;
  for (double c : {0.3, 0.75, 1.0}) {
    const ResultMatrix k(4, std::vector<double>(4, c));
    const Omega ko = omega(k);
    ok = ok && acc(k) == c && bwt(k) == 0.0 && fwt(k) == 0.0 && ko.base == 1.0 && ko.fresh == c && ko.all == 1.0;
    for (std::size_t j = 2; j <= 4; ++j) ok = ok && forgetting(k, j) == 0.0;
  }
  return {ok, "ACC " + fmt("%.10g", acc(r)) + ", BWT " + fmt("%.10g", bwt(r)) + ", FWT " + fmt("%.10g", fwt(r)) +
                  ", Omega " + fmt("%.10g", o.base) + "/" + fmt("%.10g", o.fresh) + "/" + fmt("%.10g", o.all) +
                  ", F_3 " + fmt("%.10g", forgetting(r, 3))};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  struct Case {
    nn::Architecture arch;
    bool normalize;
    std::vector<std::size_t> hidden;
  };
  const std::vector<Case> cases{{nn::Architecture::kMlp, false, {8}},
                                {nn::Architecture::kGraphMlp, false, {6}},
                                {nn::Architecture::kGcn, false, {5, 4}},
                                {nn::Architecture::kGcn, true, {5, 4}}};
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& c : cases) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      nn::ModelConfig cfg = nn::ModelConfig::defaults(c.arch);
      cfg.hidden = c.hidden;
      cfg.normalize = c.normalize;
      cfg.alpha = 1.0;
      cfg.tau = 2.0;
      nn::Network net(cfg, 7, 4, seed);
      support::randomize(net, derive_seed(seed, 1));
      const auto b = support::random_batch(derive_seed(seed, 2), 8, 7, 4, 6, 12);
      const auto r = support::check_gradients(net, b, derive_seed(seed, 3));
      worst = std::max(worst, r.max_rel_error);
      checked += r.checked;
    }
  }
  const double s = seconds_since(t0);
  return {worst < 1e-4 && s < 120.0,
          "max relative error " + fmt("%.3g", worst) + " over " + std::to_string(checked) + " entries, " +
              fmt("%.2f", s) + " s"};
}

Outcome overfit_smoke() {
  const auto t0 = Clock::now();
  synth::PatternGraphSpec spec;
  spec.vertices = 500;
  spec.patterns = synth::binary_patterns(8, "http://example.org/p/");
  spec.seed = 1;
  std::vector<rdf::SnapshotGraph> graphs;
  graphs.push_back(synth::pattern_graph(spec, "2024-01-01"));
  lifelong::SequenceConfig cfg;
  cfg.seed = 1;
  const auto seq = lifelong::prepare_sequence(std::move(graphs), cfg);
  const auto& task = seq.tasks[0];
  nn::Network net(cfg.network, task.predicate_width, task.class_width,
                  derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(SeedPurpose::kInit)));
  lifelong::train_task(net, task, cfg, 0);
  const double train = lifelong::evaluate(net, task, cfg, learn::SplitTag::kTrain).accuracy;
  const double test = lifelong::evaluate(net, task, cfg, learn::SplitTag::kTest).accuracy;
  const double s = seconds_since(t0);
  return {task.class_width == 8 && train >= 0.99 && test >= 0.95 && s < 30.0,
          std::to_string(task.class_width) + " classes, train " + fmt("%.4f", train) + ", test " + fmt("%.4f", test) +
              ", " + fmt("%.2f", s) + " s"};
}

Outcome drift_property() {
  synth::DriftSpec d;
  d.tasks = 3;
  d.vertices = 500;
  d.shared_classes = 4;
  d.unique_classes = 4;
  d.seed = 7;
  lifelong::SequenceConfig cfg;
  cfg.seed = 7;
  const auto seq = lifelong::prepare_sequence(synth::drift_sequence(d), cfg);
  const auto res = lifelong::run_sequence(seq, lifelong::Restart::kWarm);
  bool dominant = true;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < i; ++j) dominant = dominant && res.r[i][i] > res.r[j][i];
  }
  const std::string csv = lifelong::result_matrix_csv(res.r);
  const auto back = lifelong::parse_result_matrix_csv(csv);
  const bool exact = back == res.r && cli::report_json(lifelong::make_report(back)).dump() ==
                                          cli::report_json(lifelong::make_report(res.r)).dump();
  std::string diag;
  for (std::size_t i = 0; i < 3; ++i) diag += (i ? ", " : "") + fmt("%.3f", res.r[i][i]);
  return {dominant && exact, std::string("diagonal ") + diag + (dominant ? ", dominant" : ", NOT dominant") +
                                 (exact ? ", report recomputes exactly" : ", report mismatch")};
}

Outcome time_warp_null() {
  lifelong::SequenceConfig cfg;
  cfg.seed = 11;
  auto pair = synth::disjoint_pair(500, 8, 11);
  const rdf::SnapshotGraph second = pair[1];
  pair.pop_back();
  const auto first = lifelong::run_sequence(lifelong::prepare_sequence(std::move(pair), cfg), lifelong::Restart::kWarm);
  const auto disjoint = lifelong::time_warp(first.checkpoints[0], second, cfg);

  synth::DriftSpec d;
  d.tasks = 2;
  d.vertices = 500;
  d.seed = 11;
  auto drift = synth::drift_sequence(d);
  const rdf::SnapshotGraph next = drift[1];
  drift.pop_back();
  const auto base = lifelong::run_sequence(lifelong::prepare_sequence(std::move(drift), cfg), lifelong::Restart::kWarm);
  const auto tw = lifelong::time_warp(base.checkpoints[0], next, cfg);
  const double gap = std::abs(tw.retrained.accuracy - tw.cold.accuracy);
  return {disjoint.frozen.accuracy < 0.05 && gap <= 0.05,
          "frozen disjoint " + fmt("%.4f", disjoint.frozen.accuracy) + ", warm " + fmt("%.4f", tw.retrained.accuracy) +
              " vs cold " + fmt("%.4f", tw.cold.accuracy) + " (gap " + fmt("%.4f", gap) + ")"};
}

Outcome measures_fixtures() {
  const auto a3 = support::summary_of({{1, 1}, {2, 1}, {3, 1}});
  const auto b3 = support::summary_of({{2, 1}, {3, 1}, {4, 1}});
  const double jac = measures::jaccard_dist(a3.graph, b3.graph);
  const auto a = support::summary_of({{1, 3}, {2, 1}});
  const auto b = support::summary_of({{1, 2}, {2, 2}});
  const double js = measures::js_divergence(a, b);
  // Exact value of the two-class fixture: 0.75·log2(1.5) + 0.5·log2(2/3) + 0.25.
  const double derived = 0.75 * std::log2(1.5) + 0.5 * std::log2(2.0 / 3.0) + 0.25;
  bool ok = jac == 0.5 && std::abs(js - derived) <= 1e-6 && std::abs(js - 0.3962) < 5e-5 &&
            measures::js_divergence(a, a) == 0.0 && measures::jaccard_dist(a.graph, a.graph) == 0.0;
  Rng rng(31);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> x, y;
    for (std::uint64_t h = 0; h < 12; ++h) {
      if (rng.below(3) != 0) x.emplace_back(h, 1 + rng.below(100));
      if (rng.below(3) != 0) y.emplace_back(h, 1 + rng.below(100));
    }
    const auto p = support::summary_of(x), q = support::summary_of(y);
    worst = std::max(worst, std::abs(measures::js_divergence(p, q) - measures::js_divergence(q, p)));
  }
  ok = ok && worst <= 1e-12;
  return {ok, "Jaccard " + fmt("%.4g", jac) + ", JS " + fmt("%.12f", js) + ", max asymmetry " + fmt("%.3g", worst)};
}

Outcome parser_conformance() {
  const fs::path data = SUMLIFE_TEST_DATA;
  const auto g = rdf::load_snapshot(data / "parser_fixture.nt", "fixture");
  std::istringstream in(slurp(data / "parser_fixture.expected"));
  std::map<std::string, std::uint64_t> e;
  std::string key;
  std::uint64_t value = 0;
  while (in >> key >> value) e[key] = value;
  const auto& s = g.stats();
  const bool ok = e.size() == 8 && s.lines == e["lines"] && s.statements == e["statements"] &&
                  s.comments == e["comments"] && s.blank == e["blank"] && s.malformed == e["malformed"] &&
                  s.duplicates == e["duplicates"] && g.edge_count() == e["edges"] && g.vertex_count() == e["vertices"];
  return {ok, std::to_string(s.lines) + " lines, " + std::to_string(s.statements) + " statements, " +
                  std::to_string(s.malformed) + " malformed, " + std::to_string(s.duplicates) + " duplicates"};
}

double time_summarize(std::size_t edges) {
  synth::RandomGraphSpec spec;
  spec.vertices = edges / 5;
  spec.edges = edges;
  spec.predicates = 8;
  spec.literal_fraction = 0.2;
  spec.seed = edges;
  const auto g = synth::random_graph(spec, "t");
  const auto t0 = Clock::now();
  const auto s = summary::summarize(g, summary::SummaryModel::kAc1);
  const double secs = seconds_since(t0);
  if (s.graph.eqcs.empty()) return -1.0;
  return secs;
}

Outcome performance() {
  const double t1 = time_summarize(1'000'000);
  const double t2 = time_summarize(2'000'000);
  const double rss_gb = static_cast<double>(cli::peak_rss_bytes()) / (1024.0 * 1024.0 * 1024.0);
  const double ratio = t2 / t1;
  return {t1 > 0 && t1 < 10.0 && rss_gb < 2.0 && ratio < 2.5,
          "1M edges " + fmt("%.2f", t1) + " s, 2M edges " + fmt("%.2f", t2) + " s, ratio " + fmt("%.2f", ratio) +
              ", peak RSS " + fmt("%.2f", rss_gb) + " GB"};
}

Outcome determinism() {
  const fs::path base = scratch("determinism");
  std::ostringstream log, err;
  cli::Config synth;
  synth.set("output", (base / "data").string());
  synth.set("synth_vertices", "300");
  synth.set("seed", "5");
  if (cli::run_command("synth", synth, log, err) != 0) return {false, "synth failed: " + err.str()};
  std::string snapshots;
  for (std::size_t t = 0; t < 3; ++t) {
    snapshots += (t ? "," : "") + (base / "data" / (synth::task_timestamp(t) + ".nt")).string();
  }
  auto run = [&](const std::string& threads, const fs::path& out) {
    cli::Config c;
    c.set("snapshots", snapshots);
    c.set("output", out.string());
    c.set("architecture", "gcn");
    c.set("iterations", "30");
    c.set("seed", "5");
    c.set("threads", threads);
    return cli::run_command("lifelong", c, log, err);
  };
  if (run("1", base / "a") != 0 || run("2", base / "b") != 0) return {false, "lifelong failed: " + err.str()};
  bool ok = slurp(base / "a" / "R.csv") == slurp(base / "b" / "R.csv");
  for (std::size_t t = 1; t <= 3; ++t) {
    const fs::path ck = fs::path("checkpoints") / ("task-" + std::to_string(t) + ".ckpt");
    ok = ok && slurp(base / "a" / ck) == slurp(base / "b" / ck) && !slurp(base / "a" / ck).empty();
  }
  const auto ma = nlohmann::json::parse(slurp(base / "a" / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(base / "b" / "manifest.json"));
  ok = ok && ma.at("outputs") == mb.at("outputs") && ma.at("code_digest") == mb.at("code_digest");
  return {ok, std::to_string(ma.at("outputs").size()) + " output digests compared across threads 1 and 2"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"summarizer matches the k-bisimulation oracle", oracle_equivalence},
      {"parallel edges do not cancel", xor_regression},
      {"lifelong measure fixtures", lifelong_fixtures},
      {"analytic gradients match finite differences", gradient_checks},
      {"MLP overfits an 8-class snapshot", overfit_smoke},
      {"drift sequence is diagonal dominant", drift_property},
      {"time-warp null check", time_warp_null},
      {"summary measure fixtures", measures_fixtures},
      {"N-Triples parser conformance", parser_conformance},
      {"AC1 summarization performance", performance},
      {"lifelong runs are deterministic", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
