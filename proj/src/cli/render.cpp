#include <cmath>
#include <cstdio>
#include <fstream>

#include "sumlife/cli.hpp"
#include "sumlife/common.hpp"

namespace sumlife::cli {

namespace {

nlohmann::json histogram_json(const measures::Histogram& h) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [value, freq] : h) a.push_back({value, freq});
  return a;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_text(const std::filesystem::path& root, const std::filesystem::path& relative, std::string_view text) {
  const auto path = root / relative;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json stats_json(const summary::SummaryGraph& s, const measures::SummaryStats& st) {
  return {
      {"timestamp", s.timestamp},
      {"model", std::string(summary::to_string(s.model))},
      {"eqcs", s.eqcs.size()},
      {"secondary_vertices", s.secondary.size()},
      {"summary_edges", s.edges.size()},
      {"predicates", s.predicates.size()},
      {"avg_size", st.avg_size},
      {"avg_edges", st.avg_edges},
      {"dist_attrs_per_eqc", histogram_json(st.dist_attrs_per_eqc)},
      {"dist_members_per_eqc", histogram_json(st.dist_members_per_eqc)},
      {"dist_predicate_usage", histogram_json(st.dist_predicate_usage)},
  };
}

std::string histogram_csv(const measures::Histogram& h, std::string_view value_column) {
  std::string out = std::string(value_column) + ",frequency\n";
  for (const auto& [value, freq] : h) out += std::to_string(value) + "," + std::to_string(freq) + "\n";
  return out;
}

nlohmann::json diff_json(const measures::DiffReport& d, std::string_view from, std::string_view to) {
  return {{"from", from},           {"to", to},           {"jaccard", d.jaccard}, {"js_divergence", d.js_divergence},
          {"added", d.added},       {"deleted", d.deleted}, {"recurring", d.recurring}};
}

std::string meta_csv(const std::vector<std::string>& timestamps, const measures::MetaTrack& track,
                     const std::vector<measures::DiffReport>& diffs) {
  std::string out =
      "index,timestamp,eqcs,added,deleted,recurring,new_vs_first,reappearing,cumulative_seen,jaccard_vs_prev,"
      "js_vs_prev\n";
  for (std::size_t t = 0; t < track.entries.size(); ++t) {
    const auto& e = track.entries[t];
    out += std::to_string(t) + "," + timestamps.at(t) + "," + std::to_string(e.eqcs) + "," +
           std::to_string(e.added_vs_prev) + "," + std::to_string(e.deleted_vs_prev) + "," +
           std::to_string(e.recurring_vs_prev) + "," + std::to_string(e.new_vs_first) + "," +
           std::to_string(e.reappearing) + "," + std::to_string(e.cumulative_seen) + ",";
    if (t > 0) out += fmt("%.17g", diffs.at(t - 1).jaccard) + "," + fmt("%.17g", diffs.at(t - 1).js_divergence);
    else out += ",";
    out += "\n";
  }
  return out;
}

nlohmann::json report_json(const lifelong::LifelongReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json f = nlohmann::json::object();
  for (const auto& [k, v] : r.forgetting) f["F_" + std::to_string(k)] = v;
  return {
      {"tasks", r.tasks},
      {"ACC", r.acc},
      {"BWT", opt(r.bwt)},
      {"FWT", opt(r.fwt)},
      {"alpha_ideal", opt(r.alpha_ideal)},
      {"omega_base", r.omega ? nlohmann::json(r.omega->base) : nlohmann::json(nullptr)},
      {"omega_new", r.omega ? nlohmann::json(r.omega->fresh) : nlohmann::json(nullptr)},
      {"omega_all", r.omega ? nlohmann::json(r.omega->all) : nlohmann::json(nullptr)},
      {"forgetting", f},
  };
}

nlohmann::json evaluation_json(const lifelong::Evaluation& e) {
  return {{"accuracy", e.accuracy},
          {"tested", e.tested},
          {"correct", e.correct},
          {"unseen", e.unseen},
          {"unseen_fraction", e.unseen_fraction()}};
}

std::string heatmap_svg(const lifelong::ResultMatrix& r, const std::vector<std::string>& labels) {
  lifelong::check_square(r);
  const std::size_t t = r.size();
  constexpr int cell = 56;
  constexpr int margin = 110;
  const int size = margin + static_cast<int>(t) * cell + 20;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
       std::to_string(size) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<title>accuracy R[i][j]: rows trained through task i, columns evaluated task j</title>\n";
  for (std::size_t i = 0; i < t; ++i) {
    const std::string label = xml_escape(i < labels.size() ? labels[i] : std::to_string(i + 1));
    const int y = margin + static_cast<int>(i) * cell;
    s += "<text class=\"row-label\" x=\"" + std::to_string(margin - 6) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
         "\" text-anchor=\"end\">" + label + "</text>\n";
    const int x = margin + static_cast<int>(i) * cell;
    s += "<text class=\"col-label\" x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(margin - 8) +
         "\" text-anchor=\"end\" transform=\"rotate(-45 " + std::to_string(x + cell / 2) + " " +
         std::to_string(margin - 8) + ")\">" + label + "</text>\n";
  }
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      const double v = std::clamp(r[i][j], 0.0, 1.0);
      // White (0) to dark blue (1).
      const int red = static_cast<int>(std::lround(247 - v * (247 - 8)));
      const int green = static_cast<int>(std::lround(251 - v * (251 - 48)));
      const int blue = static_cast<int>(std::lround(255 - v * (255 - 107)));
      const int x = margin + static_cast<int>(j) * cell;
      const int y = margin + static_cast<int>(i) * cell;
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, green, blue);
      s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(cell) +
           "\" height=\"" + std::to_string(cell) + "\" fill=\"" + color + "\" stroke=\"#ffffff\"/>\n";
      s += "<text class=\"cell\" data-row=\"" + std::to_string(i) + "\" data-col=\"" + std::to_string(j) + "\" x=\"" +
           std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) + "\" text-anchor=\"middle\" fill=\"" +
           (v > 0.55 ? "#ffffff" : "#000000") + "\">" + fmt("%.2f", r[i][j]) + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sumlife::cli
