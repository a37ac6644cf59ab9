#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "sumlife/common.hpp"
#include "sumlife/lifelong.hpp"

namespace sumlife::lifelong {

void check_square(const ResultMatrix& r) {
  if (r.empty()) throw std::invalid_argument("result matrix is empty");
  for (const auto& row : r) {
    if (row.size() != r.size()) throw std::invalid_argument("result matrix must be square");
  }
}

namespace {

void need_two(const ResultMatrix& r, const char* what) {
  check_square(r);
  if (r.size() < 2) throw std::invalid_argument(std::string(what) + " needs at least two tasks");
}

}  // namespace

double acc(const ResultMatrix& r) {
  check_square(r);
  const std::size_t t = r.size();
  double s = 0.0;
  for (std::size_t i = 0; i < t; ++i) s += r[t - 1][i];
  return s / static_cast<double>(t);
}

double bwt(const ResultMatrix& r) {
  need_two(r, "BWT");
  const std::size_t t = r.size();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t; ++i) s += r[t - 1][i] - r[i][i];
  return s / static_cast<double>(t - 1);
}

double fwt(const ResultMatrix& r) {
  need_two(r, "FWT");
  const std::size_t t = r.size();
  double s = 0.0;
  for (std::size_t i = 1; i < t; ++i) s += r[i - 1][i] - r[i][i];
  return s / static_cast<double>(t - 1);
}

double alpha_ideal(const ResultMatrix& r) {
  check_square(r);
  double best = r[0][0];
  for (std::size_t i = 1; i < r.size(); ++i) best = std::max(best, r[i][i]);
  return best;
}

Omega omega(const ResultMatrix& r) {
  need_two(r, "Omega");
  const double ideal = alpha_ideal(r);
  if (ideal == 0.0) throw std::invalid_argument("Omega is undefined when the ideal accuracy is 0");
  const std::size_t t = r.size();
  Omega o;
  for (std::size_t i = 1; i < t; ++i) {
    o.base += r[i][0] / ideal;
    o.fresh += r[i][i];
    double row = 0.0;
    for (std::size_t j = 0; j < t; ++j) row += r[i][j];
    o.all += (row / static_cast<double>(t)) / ideal;
  }
  const auto n = static_cast<double>(t - 1);
  o.base /= n;
  o.fresh /= n;
  o.all /= n;
  return o;
}

double forgetting(const ResultMatrix& r, std::size_t k) {
  check_square(r);
  if (k < 2 || k > r.size()) throw std::invalid_argument("forgetting needs 2 <= k <= T");
  const std::size_t last = k - 1;  // 0-based row of task k
  double s = 0.0;
  for (std::size_t j = 0; j < last; ++j) {
    double best = r[0][j];
    for (std::size_t l = 1; l < last; ++l) best = std::max(best, r[l][j]);
    s += best - r[last][j];
  }
  return s / static_cast<double>(k - 1);
}

LifelongReport make_report(const ResultMatrix& r) {
  check_square(r);
  LifelongReport rep;
  rep.tasks = r.size();
  rep.acc = acc(r);
  rep.alpha_ideal = alpha_ideal(r);
  if (r.size() >= 2) {
    rep.bwt = bwt(r);
    rep.fwt = fwt(r);
    if (*rep.alpha_ideal > 0.0) rep.omega = omega(r);
    for (std::size_t k = 2; k <= r.size(); ++k) rep.forgetting.emplace_back(k, forgetting(r, k));
  }
  return rep;
}

std::string result_matrix_csv(const ResultMatrix& r) {
  check_square(r);
  std::string out;
  char buf[40];
  for (const auto& row : r) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j > 0) out.push_back(',');
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

ResultMatrix parse_result_matrix_csv(const std::string& text) {
  ResultMatrix r;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw IoError("bad number '" + cell + "' on line " + std::to_string(line_no) + " of result matrix");
      }
      row.push_back(v);
    }
    r.push_back(std::move(row));
  }
  try {
    check_square(r);
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  return r;
}

}  // namespace sumlife::lifelong
