#pragma once

// Random batches and a central finite-difference gradient check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "sumlife/nn.hpp"
#include "sumlife/rng.hpp"

namespace support {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Every feature row gets 1..3 distinct columns so no pre-activation sits
/// exactly on the ReLU kink through a zero row.
inline sumlife::learn::Subgraph random_batch(std::uint64_t seed, std::size_t n, std::size_t width,
                                             std::size_t classes, std::size_t targets, std::size_t edges,
                                             int hops = 1) {
  sumlife::Rng rng(seed);
  sumlife::learn::Subgraph b;
  b.hops = hops;
  b.features.width = width;
  for (std::size_t v = 0; v < n; ++v) {
    b.vertices.push_back(static_cast<sumlife::VertexId>(v));
    std::set<std::uint32_t> cols;
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(3, width));
    while (cols.size() < k) cols.insert(static_cast<std::uint32_t>(rng.below(width)));
    b.features.cols.insert(b.features.cols.end(), cols.begin(), cols.end());
    b.features.row_ptr.push_back(b.features.cols.size());
  }
  for (std::size_t t = 0; t < targets; ++t) {
    b.targets.push_back(static_cast<std::uint32_t>(t % n));
    b.labels.push_back(static_cast<std::uint32_t>(rng.below(classes)));
  }
  for (std::size_t e = 0; e < edges; ++e) {
    const auto s = static_cast<std::uint32_t>(rng.below(n));
    const auto d = static_cast<std::uint32_t>(rng.below(n));
    b.edges.push_back({s, static_cast<std::uint32_t>(rng.below(width)), d});
  }
  return b;
}

/// Fills every parameter (biases included) with U(-scale, scale).
inline void randomize(sumlife::nn::Network& net, std::uint64_t seed, double scale = 0.5) {
  sumlife::Rng rng(seed);
  for (auto& p : net.params()) {
    for (double& x : p.value.values()) x = rng.uniform(-scale, scale);
  }
}

/// Compares analytic gradients with central differences. The loss is
/// re-evaluated with a fresh Rng(rng_seed) each time so dropout masks match.
/// Relative error: |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(sumlife::nn::Network& net, const sumlife::learn::Subgraph& b,
                                 std::uint64_t rng_seed, double eps = 1e-5, double floor = 1e-6) {
  std::vector<sumlife::nn::Tensor> grads;
  {
    sumlife::Rng rng(rng_seed);
    net.loss(b, rng, &grads);
  }
  GradCheck out;
  for (std::size_t p = 0; p < net.params().size(); ++p) {
    auto values = net.params()[p].value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      sumlife::Rng r1(rng_seed);
      const double up = net.loss(b, r1, nullptr);
      values[i] = saved - eps;
      sumlife::Rng r2(rng_seed);
      const double down = net.loss(b, r2, nullptr);
      values[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = grads[p].values()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic - numeric) / denom);
      ++out.checked;
    }
  }
  return out;
}

}  // namespace support
