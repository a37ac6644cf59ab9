#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "sumlife/summarizer.hpp"

namespace support {

/// Summary with the given (hash, extension) pairs and no edges.
inline sumlife::summary::Summary summary_of(std::vector<std::pair<std::uint64_t, std::uint64_t>> eqcs) {
  std::sort(eqcs.begin(), eqcs.end());
  sumlife::summary::Summary s;
  for (const auto& [h, n] : eqcs) {
    s.graph.eqcs.push_back({h});
    s.ext.sizes.push_back(n);
  }
  return s;
}

}  // namespace support
