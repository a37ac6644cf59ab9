#pragma once

// Checkpoint file: "GSLC", u32 format version, u64 header length, a JSON
// header, then every tensor as raw little-endian f64 in header order.

#include <cstdint>
#include <filesystem>
#include <string>

#include "sumlife/features.hpp"
#include "sumlife/nn.hpp"

namespace sumlife::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::uint64_t task = 0;
  std::string summary_model;  // "ac1" / "ac2"
  std::string timestamp;      // snapshot label of the last trained task
};

struct Checkpoint {
  Network network;
  learn::PredicateVocabulary predicates;
  learn::ClassVocabulary classes;
  CheckpointMeta meta;
};

/// Hex SipHash digest of a vocabulary's serialized form.
std::string vocabulary_digest(const learn::PredicateVocabulary& v);
std::string vocabulary_digest(const learn::ClassVocabulary& v);

std::string encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(const std::string& bytes);  // throws IoError

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sumlife::nn
