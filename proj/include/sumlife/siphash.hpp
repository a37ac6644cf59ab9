#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace sumlife {

struct SipKey {
  std::uint64_t k0;
  std::uint64_t k1;
  /// Interprets 16 bytes as two little-endian words.
  static SipKey from_bytes(std::span<const std::uint8_t, 16> bytes);
  static SipKey from_string(std::string_view sixteen_chars);
};

/// SipHash-2-4 (Aumasson & Bernstein) with a 64-bit output.
std::uint64_t siphash24(const SipKey& key, std::span<const std::uint8_t> message);
std::uint64_t siphash24(const SipKey& key, std::string_view message);

/// Fixed key used for equivalence-class hashing: the ASCII bytes of
/// "sumlife:eqc:v1.0". Changing it changes every EqcHash ever written.
const SipKey& eqc_key();

/// Fixed key used for file digests in run manifests: "sumlife:digest:1".
const SipKey& digest_key();

}  // namespace sumlife
