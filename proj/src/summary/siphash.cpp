#include "sumlife/siphash.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace sumlife {

namespace {

std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

struct SipState {
  std::uint64_t v0, v1, v2, v3;

  void round() {
    v0 += v1;
    v1 = std::rotl(v1, 13);
    v1 ^= v0;
    v0 = std::rotl(v0, 32);
    v2 += v3;
    v3 = std::rotl(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = std::rotl(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = std::rotl(v1, 17);
    v1 ^= v2;
    v2 = std::rotl(v2, 32);
  }

  void compress(std::uint64_t m) {
    v3 ^= m;
    round();
    round();
    v0 ^= m;
  }
};

}  // namespace

SipKey SipKey::from_bytes(std::span<const std::uint8_t, 16> bytes) {
  return SipKey{load_le64(bytes.data()), load_le64(bytes.data() + 8)};
}

SipKey SipKey::from_string(std::string_view sixteen_chars) {
  if (sixteen_chars.size() != 16) throw std::invalid_argument("SipHash key must be 16 bytes");
  std::array<std::uint8_t, 16> bytes{};
  std::memcpy(bytes.data(), sixteen_chars.data(), 16);
  return from_bytes(bytes);
}

std::uint64_t siphash24(const SipKey& key, std::span<const std::uint8_t> message) {
  SipState s{key.k0 ^ 0x736F6D6570736575ull, key.k1 ^ 0x646F72616E646F6Dull,
             key.k0 ^ 0x6C7967656E657261ull, key.k1 ^ 0x7465646279746573ull};
  const std::size_t n = message.size();
  const std::size_t full = n - n % 8;
  const std::uint8_t* p = message.data();
  for (std::size_t i = 0; i < full; i += 8) s.compress(load_le64(p + i));

  std::uint64_t last = static_cast<std::uint64_t>(n & 0xFF) << 56;
  for (std::size_t i = 0; i < n % 8; ++i) {
    last |= static_cast<std::uint64_t>(p[full + i]) << (8 * i);
  }
  s.compress(last);
  s.v2 ^= 0xFF;
  for (int i = 0; i < 4; ++i) s.round();
  return s.v0 ^ s.v1 ^ s.v2 ^ s.v3;
}

std::uint64_t siphash24(const SipKey& key, std::string_view message) {
  return siphash24(key, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

const SipKey& eqc_key() {
  static const SipKey key = SipKey::from_string("sumlife:eqc:v1.0");
  return key;
}

const SipKey& digest_key() {
  static const SipKey key = SipKey::from_string("sumlife:digest:1");
  return key;
}

}  // namespace sumlife
