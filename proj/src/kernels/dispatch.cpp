#include <atomic>

#include "sumlife/common.hpp"
#include "sumlife/kernels.hpp"

namespace sumlife::kernels {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

bool cpu_has_avx2() {
#if defined(SUMLIFE_WITH_AVX2)
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return has;
#else
  return false;
#endif
}

}  // namespace

KernelKind parse_kind(std::string_view s) {
  if (s == "auto") return KernelKind::kAuto;
  if (s == "scalar") return KernelKind::kScalar;
  if (s == "avx2") return KernelKind::kAvx2;
  if (s == "neon") return KernelKind::kNeon;
  throw ConfigError("unknown kernel '" + std::string(s) + "' (expected auto, scalar, avx2 or neon)");
}

std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::kAuto: return "auto";
    case KernelKind::kScalar: return "scalar";
    case KernelKind::kAvx2: return "avx2";
    case KernelKind::kNeon: return "neon";
  }
  return "?";
}

bool available(KernelKind k) {
  switch (k) {
    case KernelKind::kAuto:
    case KernelKind::kScalar: return true;
    case KernelKind::kAvx2: return cpu_has_avx2();
    case KernelKind::kNeon:
#if defined(SUMLIFE_WITH_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<KernelKind> available_kinds() {
  std::vector<KernelKind> out;
  for (auto k : {KernelKind::kScalar, KernelKind::kAvx2, KernelKind::kNeon}) {
    if (available(k)) out.push_back(k);
  }
  return out;
}

const KernelTable& table(KernelKind k) {
  if (!available(k)) throw ConfigError("kernel '" + std::string(to_string(k)) + "' is not available on this machine");
  switch (k) {
    case KernelKind::kScalar: return detail::kScalarTable;
#if defined(SUMLIFE_WITH_AVX2)
    case KernelKind::kAvx2: return detail::kAvx2Table;
#endif
#if defined(SUMLIFE_WITH_NEON)
    case KernelKind::kNeon: return detail::kNeonTable;
#endif
    case KernelKind::kAuto: {
      const auto kinds = available_kinds();
      return table(kinds.back());
    }
    default: break;
  }
  return detail::kScalarTable;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &table(KernelKind::kAuto);
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active(KernelKind k) { g_active.store(&table(k), std::memory_order_release); }

}  // namespace sumlife::kernels
