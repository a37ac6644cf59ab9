#pragma once

// Dense double-precision kernels behind a runtime-selected function table.
//
// Every variant performs the same floating-point operations in the same order
// (separate multiply and add, no fused multiply-add), so all variants produce
// bit-identical results. The scalar table is the reference.

#include <cstddef>
#include <string_view>
#include <vector>

namespace sumlife::kernels {

struct KernelTable {
  const char* name;
  /// y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  /// c (m×n) += a (m×k) · b (k×n), all row-major.
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  /// c (k×n) += aᵀ · b with a (m×k) and b (m×n), all row-major.
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  /// y[i] = x[i] > 0 ? x[i] : 0
  void (*relu_forward)(std::size_t n, const double* x, double* y);
  /// dx[i] = x[i] > 0 ? dy[i] : 0
  void (*relu_backward)(std::size_t n, const double* x, const double* dy, double* dx);
  /// out[i] = a[i] * b[i]
  void (*mul)(std::size_t n, const double* a, const double* b, double* out);
  /// One Adam update over n parameters. bc1 = 1 - β1^t, bc2 = 1 - β2^t.
  void (*adam_update)(std::size_t n, double* p, const double* g, double* m, double* v, double lr,
                      double beta1, double beta2, double bc1, double bc2, double eps);
};

enum class KernelKind { kAuto, kScalar, kAvx2, kNeon };

KernelKind parse_kind(std::string_view s);  // throws ConfigError
std::string_view to_string(KernelKind k);

/// Whether the variant was compiled in and the CPU supports it.
bool available(KernelKind k);
/// Concrete (non-auto) kinds usable on this machine, scalar first.
std::vector<KernelKind> available_kinds();

/// Table for a kind; kAuto picks the widest available variant.
/// Throws ConfigError when the kind is unavailable.
const KernelTable& table(KernelKind k);

/// Process-wide table used by the NN engine; defaults to kAuto.
const KernelTable& active();
void set_active(KernelKind k);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(SUMLIFE_WITH_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(SUMLIFE_WITH_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace sumlife::kernels
