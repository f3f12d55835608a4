#pragma once

// Dense double-precision inner loops used by the PCA and ordinal-regression
// code. Each kernel has a scalar reference implementation and, where the
// target supports it, an AVX2/FMA (x86-64) or NEON (AArch64) variant. The
// variant is chosen once at runtime from the CPU features; it can be pinned
// with COLOURRISK_ISA=scalar|avx2|neon or select_isa().
//
// Vector variants reassociate sums, so results agree with the scalar
// reference to rounding, not bit-for-bit. Within one process the selected
// table is fixed, which keeps every computation deterministic.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace colourrisk::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  /// sum_i (a[i] - center)^2
  double (*centered_sumsq)(const double* a, std::size_t n, double center);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y[i] = (x[i] - center) * scale
  void (*affine)(const double* x, double* y, std::size_t n, double center, double scale);
};

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();
/// Pins the active table. Throws std::invalid_argument if unsupported.
void select_isa(Isa isa);
Isa active_isa();

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return kernels().sum(a.data(), a.size()); }

namespace detail {
extern const KernelTable scalar_table;
#if defined(COLOURRISK_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(COLOURRISK_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace colourrisk::simd
