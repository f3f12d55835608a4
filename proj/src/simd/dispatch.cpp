#include <cctype>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "colourrisk/simd/kernels.hpp"

namespace colourrisk::simd {

namespace {

const KernelTable* detect() {
  if (const char* forced = std::getenv("COLOURRISK_ISA")) {
    if (auto isa = parse_isa(forced); isa && isa_supported(*isa)) return &kernels_for(*isa);
  }
#if defined(COLOURRISK_HAVE_AVX2)
  if (isa_supported(Isa::avx2)) return &detail::avx2_table;
#endif
#if defined(COLOURRISK_HAVE_NEON)
  return &detail::neon_table;
#endif
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(COLOURRISK_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(COLOURRISK_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("instruction set not supported here: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(COLOURRISK_HAVE_AVX2)
    case Isa::avx2:
      return detail::avx2_table;
#endif
#if defined(COLOURRISK_HAVE_NEON)
    case Isa::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void select_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

Isa active_isa() { return kernels().isa; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view raw) {
  std::string name(raw);
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

}  // namespace colourrisk::simd
