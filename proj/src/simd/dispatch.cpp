#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"
#include "vrecon/core/error.hpp"

namespace vrecon::simd {
namespace {

Isa detect() {
  if (const char* env = std::getenv("VRECON_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&kernels_for(detect())};
  return table;
}

Isa& current_isa() {
  static Isa isa = detect();
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__ARM_NEON) || defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorCode::Invalid, std::string("SIMD variant not available: ") + isa_name(isa));
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return detail::avx2_table;
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
    case Isa::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

Isa active_isa() {
  (void)current();
  return current_isa();
}

void set_isa(Isa isa) {
  current().store(&kernels_for(isa));
  current_isa() = isa;
}

float dot(std::span<const float> a, std::span<const float> b) {
  return current().load(std::memory_order_relaxed)->dot_f32(a.data(), b.data(), a.size());
}
double dot(std::span<const double> a, std::span<const double> b) {
  return current().load(std::memory_order_relaxed)->dot_f64(a.data(), b.data(), a.size());
}
void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  current().load(std::memory_order_relaxed)->axpy_f32(alpha, x.data(), y.data(), x.size());
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  current().load(std::memory_order_relaxed)->axpy_f64(alpha, x.data(), y.data(), x.size());
}

}  // namespace vrecon::simd
