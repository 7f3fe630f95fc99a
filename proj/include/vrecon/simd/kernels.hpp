#pragma once

// Data-parallel inner loops used by the convolution and dense layers.
//
// Each kernel has a scalar reference implementation and vector variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is chosen once at
// runtime from the host CPU; VRECON_SIMD=scalar|avx2|neon overrides it.
// The variants are equivalence-tested against the scalar reference; they
// differ only by floating-point reassociation.

#include <cstddef>
#include <span>

namespace vrecon::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Switches the process-wide dispatch. Throws if `isa` is unavailable.
void set_isa(Isa isa);

float dot(std::span<const float> a, std::span<const float> b);
double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(float alpha, std::span<const float> x, std::span<float> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Direct access to one variant, for equivalence tests and benchmarks.
struct KernelTable {
  float (*dot_f32)(const float*, const float*, std::size_t);
  double (*dot_f64)(const double*, const double*, std::size_t);
  void (*axpy_f32)(float, const float*, float*, std::size_t);
  void (*axpy_f64)(double, const double*, double*, std::size_t);
};
const KernelTable& kernels_for(Isa isa);

}  // namespace vrecon::simd
