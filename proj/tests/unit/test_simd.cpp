#include <doctest.h>

#include <cmath>
#include <vector>

#include "vrecon/core/random.hpp"
#include "vrecon/simd/kernels.hpp"

using namespace vrecon;
using namespace vrecon::simd;

namespace {

template <class T>
std::vector<T> random_vec(std::size_t n, Rng& rng) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(uniform01(rng) * 2 - 1);
  return v;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar is always available and is the reference") {
    CHECK(isa_available(Isa::Scalar));
    const auto& k = kernels_for(Isa::Scalar);
    const float a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
    CHECK(k.dot_f32(a, b, 3) == 32.0f);
    float y[3] = {1, 1, 1};
    k.axpy_f32(2.0f, a, y, 3);
    CHECK(y[0] == 3.0f);
    CHECK(y[2] == 7.0f);
  }

  TEST_CASE("vector variants match scalar for every length and offset") {
    Rng rng(11);
    const auto& ref = kernels_for(Isa::Scalar);
    for (Isa isa : {Isa::Avx2, Isa::Neon}) {
      if (!isa_available(isa)) continue;
      CAPTURE(isa_name(isa));
      const auto& k = kernels_for(isa);
      for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 1000u, 1023u}) {
        for (std::size_t off : {0u, 1u, 3u}) {
          auto a = random_vec<float>(n + off, rng), b = random_vec<float>(n + off, rng);
          auto ad = random_vec<double>(n + off, rng), bd = random_vec<double>(n + off, rng);
          const float r32 = ref.dot_f32(a.data() + off, b.data() + off, n);
          const float v32 = k.dot_f32(a.data() + off, b.data() + off, n);
          // reassociation only, so the gap scales with sum |a_i b_i|
          double mag = 0;
          for (std::size_t i = off; i < n + off; ++i) mag += std::abs(double(a[i]) * b[i]);
          CHECK(std::abs(double(r32) - v32) <= 1e-5 * mag);
          CHECK(k.dot_f64(ad.data() + off, bd.data() + off, n) ==
                doctest::Approx(ref.dot_f64(ad.data() + off, bd.data() + off, n)).epsilon(1e-12));
          auto y1 = random_vec<float>(n + off, rng);
          auto y2 = y1;
          ref.axpy_f32(0.37f, a.data() + off, y1.data() + off, n);
          k.axpy_f32(0.37f, a.data() + off, y2.data() + off, n);
          for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-6));
          auto z1 = random_vec<double>(n + off, rng);
          auto z2 = z1;
          ref.axpy_f64(-1.25, ad.data() + off, z1.data() + off, n);
          k.axpy_f64(-1.25, ad.data() + off, z2.data() + off, n);
          for (std::size_t i = 0; i < z1.size(); ++i) CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-14));
        }
      }
    }
  }

  TEST_CASE("dispatch can be switched and restored") {
    const Isa before = active_isa();
    set_isa(Isa::Scalar);
    CHECK(active_isa() == Isa::Scalar);
    std::vector<float> a{1, 2, 3, 4, 5, 6, 7, 8, 9}, b(9, 2.0f);
    CHECK(dot(a, b) == 90.0f);
    for (Isa isa : {Isa::Avx2, Isa::Neon})
      if (!isa_available(isa)) CHECK_THROWS(set_isa(isa));
    set_isa(before);
    CHECK(active_isa() == before);
    CHECK(dot(a, b) == doctest::Approx(90.0));
  }
}
