#include "dressed/sobol.hpp"

#include "dressed/core.hpp"

#include <cmath>
#include <limits>

namespace dressed {

namespace {

std::uint32_t reverse_bits(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0F0F0F0Fu) | ((x & 0x0F0F0F0Fu) << 4);
  x = ((x >> 8) & 0x00FF00FFu) | ((x & 0x00FF00FFu) << 8);
  return (x >> 16) | (x << 16);
}

// Laine-Karras style hash: a bijection in which each bit only depends on
// lower bits, so applied to reversed bits it permutes nested intervals.
std::uint32_t lk_permutation(std::uint32_t x, std::uint32_t seed) {
  x += seed;
  x ^= x * 0x6c50b47cu;
  x ^= x * 0xb82f1e52u;
  x ^= x * 0xc7afe638u;
  x ^= x * 0x8d22f6e6u;
  return x;
}

std::uint32_t nested_uniform_scramble(std::uint32_t x, std::uint32_t seed) {
  return reverse_bits(lk_permutation(reverse_bits(x), seed));
}

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScrambledSobol2D::ScrambledSobol2D(std::uint64_t seed) {
  std::uint64_t state = seed;
  seeds_[0] = static_cast<std::uint32_t>(splitmix64(state) >> 32);
  seeds_[1] = static_cast<std::uint32_t>(splitmix64(state) >> 32);
}

std::array<std::uint32_t, 2> ScrambledSobol2D::raw(std::uint32_t index) {
  // Dimension 1 is the van der Corput sequence; dimension 2 uses the
  // primitive polynomial x + 1 with m1 = 1, i.e. v_k = v_{k-1} ^ (v_{k-1} >> 1).
  std::uint32_t x0 = reverse_bits(index);
  std::uint32_t x1 = 0;
  std::uint32_t v = 1u << 31;
  for (std::uint32_t i = index; i != 0; i >>= 1) {
    if (i & 1u) {
      x1 ^= v;
    }
    v ^= v >> 1;
  }
  return {x0, x1};
}

std::array<double, 2> ScrambledSobol2D::point(std::uint32_t index) const {
  const auto r = raw(index);
  constexpr double scale = 1.0 / 4294967296.0;
  return {(nested_uniform_scramble(r[0], seeds_[0]) + 0.5) * scale,
          (nested_uniform_scramble(r[1], seeds_[1]) + 0.5) * scale};
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    if (p == 1.0) {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError("inverse_normal_cdf: p outside [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; the upper tail is handled through symmetry so erfc
  // never cancels against p.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  double y = upper ? -x : x;
  const double e = 0.5 * std::erfc(-y / std::sqrt(2.0)) - target;
  const double u = e * std::sqrt(kTwoPi) * std::exp(0.5 * y * y);
  y -= u / (1.0 + 0.5 * y * u);
  return upper ? -y : y;
}

} // namespace dressed
