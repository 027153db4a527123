#pragma once

// Two-dimensional Sobol points with hash-based nested uniform (Owen)
// scrambling, and the inverse standard-normal CDF.

#include <array>
#include <cstdint>

namespace dressed {

class ScrambledSobol2D {
public:
  explicit ScrambledSobol2D(std::uint64_t seed);

  /// Point `index` in (0, 1)^2.
  std::array<double, 2> point(std::uint32_t index) const;
  /// Unscrambled 32-bit coordinates, for testing the net structure.
  static std::array<std::uint32_t, 2> raw(std::uint32_t index);

private:
  std::array<std::uint32_t, 2> seeds_;
};

/// Phi^{-1}(p) for p in (0, 1); rational approximation plus one Halley step,
/// relative error below 1e-12 over the open interval.
double inverse_normal_cdf(double p);

std::uint64_t splitmix64(std::uint64_t& state);

} // namespace dressed
