#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smbp/funcdata.hpp"
#include "smbp/random.hpp"

namespace smbp {

/// How the third coordinate of group g is shifted.
enum class ShiftRule {
  power,   // (-k)^g: -k for group 1, k^2 for group 2
  signed_  // (-1)^g k: centres at -k and +k
};

/// Two interlocked noisy semicircles ("horseshoes") in the first three
/// Fourier coefficients, with geometric coefficient decay beyond.
struct HorseshoeConfig {
  std::size_t n1 = 300;
  std::size_t n2 = 300;
  double k = 0.5;
  double sigma = 0.07071067811865475;  // sqrt(0.005)
  std::size_t L = 150;
  std::size_t m = 100;
  std::uint64_t seed = 1;
  /// When set, group 1 membership is Bernoulli(pi1) over n1 + n2 curves.
  std::optional<double> pi1;
  ShiftRule shift = ShiftRule::power;

  /// Throws on invalid values; returns warnings for values outside the
  /// recommended ranges (k in (0,1), sigma < k/3).
  std::vector<std::string> validate() const;
};

struct SimulatedData {
  FunctionalSample sample;
  std::vector<int> labels;  // 1 or 2
  RowMatrix tau;            // n x 3 leading coefficients, for diagnostics
};

SimulatedData generate(const HorseshoeConfig& config);

/// Beta(5,5) mapped linearly onto [-pi, pi].
double beta55_scaled(Stream& stream);

/// l-th Fourier basis function (l >= 1): odd l sine, even l cosine, harmonic ceil(l/2).
double fourier_basis(std::size_t l, double t);

}  // namespace smbp
