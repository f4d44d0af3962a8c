#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smbp {

/// Human-readable description of the generator stack, echoed in run reports.
inline constexpr std::string_view kRngDescription =
    "mt19937_64 streams seeded via splitmix64(seed, purpose, index); "
    "uniform = top 53 bits; normal = Marsaglia polar; gamma = Marsaglia-Tsang";

enum class StreamPurpose : std::uint64_t {
  curve = 1,
  group_assignment = 2,
  replicate = 3,
  split = 4,
  kmeans = 5,
  cv_repeat = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of an independent substream, a pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

/// Seedable random stream whose output is fixed by the algorithms named in
/// kRngDescription, independent of the standard library's distributions.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
      : engine_(derive_seed(seed, purpose, index)) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();
  /// Gamma(shape, 1), shape >= 1.
  double gamma(double shape);
  double beta(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smbp
