#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "smbp/density.hpp"
#include "smbp/grid.hpp"

namespace fixture {

// Sum of random anisotropic Gaussian bumps on a regular grid. With
// `quantum` > 0 the values are floored to multiples of it, which creates
// plateaus and exact ties.
inline smbp::DensityEstimate random_mixture(std::size_t d, std::uint64_t seed, double quantum = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t counts[] = {0, 80, 26, 10};
  std::vector<smbp::GridAxis> axes(d, smbp::GridAxis{0.0, 1.0, counts[d]});
  smbp::RegularGrid grid(axes);

  const int bumps = 2 + static_cast<int>(rng() % 5);
  std::vector<std::vector<double>> centre(static_cast<std::size_t>(bumps), std::vector<double>(d));
  std::vector<double> weight(static_cast<std::size_t>(bumps)), width(static_cast<std::size_t>(bumps));
  for (int b = 0; b < bumps; ++b) {
    for (auto& c : centre[static_cast<std::size_t>(b)]) c = u(rng);
    weight[static_cast<std::size_t>(b)] = 0.3 + u(rng);
    width[static_cast<std::size_t>(b)] = 0.05 + 0.15 * u(rng);
  }
  std::vector<double> values(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center_of(c);
    double v = 0.0;
    for (int b = 0; b < bumps; ++b) {
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double z = (x[j] - centre[static_cast<std::size_t>(b)][j]) / width[static_cast<std::size_t>(b)];
        q += z * z;
      }
      v += weight[static_cast<std::size_t>(b)] * std::exp(-0.5 * q);
    }
    values[c] = quantum > 0.0 ? quantum * std::floor(v / quantum) : v;
  }
  return smbp::DensityEstimate{grid, std::move(values), smbp::Bandwidth{std::vector<double>(d, 1.0), 1.0},
                               smbp::KernelSpec{smbp::KernelProfile::gaussian, d}};
}

inline oracle::Field as_field(const smbp::DensityEstimate& est) {
  oracle::Field f;
  for (const auto& a : est.grid.axes()) f.shape.push_back(a.count);
  f.values = est.values;
  return f;
}

}  // namespace fixture
