#include "smbp/simulate.hpp"

#include <cmath>
#include <numbers>

#include "smbp/error.hpp"

namespace smbp {

std::vector<std::string> HorseshoeConfig::validate() const {
  if (n1 + n2 < 2) throw Error(ErrorCode::invalid_input, "simulation needs at least 2 curves");
  if (!pi1 && (n1 == 0 || n2 == 0)) {
    throw Error(ErrorCode::invalid_input, "both groups need at least one curve");
  }
  if (pi1 && !(*pi1 > 0.0 && *pi1 < 1.0)) {
    throw Error(ErrorCode::invalid_input, "group-1 probability must lie in (0, 1)");
  }
  if (L < 4) throw Error(ErrorCode::invalid_input, "basis size L must be at least 4");
  if (m < 2) throw Error(ErrorCode::invalid_input, "need at least 2 discretization points");
  if (!std::isfinite(k) || !(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::invalid_input, "k must be finite and sigma non-negative");
  }
  std::vector<std::string> warnings;
  if (!(k > 0.0 && k < 1.0)) warnings.emplace_back("k outside (0, 1): groups become linearly separable");
  if (!(sigma < k / 3.0)) warnings.emplace_back("sigma >= k/3: groups overlap heavily");
  return warnings;
}

double beta55_scaled(Stream& stream) {
  return 2.0 * std::numbers::pi * stream.beta(5.0, 5.0) - std::numbers::pi;
}

double fourier_basis(std::size_t l, double t) {
  const double harmonic = static_cast<double>((l + 1) / 2);
  const double arg = 2.0 * std::numbers::pi * harmonic * t - std::numbers::pi;
  return std::numbers::sqrt2 * (l % 2 == 1 ? std::sin(arg) : std::cos(arg));
}

SimulatedData generate(const HorseshoeConfig& config) {
  config.validate();
  const std::size_t n = config.n1 + config.n2;
  const std::size_t m = config.m;
  const std::size_t L = config.L;
  AbscissaGrid grid = AbscissaGrid::equispaced(m);

  std::vector<int> labels(n);
  if (config.pi1) {
    Stream assign(config.seed, StreamPurpose::group_assignment, 0);
    for (std::size_t i = 0; i < n; ++i) labels[i] = assign.uniform() < *config.pi1 ? 1 : 2;
  } else {
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < config.n1 ? 1 : 2;
  }

  // basis[l-1][k] = sqrt(beta_l) * psi_l(t_k), beta_l = 0.7 * 3^-l
  RowMatrix basis(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(m));
  for (std::size_t l = 1; l <= L; ++l) {
    const double scale = std::sqrt(0.7 * std::pow(3.0, -static_cast<double>(l)));
    for (std::size_t k = 0; k < m; ++k) {
      basis(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(k)) =
          scale * fourier_basis(l, grid.points()[k]);
    }
  }

  const double tail_sd = std::sqrt(0.1);
  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  RowMatrix tau3(static_cast<Eigen::Index>(n), 3);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    std::vector<double> tau(L);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      Stream stream(config.seed, StreamPurpose::curve, i);
      const int g = labels[i];
      const double angle = beta55_scaled(stream);
      // plane rotation by pi/2 for group 2, written with exact cos/sin values
      const double plane_cos = g == 2 ? 0.0 : 1.0;
      const double plane_sin = g == 2 ? 1.0 : 0.0;
      const double shift = config.shift == ShiftRule::power ? std::pow(-config.k, g)
                                                            : (g == 1 ? -config.k : config.k);
      tau[0] = std::sin(angle) * plane_cos + config.sigma * stream.normal();
      tau[1] = std::sin(angle) * plane_sin + config.sigma * stream.normal();
      tau[2] = std::cos(angle) + shift + config.sigma * stream.normal();
      for (std::size_t l = 3; l < L; ++l) tau[l] = tail_sd * stream.normal();

      for (std::size_t k = 0; k < m; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          acc += tau[l] * basis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
        }
        values(ii, static_cast<Eigen::Index>(k)) = acc;
      }
      for (Eigen::Index l = 0; l < 3; ++l) tau3(ii, l) = tau[static_cast<std::size_t>(l)];
    }
  }
  return {FunctionalSample(std::move(grid), std::move(values)), std::move(labels), std::move(tau3)};
}

}  // namespace smbp
