#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "smbp/error.hpp"
#include "smbp/fpca.hpp"
#include "smbp/simulate.hpp"

using namespace smbp;

namespace {

FunctionalSample horseshoe_sample(std::size_t n_each, std::uint64_t seed) {
  HorseshoeConfig c;
  c.n1 = c.n2 = n_each;
  c.m = 40;
  c.seed = seed;
  return generate(c).sample;
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

TEST_CASE("rank-one sample") {
  const auto g = AbscissaGrid::equispaced(31);
  const std::vector<double> c{-1.5, -0.5, 0.25, 0.75, 1.0};
  double mean_c = 0.0;
  for (double v : c) mean_c += v / 5.0;
  double s2 = 0.0;
  for (double v : c) s2 += (v - mean_c) * (v - mean_c) / 5.0;
  RowMatrix x(5, 31);
  std::vector<double> psi;
  for (double t : g.points()) psi.push_back(1.0 + t * t);
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 31; ++k) x(i, k) = c[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(k)];
  const auto model = fit_fpca(FunctionalSample(g, x), 4);
  const double norm2 = inner_product(psi, psi, g);
  CHECK(std::abs(model.eigenvalues[0] - s2 * norm2) < 1e-8);
  CHECK(model.eigenvalues[1] < 1e-12);
  CHECK(fev(model, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.positive_components() == 1);
}

TEST_CASE("identical curves are degenerate") {
  const auto g = AbscissaGrid::equispaced(10);
  RowMatrix x = RowMatrix::Constant(4, 10, 2.5);
  try {
    fit_fpca(FunctionalSample(g, x), 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_covariance);
    CHECK(e.kind() == ErrorKind::numerical);
  }
}

TEST_CASE("fraction of explained variance") {
  // eigenvalues {4, 2, 1, 1} from +-c_j on disjoint spikes orthonormal under the weights
  const auto g = AbscissaGrid::equispaced(9);
  const std::vector<double> lambda{4, 2, 1, 1};
  const std::size_t spikes[4] = {1, 3, 5, 7};
  RowMatrix x = RowMatrix::Zero(8, 9);
  for (int j = 0; j < 4; ++j) {
    const auto k = static_cast<Eigen::Index>(spikes[j]);
    const double c = 2.0 * std::sqrt(lambda[static_cast<std::size_t>(j)]) / std::sqrt(g.weights()[spikes[j]]);
    x(2 * j, k) = c;
    x(2 * j + 1, k) = -c;
  }
  const auto model = fit_fpca(FunctionalSample(g, x), 7);
  CHECK(model.total_variance == doctest::Approx(8.0));
  CHECK(model.eigenvalues[0] == doctest::Approx(4.0));
  CHECK(fev(model, 2) == doctest::Approx(0.75));
  CHECK(fev(model, 7) == 1.0);
  CHECK_THROWS_AS(fev(model, 0), Error);
  CHECK_THROWS_AS(fev(model, 8), Error);
}

TEST_CASE("orthonormality, score moments and FEV profile") {
  const auto sample = horseshoe_sample(30, 11);
  const auto model = fit_fpca(sample, max_components_for(sample));
  const std::size_t J = model.positive_components();
  REQUIRE(J >= 5);
  const auto& g = model.grid;
  for (std::size_t a = 0; a < J; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double ip = inner_product(row_span(model.eigenfunctions, static_cast<Eigen::Index>(a)),
                                      row_span(model.eigenfunctions, static_cast<Eigen::Index>(b)), g);
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
  }
  const auto n = static_cast<double>(sample.n());
  for (std::size_t a = 0; a < 5; ++a) {
    const auto ca = model.scores.col(static_cast<Eigen::Index>(a));
    CHECK(std::abs(ca.sum() / n) < 1e-10);
    CHECK(std::abs(ca.squaredNorm() / n - model.eigenvalues[a]) < 1e-8);
    for (std::size_t b = 0; b < a; ++b) {
      CHECK(std::abs(ca.dot(model.scores.col(static_cast<Eigen::Index>(b))) / n) < 1e-8);
    }
  }
  for (std::size_t j = 1; j < model.components(); ++j) {
    CHECK(model.eigenvalues[j] <= model.eigenvalues[j - 1]);
    CHECK(model.fev[j] >= model.fev[j - 1]);
  }
  CHECK(std::abs(model.fev.back() - 1.0) < 1e-12);
}

TEST_CASE("projection and modal curves round trip") {
  const auto sample = horseshoe_sample(25, 3);
  const auto model = fit_fpca(sample, max_components_for(sample));
  const std::size_t d = 4;

  const auto zero = project(model, model.mean, d);
  for (double v : zero) CHECK(std::abs(v) < 1e-12);

  std::vector<double> c = model.mean;
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += 2.0 * model.eigenfunctions(0, static_cast<Eigen::Index>(k));
  const auto two = project(model, c, d);
  CHECK(std::abs(two[0] - 2.0) < 1e-8);
  for (std::size_t j = 1; j < d; ++j) CHECK(std::abs(two[j]) < 1e-8);

  for (std::size_t i = 0; i < sample.n(); i += 7) {
    const auto p = project(model, sample.curve(i), d);
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(std::abs(p[j] - model.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-10);
    }
  }

  CHECK(max_abs(modal_curve(model, std::vector<double>(d, 0.0)), model.mean) == 0.0);
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;
  const auto m1 = modal_curve(model, e1);
  for (std::size_t k = 0; k < m1.size(); ++k)
    CHECK(m1[k] == doctest::Approx(model.mean[k] + model.eigenfunctions(0, static_cast<Eigen::Index>(k))));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(d);
    for (auto& x : v) x = nd(rng);
    CHECK(max_abs(project(model, modal_curve(model, v), d), v) < 1e-8);
  }
  CHECK_THROWS_AS(project(model, std::vector<double>(3, 0.0), 2), Error);
}

TEST_CASE("Parseval") {
  const auto sample = horseshoe_sample(15, 8);
  const auto full = fit_fpca(sample, max_components_for(sample));
  const auto part = fit_fpca(sample, 3);
  const auto& g = sample.grid();
  for (std::size_t i = 0; i < sample.n(); ++i) {
    std::vector<double> c(sample.m());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = sample.curve(i)[k] - full.mean[k];
    const double norm2 = inner_product(c, c, g);
    const double s_full = full.scores.row(static_cast<Eigen::Index>(i)).squaredNorm();
    const double s_part = part.scores.row(static_cast<Eigen::Index>(i)).squaredNorm();
    CHECK(s_part <= norm2 + 1e-8);
    CHECK(std::abs(s_full - norm2) < 1e-6);
  }
}

TEST_CASE("eigen residual") {
  const auto sample = horseshoe_sample(20, 4);
  const auto model = fit_fpca(sample, 6);
  const auto c = center(sample);
  const auto& w = sample.grid().weights();
  const auto n = static_cast<double>(sample.n());
  const RowMatrix& x = c.centered.values();
  for (std::size_t j = 0; j < 6; ++j) {
    const auto xi = model.eigenfunctions.row(static_cast<Eigen::Index>(j));
    // (C xi)(s) = 1/n sum_i x_i(s) <x_i, xi>
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index k = 0; k < x.cols(); ++k) proj[i] += x(i, k) * xi[k] * w[static_cast<std::size_t>(k)];
    const Eigen::VectorXd cxi = x.transpose() * proj / n;
    const double resid = (cxi - model.eigenvalues[j] * xi.transpose()).cwiseAbs().maxCoeff();
    CHECK(resid < 1e-7);
  }
}

TEST_CASE("row permutation") {
  const auto sample = horseshoe_sample(20, 9);
  std::vector<std::size_t> perm(sample.n());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 17 + 5) % perm.size();
  const auto shuffled = sample.subset(perm);
  const auto a = fit_fpca(sample, 5);
  const auto b = fit_fpca(shuffled, 5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(a.eigenvalues[j] - b.eigenvalues[j]) < 1e-10);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(std::abs(b.scores(static_cast<Eigen::Index>(i), j) - a.scores(static_cast<Eigen::Index>(perm[i]), j)) < 1e-8);
    }
  }
}

TEST_CASE("sign convention and determinism") {
  const auto sample = horseshoe_sample(20, 2);
  const auto a = fit_fpca(sample, 5);
  const auto b = fit_fpca(sample, 5);
  CHECK(a.scores == b.scores);
  for (Eigen::Index j = 0; j < 5; ++j) {
    Eigen::Index arg = 0;
    a.eigenfunctions.row(j).cwiseAbs().maxCoeff(&arg);
    CHECK(a.eigenfunctions(j, arg) > 0.0);
  }
  CHECK_THROWS_AS(fit_fpca(sample, 0), Error);
  CHECK_THROWS_AS(fit_fpca(sample, 41), Error);
}
