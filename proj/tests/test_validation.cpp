#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "smbp/error.hpp"
#include "smbp/validation.hpp"

using namespace smbp;

TEST_CASE("purity examples") {
  const std::vector<int> c{1, 1, 2, 2};
  CHECK(purity(c, c) == 1.0);
  CHECK(purity(c, std::vector<int>{1, 2, 1, 2}) == 0.5);
  CHECK(purity(std::vector<int>{1, 1, 1, 1}, std::vector<int>{1, 1, 1, 2}) == 0.75);
}

TEST_CASE("Calinski-Harabasz examples") {
  RowMatrix p(4, 2);
  p << 0, 0, 0, 1, 10, 0, 10, 1;
  const std::vector<int> by_x{1, 1, 2, 2};
  CHECK(calinski_harabasz(p, by_x) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(calinski_harabasz(p, std::vector<int>{1, 1, 1, 1}) == 0.0);

  RowMatrix two(2, 2);
  two << 0, 0, 3, 4;
  CHECK_THROWS_AS(calinski_harabasz(two, std::vector<int>{1, 2}), Error);
}

TEST_CASE("Calinski-Harabasz is invariant under rigid motions") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  RowMatrix p(30, 2);
  std::vector<int> lab(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    lab[static_cast<std::size_t>(i)] = 1 + static_cast<int>(i % 3);
    p(i, 0) = nd(rng) + 3.0 * static_cast<double>(i % 3);
    p(i, 1) = nd(rng);
  }
  const double base = calinski_harabasz(p, lab);
  const double a = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  RowMatrix q = p * rot.transpose();
  q.col(0).array() += 12.0;
  q.col(1).array() -= 4.0;
  CHECK(std::abs(calinski_harabasz(q, lab) - base) < 1e-9 * base);
}

TEST_CASE("misclassification examples") {
  const std::vector<int> c{1, 1, 2, 2};
  CHECK(misclassification(c, std::vector<int>{2, 2, 1, 1}) == 0.0);
  CHECK(misclassification(c, std::vector<int>{1, 1, 1, 2}) == 0.25);
  // three clusters over two balanced classes; cluster 3 is pure class 2
  const std::vector<int> k3{1, 1, 1, 2, 2, 3, 3, 3};
  const std::vector<int> cls{1, 1, 2, 2, 2, 2, 2, 2};
  CHECK(misclassification(k3, cls, MatchRule::majority) == oracle::brute_force_error(k3, cls, false));
  CHECK(misclassification(k3, cls, MatchRule::one_to_one) == oracle::brute_force_error(k3, cls, true));
  CHECK(misclassification(k3, cls, MatchRule::majority) == doctest::Approx(1.0 / 8.0));
  CHECK(misclassification(k3, cls, MatchRule::one_to_one) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("misclassification equals brute force over label maps") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 300; ++rep) {
    const int G = 2 + rep % 3;
    const int K = 1 + static_cast<int>(rng() % 5);
    const std::size_t n = 6 + rng() % 20;
    std::vector<int> cls(n), clu(n);
    for (std::size_t i = 0; i < n; ++i) {
      cls[i] = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(G));
      clu[i] = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(K));
    }
    CHECK(misclassification(clu, cls) == doctest::Approx(oracle::brute_force_error(clu, cls, true)).epsilon(1e-15));
    const double maj = misclassification(clu, cls, MatchRule::majority);
    // same counts: an optimal bijection; otherwise the unrestricted optimum
    std::vector<int> a = clu, b = cls;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const bool same = std::unique(a.begin(), a.end()) - a.begin() == std::unique(b.begin(), b.end()) - b.begin();
    CHECK(maj == doctest::Approx(oracle::brute_force_error(clu, cls, same)).epsilon(1e-15));
  }
}

TEST_CASE("scores are invariant under relabeling") {
  const std::vector<int> clu{1, 2, 2, 3, 1, 3, 3, 2};
  const std::vector<int> cls{1, 1, 2, 2, 1, 2, 1, 2};
  std::vector<int> clu2, cls2;
  for (int v : clu) clu2.push_back(v == 1 ? 7 : v == 2 ? 3 : 5);
  for (int v : cls) cls2.push_back(3 - v);
  CHECK(purity(clu, cls) == purity(clu2, cls2));
  CHECK(misclassification(clu, cls) == misclassification(clu2, cls2));
  CHECK(misclassification(clu, cls, MatchRule::majority) == misclassification(clu2, cls2, MatchRule::majority));
}

TEST_CASE("assignment solver") {
  const std::vector<std::vector<double>> cost{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  const auto a = min_cost_assignment(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i][a[i]];
  CHECK(total == 5.0);
  CHECK_THROWS_AS(misclassification(std::vector<int>{1, 2}, std::vector<int>{1}), Error);
}
