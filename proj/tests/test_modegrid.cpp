#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "smbp/error.hpp"
#include "smbp/modegrid.hpp"
#include "smbp/reference.hpp"

using namespace smbp;

namespace {

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// 1-D density sum_b w_b phi(x - c_b) on [lo, hi] with the given cell count.
DensityEstimate line_density(const std::vector<double>& centres, const std::vector<double>& weights, double lo,
                             double hi, std::size_t cells) {
  RegularGrid grid({GridAxis{lo, hi, cells}});
  std::vector<double> v(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double x = grid.center(0, c);
    for (std::size_t b = 0; b < centres.size(); ++b) v[c] += weights[b] * phi(x - centres[b]);
  }
  return {grid, v, Bandwidth{{1.0}, 1.0}, KernelSpec{KernelProfile::gaussian, 1}};
}

// Two bumps at (+-2, 0) in the plane.
DensityEstimate two_bumps(std::size_t cells) {
  RegularGrid grid({GridAxis{-5.0, 5.0, cells}, GridAxis{-3.0, 3.0, cells}});
  std::vector<double> v(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center_of(c);
    v[c] = (phi(x[0] - 2.0) + phi(x[0] + 2.0)) * phi(x[1]);
  }
  return {grid, v, Bandwidth{{1.0, 1.0}, 1.0}, KernelSpec{KernelProfile::gaussian, 2}};
}

}  // namespace

TEST_CASE("grid construction") {
  RowMatrix s(3, 2);
  s << 0.0, 0.0, 1.0, 0.5, 0.3, 1.0;
  const Bandwidth bw{{0.1, 0.1}, 1.0};
  const auto g = build_grid(s, 50, 0.0, bw);
  CHECK(g.axis(0).lower == 0.0);
  CHECK(g.axis(0).upper == 1.0);
  CHECK(g.axis(1).upper == 1.0);
  CHECK(g.size() == 2500);

  const auto padded = build_grid(s, 50, 3.0, bw);
  CHECK(padded.axis(0).lower == doctest::Approx(-0.3));
  CHECK(padded.axis(0).upper == doctest::Approx(1.3));

  RowMatrix s5 = RowMatrix::Random(10, 5);
  try {
    build_grid(s5, 50, 3.0, Bandwidth{std::vector<double>(5, 0.1), 1.0});
    FAIL("expected grid_too_large");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_too_large);
  }
  CHECK(default_cells_per_axis(3) == 120);
  CHECK(default_cells_per_axis(4) == 16);
}

TEST_CASE("grid indexing is lexicographic") {
  RegularGrid g({GridAxis{0, 1, 3}, GridAxis{0, 1, 4}, GridAxis{0, 1, 2}});
  std::vector<std::size_t> prev;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto idx = g.index_of(c);
    CHECK(g.ravel(idx) == c);
    if (c > 0) CHECK(std::lexicographical_compare(prev.begin(), prev.end(), idx.begin(), idx.end()));
    prev = idx;
  }
  std::vector<std::size_t> nb;
  g.neighbours(0, nb);
  CHECK(nb.size() == 7);
  g.neighbours(g.ravel(std::vector<std::size_t>{1, 1, 0}), nb);
  CHECK(nb.size() == 17);
}

TEST_CASE("neighbour lists agree with explicit adjacency") {
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<GridAxis> axes(d, GridAxis{0.0, 1.0, 5});
    axes[0].count = 4;
    RegularGrid g(axes);
    oracle::Field f;
    for (auto& a : axes) f.shape.push_back(a.count);
    std::vector<std::size_t> nb;
    for (std::size_t c = 0; c < g.size(); ++c) {
      g.neighbours(c, nb);
      std::set<std::size_t> got(nb.begin(), nb.end());
      std::set<std::size_t> want;
      for (std::size_t o = 0; o < g.size(); ++o)
        if (f.adjacent(c, o)) want.insert(o);
      CHECK(got == want);
      CHECK(got.size() == nb.size());
    }
  }
}

TEST_CASE("locating cells") {
  RegularGrid g({GridAxis{-1.0, 1.0, 10}, GridAxis{0.0, 2.0, 4}});
  const std::vector<double> lower{-1.0, 0.0};
  CHECK(*locate_cell(g, lower) == std::vector<std::size_t>{0, 0});
  const std::vector<double> top{std::nextafter(1.0, 0.0), std::nextafter(2.0, 0.0)};
  CHECK(*locate_cell(g, top) == std::vector<std::size_t>{9, 3});
  CHECK_FALSE(locate_cell(g, std::vector<double>{-1.5, 1.0}).has_value());
  CHECK_FALSE(locate_cell(g, std::vector<double>{0.0, 2.5}).has_value());
}

TEST_CASE("mode search examples") {
  RegularGrid grid({GridAxis{-4.0, 4.0, 41}, GridAxis{-4.0, 4.0, 41}});
  std::vector<double> v(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center_of(c);
    v[c] = phi(x[0] - 0.3) * phi(x[1] + 0.5);
  }
  const DensityEstimate single{grid, v, Bandwidth{{1, 1}, 1}, KernelSpec{KernelProfile::gaussian, 2}};
  const auto m1 = find_modes(single, 1);
  REQUIRE(m1.modes.size() == 1);
  CHECK(m1.modes[0].center[0] == doctest::Approx(0.3).epsilon(0.1));
  CHECK(std::abs(m1.modes[0].center[0] - 0.3) <= grid.resolution(0) / 2 + 1e-12);
  CHECK(std::abs(m1.modes[0].center[1] + 0.5) <= grid.resolution(1) / 2 + 1e-12);

  const auto two = two_bumps(50);
  CHECK(find_modes(two, 1).modes.size() == 2);
  CHECK(find_modes(two, 50).modes.size() == 1);
  const auto ms = find_modes(two, 1);
  CHECK(ms.modes[0].value >= ms.modes[1].value);
}

TEST_CASE("bandwidth smoothing merges the two-bump fixture") {
  RowMatrix pts(200, 1);
  for (Eigen::Index i = 0; i < 200; ++i) pts(i, 0) = (i < 100 ? -2.0 : 2.0) + 0.02 * static_cast<double>(i % 10 - 5);
  const KernelSpec k{KernelProfile::gaussian, 1};
  const Bandwidth base{{1.0}, 1.0};
  const auto grid = build_grid(pts, 200, 3.0, base.scaled(5.0));
  CHECK(find_modes(kde_on_grid(pts, base.scaled(5.0), k, grid), 1).modes.size() == 1);
  CHECK(find_modes(kde_on_grid(pts, base.scaled(0.5), k, grid), 1).modes.size() == 2);
}

TEST_CASE("parallel mode search equals the serial reference") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto est = fixture::random_mixture(1 + s % 3, s, s % 2 ? 0.02 : 0.0);
    for (std::size_t r : {1u, 2u, 4u}) {
      const auto a = find_modes(est, r);
      const auto b = reference::find_modes(est, r);
      REQUIRE(a.modes.size() == b.modes.size());
      for (std::size_t i = 0; i < a.modes.size(); ++i) CHECK(a.modes[i].cell == b.modes[i].cell);
    }
  }
}

TEST_CASE("mode count is non-increasing in r") {
  for (std::uint64_t s = 100; s < 115; ++s) {
    const auto est = fixture::random_mixture(1 + s % 3, s, 0.0);
    std::size_t prev = find_modes(est, 1).modes.size();
    for (std::size_t r = 2; r <= 8; ++r) {
      const std::size_t now = find_modes(est, r).modes.size();
      CHECK(now <= prev);
      prev = now;
    }
  }
}

TEST_CASE("zero-density cells are never modes") {
  RegularGrid grid({GridAxis{0.0, 1.0, 9}});
  const DensityEstimate flat{grid, std::vector<double>(9, 0.0), Bandwidth{{1.0}, 1.0},
                             KernelSpec{KernelProfile::epanechnikov, 1}};
  CHECK(find_modes(flat, 1).modes.empty());
}

TEST_CASE("lone mode owns the whole grid") {
  const auto est = line_density({0.0}, {1.0}, -3.0, 3.0, 31);
  const auto modes = find_modes(est, 1);
  REQUIRE(modes.modes.size() == 1);
  const auto regions = extract_regions(est, modes);
  CHECK(regions.regions[0].cells.size() == 31);
  CHECK(regions.regions[0].threshold == *std::min_element(est.values.begin(), est.values.end()));
}

TEST_CASE("two bumps split at the saddle") {
  const auto est = two_bumps(60);
  const auto modes = find_modes(est, 1);
  REQUIRE(modes.modes.size() == 2);
  const auto regions = extract_regions(est, modes);
  std::set<std::size_t> a(regions.regions[0].cells.begin(), regions.regions[0].cells.end());
  for (auto c : regions.regions[1].cells) CHECK(a.count(c) == 0);
  for (std::size_t g = 0; g < 2; ++g) {
    const auto& cells = regions.regions[g].cells;
    CHECK(std::binary_search(cells.begin(), cells.end(), modes.modes[g].cell));
    const double saddle = 2.0 * phi(2.0) * phi(0.0);
    // the gradient vanishes at the saddle, so neighbouring cells differ little
    CHECK(std::abs(regions.regions[g].threshold - saddle) < 0.02 * saddle);
  }
}

TEST_CASE("middle of three bumps freezes at the higher saddle") {
  const std::vector<double> centres{-4.0, 0.0, 4.0}, weights{1.0, 0.5, 0.8};
  const auto est = line_density(centres, weights, -8.0, 8.0, 801);
  const auto modes = find_modes(est, 1);
  REQUIRE(modes.modes.size() == 3);
  const auto regions = extract_regions(est, modes);
  auto saddle = [&](double lo, double hi) {
    double best = 1e9;
    for (double x = lo; x <= hi; x += 1e-4) {
      double v = 0.0;
      for (std::size_t b = 0; b < 3; ++b) v += weights[b] * phi(x - centres[b]);
      best = std::min(best, v);
    }
    return best;
  };
  const double higher = std::max(saddle(-4.0, 0.0), saddle(0.0, 4.0));
  std::size_t middle = 3;
  for (std::size_t g = 0; g < 3; ++g)
    if (std::abs(modes.modes[g].center[0]) < 0.1) middle = g;
  REQUIRE(middle < 3);
  CHECK(std::abs(regions.regions[middle].threshold - higher) < 0.02 * 0.4);
}

TEST_CASE("regions equal the flood-fill threshold oracle") {
  for (std::uint64_t s = 0; s < 45; ++s) {
    const std::size_t d = 1 + s % 3;
    const auto est = fixture::random_mixture(d, 1000 + s, s % 4 == 3 ? 0.05 : 0.0);
    const std::size_t r = 1 + s % 3;
    const auto modes = find_modes(est, r);
    if (modes.modes.empty()) continue;
    const auto regions = extract_regions(est, modes);
    std::vector<std::size_t> cells;
    for (const auto& m : modes.modes) cells.push_back(m.cell);
    const auto want = oracle::threshold_regions(fixture::as_field(est), cells);
    REQUIRE(want.size() == regions.regions.size());
    for (std::size_t g = 0; g < want.size(); ++g) {
      CHECK(regions.regions[g].cells == want[g].cells);
      CHECK(regions.regions[g].threshold == want[g].threshold);
    }
    // disjoint, one mode each
    std::vector<int> owner(est.values.size(), -1);
    for (std::size_t g = 0; g < regions.regions.size(); ++g) {
      std::size_t own = 0;
      for (auto c : regions.regions[g].cells) {
        CHECK(owner[c] == -1);
        owner[c] = static_cast<int>(g);
        if (std::find(cells.begin(), cells.end(), c) != cells.end()) ++own;
      }
      CHECK(own == 1);
    }
    CHECK(owner == regions.cell_region);
  }
}

TEST_CASE("mode search and regions are deterministic") {
  const auto est = fixture::random_mixture(3, 77);
  const auto a = find_modes(est, 2), b = find_modes(est, 2);
  REQUIRE(a.modes.size() == b.modes.size());
  for (std::size_t i = 0; i < a.modes.size(); ++i) CHECK(a.modes[i].cell == b.modes[i].cell);
  CHECK(extract_regions(est, a).cell_region == extract_regions(est, b).cell_region);
  CHECK_THROWS_AS(find_modes(est, 0), Error);
  CHECK_THROWS_AS(extract_regions(est, ModeSet{}), Error);
}
