#include "smbp/reference.hpp"

#include <algorithm>

#include "smbp/error.hpp"

namespace smbp::reference {

DensityEstimate kde_on_grid(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
                            const RegularGrid& grid) {
  if (grid.dim() != static_cast<std::size_t>(scores.cols())) {
    throw Error(ErrorCode::dimension_mismatch, "grid and score dimensions differ");
  }
  DensityEstimate est{grid, std::vector<double>(grid.size()), bw, kernel};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    est.values[c] = kde_at(scores, bw, kernel, grid.center_of(c));
  }
  return est;
}

ModeSet find_modes(const DensityEstimate& density, std::size_t r) {
  const RegularGrid& grid = density.grid;
  const auto& v = density.values;
  if (v.empty()) throw Error(ErrorCode::invalid_input, "empty density");
  if (r < 1) throw Error(ErrorCode::invalid_input, "mode radius r must be at least 1");
  const std::size_t d = grid.dim();
  const auto ri = static_cast<long>(r);

  std::vector<std::vector<std::size_t>> indices(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) indices[c] = grid.index_of(c);

  ModeSet set;
  set.r = r;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (!(v[cell] > 0.0)) continue;
    const auto& index = indices[cell];
    bool best = true;
    for (std::size_t other = 0; other < grid.size() && best; ++other) {
      if (other == cell) continue;
      const auto& oi = indices[other];
      bool in_window = true;
      for (std::size_t j = 0; j < d; ++j) {
        const long diff = static_cast<long>(oi[j]) - static_cast<long>(index[j]);
        if (diff < -ri || diff > ri) {
          in_window = false;
          break;
        }
      }
      if (!in_window) continue;
      const bool wins = v[cell] > v[other] || (v[cell] == v[other] && cell < other);
      if (!wins) best = false;
    }
    if (best) set.modes.push_back({cell, index, grid.center_of(cell), v[cell]});
  }
  std::stable_sort(set.modes.begin(), set.modes.end(),
                   [](const Mode& a, const Mode& b) { return a.value > b.value; });
  return set;
}

}  // namespace smbp::reference
