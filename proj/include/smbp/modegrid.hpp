#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smbp/density.hpp"
#include "smbp/grid.hpp"

namespace smbp {

/// Default cells per axis: 120 up to three dimensions, 16 beyond.
std::size_t default_cells_per_axis(std::size_t d);

/// Axis j spans [min_j - p * delta h_j, max_j + p * delta h_j].
RegularGrid build_grid(const RowMatrix& scores, std::size_t cells_per_axis, double padding_bandwidths,
                       const Bandwidth& bw, std::size_t cell_cap = kDefaultCellCap);

struct Mode {
  std::size_t cell = 0;  // linear grid index
  std::vector<std::size_t> index;
  std::vector<double> center;
  double value = 0.0;
};

/// Retained modes sorted by descending density (ties by cell index).
struct ModeSet {
  std::vector<Mode> modes;
  std::size_t r = 1;
};

/// A cell is retained when, under the order (density descending, index
/// ascending), it beats every other cell of its (2r+1)^d window clipped at
/// the grid edges. Zero-density cells are never modes.
ModeSet find_modes(const DensityEstimate& density, std::size_t r);

struct Region {
  std::size_t mode = 0;            // position in ModeSet::modes
  std::vector<std::size_t> cells;  // sorted linear indices
  double threshold = 0.0;          // lowest density inside the region
};

struct RegionSet {
  std::vector<Region> regions;  // one per retained mode, in ModeSet order
  std::vector<int> cell_region;  // region position per cell, -1 for none
};

/// Largest Moore-connected upper-level set around each mode containing no
/// other mode, from a descending union-find sweep over density levels.
RegionSet extract_regions(const DensityEstimate& density, const ModeSet& modes);

/// Cell index vector containing x, or nullopt outside the grid bounds.
std::optional<std::vector<std::size_t>> locate_cell(const RegularGrid& grid, std::span<const double> x);

}  // namespace smbp
