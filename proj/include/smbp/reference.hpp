#pragma once

// Serial reference versions of the parallel grid kernels. They share no
// code with the fast paths beyond kde_at and the grid geometry, and exist
// for equivalence tests and the kernel benchmark.

#include "smbp/density.hpp"
#include "smbp/modegrid.hpp"

namespace smbp::reference {

/// One kde_at call per cell centre, single-threaded.
DensityEstimate kde_on_grid(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
                            const RegularGrid& grid);

/// Full window scan of every cell, single-threaded, no neighbour prefilter.
ModeSet find_modes(const DensityEstimate& density, std::size_t r);

}  // namespace smbp::reference
