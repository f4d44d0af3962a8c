#include "smbp/grid.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

RegularGrid::RegularGrid(std::vector<GridAxis> axes, std::size_t cell_cap) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxDim) {
    throw Error(ErrorCode::invalid_input,
                "grid needs between 1 and " + std::to_string(kMaxDim) + " axes");
  }
  double total = 1.0;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const auto& a = axes_[j];
    if (a.count < 1) {
      throw Error(ErrorCode::invalid_input,
                  "grid axis " + std::to_string(j) + " has " + std::to_string(a.count) +
                      " cells, need at least 1");
    }
    if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || !(a.lower < a.upper)) {
      throw Error(ErrorCode::invalid_input,
                  "grid axis " + std::to_string(j) + " has empty or invalid bounds");
    }
    total *= static_cast<double>(a.count);
  }
  if (total > static_cast<double>(cell_cap)) {
    std::ostringstream msg;
    msg << "grid of ";
    for (std::size_t j = 0; j < axes_.size(); ++j) msg << (j ? "x" : "") << axes_[j].count;
    msg << " cells in " << axes_.size() << " dimensions has " << total
        << " cells, exceeding the cap of " << cell_cap;
    throw Error(ErrorCode::grid_too_large, msg.str());
  }
  size_ = static_cast<std::size_t>(total);
  strides_.assign(axes_.size(), 1);
  for (std::size_t j = axes_.size() - 1; j-- > 0;) {
    strides_[j] = strides_[j + 1] * axes_[j + 1].count;
  }
  // Interior stencil in odometer order; skipped in high dimension where 3^d explodes.
  if (axes_.size() <= 6) {
    const std::size_t d = axes_.size();
    int offset[kMaxDim];
    for (std::size_t j = 0; j < d; ++j) offset[j] = -1;
    while (true) {
      std::ptrdiff_t delta = 0;
      bool centre = true;
      for (std::size_t j = 0; j < d; ++j) {
        if (offset[j] != 0) centre = false;
        delta += offset[j] * static_cast<std::ptrdiff_t>(strides_[j]);
      }
      if (!centre) interior_.push_back(delta);
      std::size_t j = d;
      while (j-- > 0) {
        if (++offset[j] <= 1) break;
        offset[j] = -1;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }
}

void RegularGrid::unravel(std::size_t linear, std::span<std::size_t> index) const {
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    index[j] = linear / strides_[j];
    linear %= strides_[j];
  }
}

std::size_t RegularGrid::ravel(std::span<const std::size_t> index) const {
  std::size_t linear = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) linear += index[j] * strides_[j];
  return linear;
}

std::vector<std::size_t> RegularGrid::index_of(std::size_t linear) const {
  std::vector<std::size_t> index(axes_.size());
  unravel(linear, index);
  return index;
}

std::vector<double> RegularGrid::center_of(std::size_t linear) const {
  std::vector<double> c(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    c[j] = center(j, linear / strides_[j]);
    linear %= strides_[j];
  }
  return c;
}

void RegularGrid::neighbours(std::size_t linear, std::vector<std::size_t>& out) const {
  out.clear();
  const std::size_t d = axes_.size();
  std::size_t index[kMaxDim];
  std::size_t rem = linear;
  for (std::size_t j = 0; j < d; ++j) {
    index[j] = rem / strides_[j];
    rem %= strides_[j];
  }
  if (!interior_.empty()) {
    bool interior = true;
    for (std::size_t j = 0; j < d; ++j) interior = interior && index[j] > 0 && index[j] + 1 < axes_[j].count;
    if (interior) {
      for (std::ptrdiff_t delta : interior_) {
        out.push_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(linear) + delta));
      }
      return;
    }
  }
  // odometer over offsets in {-1, 0, 1}^d
  int offset[kMaxDim];
  for (std::size_t j = 0; j < d; ++j) offset[j] = -1;
  while (true) {
    bool inside = true;
    bool centre = true;
    std::ptrdiff_t delta = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (offset[j] != 0) centre = false;
      const auto pos = static_cast<std::ptrdiff_t>(index[j]) + offset[j];
      if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(axes_[j].count)) {
        inside = false;
        break;
      }
      delta += offset[j] * static_cast<std::ptrdiff_t>(strides_[j]);
    }
    if (inside && !centre) out.push_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(linear) + delta));
    std::size_t j = d;
    while (j-- > 0) {
      if (++offset[j] <= 1) break;
      offset[j] = -1;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
}

std::optional<std::size_t> RegularGrid::locate(std::span<const double> x) const {
  if (x.size() != axes_.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "point has " + std::to_string(x.size()) + " coordinates, grid has " +
                    std::to_string(axes_.size()) + " axes");
  }
  std::size_t linear = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const auto& a = axes_[j];
    if (!(x[j] >= a.lower && x[j] <= a.upper)) return std::nullopt;
    auto i = static_cast<std::size_t>(std::floor((x[j] - a.lower) / resolution(j)));
    if (i >= a.count) i = a.count - 1;
    linear += i * strides_[j];
  }
  return linear;
}

}  // namespace smbp
