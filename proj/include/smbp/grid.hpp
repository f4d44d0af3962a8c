#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace smbp {

inline constexpr std::size_t kDefaultCellCap = std::size_t{1} << 22;
inline constexpr std::size_t kMaxDim = 16;

struct GridAxis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t count = 4;
};

/// Regular d-dimensional grid of cells. Linear indices are row-major with
/// axis 0 slowest, so increasing linear index is lexicographic order of the
/// index vectors.
class RegularGrid {
 public:
  /// Empty placeholder with no axes and no cells.
  RegularGrid() = default;
  explicit RegularGrid(std::vector<GridAxis> axes, std::size_t cell_cap = kDefaultCellCap);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  const GridAxis& axis(std::size_t j) const { return axes_[j]; }

  double resolution(std::size_t j) const {
    return (axes_[j].upper - axes_[j].lower) / static_cast<double>(axes_[j].count);
  }
  double center(std::size_t j, std::size_t i) const {
    return axes_[j].lower + (static_cast<double>(i) + 0.5) * resolution(j);
  }
  std::size_t stride(std::size_t j) const { return strides_[j]; }

  void unravel(std::size_t linear, std::span<std::size_t> index) const;
  std::size_t ravel(std::span<const std::size_t> index) const;
  std::vector<std::size_t> index_of(std::size_t linear) const;
  std::vector<double> center_of(std::size_t linear) const;

  /// Linear indices of the Moore neighbours (3^d - 1 at most, clipped at edges).
  void neighbours(std::size_t linear, std::vector<std::size_t>& out) const;

  /// Cell containing x, or nullopt outside [lower, upper] on some axis.
  std::optional<std::size_t> locate(std::span<const double> x) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<std::ptrdiff_t> interior_;  // Moore offsets of an interior cell
  std::size_t size_ = 0;
};

}  // namespace smbp
