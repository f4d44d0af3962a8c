#include "smbp/modegrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

std::size_t default_cells_per_axis(std::size_t d) { return d <= 3 ? 120 : 16; }

RegularGrid build_grid(const RowMatrix& scores, std::size_t cells_per_axis, double padding_bandwidths,
                       const Bandwidth& bw, std::size_t cell_cap) {
  const auto d = static_cast<std::size_t>(scores.cols());
  if (d == 0 || scores.rows() == 0) {
    throw Error(ErrorCode::invalid_input, "cannot build a grid around an empty score matrix");
  }
  if (bw.h.size() != d) {
    throw Error(ErrorCode::dimension_mismatch, "bandwidth dimension does not match scores");
  }
  if (!(padding_bandwidths >= 0.0)) {
    throw Error(ErrorCode::invalid_input, "grid padding must be non-negative");
  }
  std::vector<GridAxis> axes(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = scores.col(static_cast<Eigen::Index>(j));
    const double pad = padding_bandwidths * bw.width(j);
    axes[j] = {col.minCoeff() - pad, col.maxCoeff() + pad, cells_per_axis};
  }
  return RegularGrid(std::move(axes), cell_cap);
}

namespace {

inline bool beats(const std::vector<double>& v, std::size_t a, std::size_t b) {
  return v[a] > v[b] || (v[a] == v[b] && a < b);
}

// True when `cell` beats every other cell in its clipped (2r+1)^d window.
bool window_max(const RegularGrid& grid, const std::vector<double>& v, std::size_t cell,
                std::size_t r) {
  const std::size_t d = grid.dim();
  std::size_t index[kMaxDim], lo[kMaxDim], hi[kMaxDim], cur[kMaxDim];
  grid.unravel(cell, std::span<std::size_t>(index, d));
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = index[j] >= r ? index[j] - r : 0;
    hi[j] = std::min(grid.axis(j).count - 1, index[j] + r);
    cur[j] = lo[j];
  }
  while (true) {
    const std::size_t other = grid.ravel(std::span<const std::size_t>(cur, d));
    if (other != cell && !beats(v, cell, other)) return false;
    std::size_t j = d;
    while (j-- > 0) {
      if (++cur[j] <= hi[j]) break;
      cur[j] = lo[j];
    }
    if (j == static_cast<std::size_t>(-1)) return true;
  }
}

}  // namespace

ModeSet find_modes(const DensityEstimate& density, std::size_t r) {
  const RegularGrid& grid = density.grid;
  const std::vector<double>& v = density.values;
  if (v.empty() || v.size() != grid.size()) {
    throw Error(ErrorCode::invalid_input, "density estimate is empty or does not match its grid");
  }
  if (r < 1) throw Error(ErrorCode::invalid_input, "mode radius r must be at least 1");

  const auto cells = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<char> retained(grid.size(), 0);
#pragma omp parallel
  {
    std::vector<std::size_t> nb;
#pragma omp for schedule(dynamic, 1024)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      const auto cell = static_cast<std::size_t>(c);
      if (!(v[cell] > 0.0)) continue;
      grid.neighbours(cell, nb);
      bool candidate = true;
      for (std::size_t other : nb) {
        if (v[other] > v[cell]) {
          candidate = false;
          break;
        }
      }
      if (candidate && window_max(grid, v, cell, r)) retained[cell] = 1;
    }
  }

  ModeSet set;
  set.r = r;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (!retained[cell]) continue;
    set.modes.push_back({cell, grid.index_of(cell), grid.center_of(cell), v[cell]});
  }
  std::stable_sort(set.modes.begin(), set.modes.end(),
                   [](const Mode& a, const Mode& b) { return a.value > b.value; });
  return set;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Returns the surviving root.
  std::size_t unite(std::size_t a, std::size_t b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Binary merge tree: leaves are cells (ids < cell count), internal nodes
// record the sweep level at which two components joined.
struct MergeNode {
  std::size_t left = kNone;
  std::size_t right = kNone;
  std::size_t parent = kNone;
  std::size_t level = 0;
};

}  // namespace

RegionSet extract_regions(const DensityEstimate& density, const ModeSet& modes) {
  const RegularGrid& grid = density.grid;
  const std::vector<double>& v = density.values;
  const std::size_t N = grid.size();
  if (modes.modes.empty()) {
    throw Error(ErrorCode::invalid_input, "region extraction needs at least one retained mode");
  }
  if (v.size() != N) {
    throw Error(ErrorCode::invalid_input, "density estimate does not match its grid");
  }

  std::vector<int> mode_at(N, -1);
  for (std::size_t g = 0; g < modes.modes.size(); ++g) {
    const std::size_t cell = modes.modes[g].cell;
    if (cell >= N || mode_at[cell] != -1) {
      throw Error(ErrorCode::invalid_input, "modes must be distinct cells of the grid");
    }
    mode_at[cell] = static_cast<int>(g);
  }

  const std::size_t G = modes.modes.size();
  RegionSet out;
  out.cell_region.assign(N, -1);
  out.regions.resize(G);
  if (G == 1) {
    // A lone mode never meets another: its region is the whole connected grid.
    Region& region = out.regions[0];
    region.cells.resize(N);
    std::iota(region.cells.begin(), region.cells.end(), std::size_t{0});
    region.threshold = *std::min_element(v.begin(), v.end());
    std::fill(out.cell_region.begin(), out.cell_region.end(), 0);
    return out;
  }

  std::vector<std::pair<double, std::size_t>> keyed(N);
  for (std::size_t c = 0; c < N; ++c) keyed[c] = {-v[c], c};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order(N);
  for (std::size_t k = 0; k < N; ++k) order[k] = keyed[k].second;
  keyed.clear();
  keyed.shrink_to_fit();

  DisjointSets sets(N);
  std::vector<std::size_t> mode_count(N, 0);
  std::vector<std::size_t> node_of_root(N, kNone);
  std::vector<MergeNode> tree(N);
  tree.reserve(2 * N);
  std::vector<char> active(N, 0);

  std::vector<std::size_t> region_node(G, kNone);
  std::vector<char> frozen(G, 0);
  std::size_t frozen_count = 0;

  std::vector<std::size_t> nb;
  std::size_t level = 0;
  for (std::size_t begin = 0; begin < N; ++level) {
    std::size_t end = begin + 1;
    while (end < N && v[order[end]] == v[order[begin]]) ++end;

    // Equal densities enter together, so components after each level are
    // exactly the connected components of {value >= level value}.
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t cell = order[k];
      active[cell] = 1;
      tree[cell].level = level;
      node_of_root[cell] = cell;
      mode_count[cell] = mode_at[cell] >= 0 ? 1 : 0;
    }
    bool modes_met = false;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t cell = order[k];
      grid.neighbours(cell, nb);
      for (std::size_t other : nb) {
        if (!active[other]) continue;
        const std::size_t ra = sets.find(cell);
        const std::size_t rb = sets.find(other);
        if (ra == rb) continue;
        if (mode_count[ra] > 0 && mode_count[rb] > 0) modes_met = true;
        const std::size_t node = tree.size();
        tree.push_back({node_of_root[ra], node_of_root[rb], kNone, level});
        tree[node_of_root[ra]].parent = node;
        tree[node_of_root[rb]].parent = node;
        const std::size_t root = sets.unite(ra, rb);
        mode_count[root] = mode_count[ra] + mode_count[rb];
        node_of_root[root] = node;
      }
    }

    if (modes_met) {
      for (std::size_t g = 0; g < G; ++g) {
        if (frozen[g]) continue;
        const std::size_t cell = modes.modes[g].cell;
        if (!active[cell] || mode_count[sets.find(cell)] < 2) continue;
        // Component as it stood before this level joined it to another mode.
        std::size_t node = cell;
        while (tree[node].parent != kNone && tree[tree[node].parent].level < level) {
          node = tree[node].parent;
        }
        region_node[g] = node;
        frozen[g] = 1;
        ++frozen_count;
      }
    }
    begin = end;
    if (frozen_count == G) break;  // lower levels cannot change any region
  }

  for (std::size_t g = 0; g < G; ++g) {
    if (frozen[g]) continue;
    std::size_t node = modes.modes[g].cell;
    while (tree[node].parent != kNone) node = tree[node].parent;
    region_node[g] = node;
  }

  std::vector<std::size_t> stack;
  for (std::size_t g = 0; g < G; ++g) {
    Region& region = out.regions[g];
    region.mode = g;
    stack.assign(1, region_node[g]);
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node < N) {
        region.cells.push_back(node);
      } else {
        stack.push_back(tree[node].left);
        stack.push_back(tree[node].right);
      }
    }
    std::sort(region.cells.begin(), region.cells.end());
    region.threshold = v[region.cells.front()];
    for (std::size_t cell : region.cells) {
      region.threshold = std::min(region.threshold, v[cell]);
      out.cell_region[cell] = static_cast<int>(g);
    }
  }
  return out;
}

std::optional<std::vector<std::size_t>> locate_cell(const RegularGrid& grid, std::span<const double> x) {
  const auto linear = grid.locate(x);
  if (!linear) return std::nullopt;
  return grid.index_of(*linear);
}

}  // namespace smbp
