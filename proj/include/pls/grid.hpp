#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "pls/error.hpp"

namespace pls {

// Dyadic grid in one or two dimensions, row-major flattening. A 1-D grid is
// handled internally as sides = {n, 1} so most code paths are shared.
struct GridShape {
  int d = 1;
  std::array<std::uint32_t, 2> sides{1, 1};

  static GridShape line(std::uint32_t n);
  static GridShape plane(std::uint32_t s0, std::uint32_t s1);

  std::uint64_t size() const {
    return static_cast<std::uint64_t>(sides[0]) * sides[1];
  }
  // log2(side) per dimension; dimension 1 of a 1-D grid has 0 levels.
  int levels(int dim) const;
  int max_depth() const { return levels(0) + levels(1); }

  bool operator==(const GridShape&) const = default;
};

void validate_shape(const GridShape& shape);

struct GridSignal {
  GridShape shape;
  std::vector<double> values;
};

GridSignal make_signal(const GridShape& shape, double fill = 0.0);
void validate_signal(const GridSignal& f);

// Dyadic hyperrectangle: per-dimension (level, index) with index < 2^level.
// Cells of a 1-D grid keep level[1] = index[1] = 0.
struct DyadicCell {
  std::array<int, 2> level{0, 0};
  std::array<std::uint32_t, 2> index{0, 0};

  int depth() const { return level[0] + level[1]; }

  bool operator==(const DyadicCell&) const = default;
};

// Half-open pixel ranges [begin, end) of the cell along each dimension.
struct CellExtent {
  std::array<std::uint32_t, 2> begin{0, 0};
  std::array<std::uint32_t, 2> end{1, 1};

  std::uint64_t size() const {
    return static_cast<std::uint64_t>(end[0] - begin[0]) * (end[1] - begin[1]);
  }
};

DyadicCell root_cell();
void validate_cell(const DyadicCell& cell, const GridShape& shape);
CellExtent cell_extent(const DyadicCell& cell, const GridShape& shape);
DyadicCell child_cell(const DyadicCell& cell, int dim, int which);

// Flat row-major pixel indices covered by the cell, in row-major order.
std::vector<std::uint32_t> cell_pixels(const DyadicCell& cell,
                                       const GridShape& shape);

struct LevelSetMask {
  GridShape shape;
  std::vector<std::uint8_t> inside;
};

LevelSetMask make_mask(const GridShape& shape, bool fill = false);

// Recursive dyadic partition with binary leaf labels. nodes[0] is the root;
// children of a split are the two halves of the parent along split_dim.
struct PartitionNode {
  DyadicCell cell;
  bool is_leaf = true;
  bool label = false;  // leaves only: true = inside
  int split_dim = 0;   // splits only
  std::array<std::int32_t, 2> child{-1, -1};
};

struct PartitionEstimate {
  GridShape shape;
  std::vector<PartitionNode> nodes;
  // Penalized empirical risk attained by the tree; NaN for hand-built trees.
  double objective = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::int32_t> leaf_indices() const;
  std::size_t leaf_count() const { return leaf_indices().size(); }
};

// Structural check: root covers the grid, split children tile their parent,
// levels stay within the shape. Throws on violation.
void validate_partition(const PartitionEstimate& est);

LevelSetMask partition_to_mask(const PartitionEstimate& est);

// Single-leaf partition covering the whole grid.
PartitionEstimate single_leaf_partition(const GridShape& shape, bool label);

// One leaf per pixel, labeled by the mask (round-trip helper and test tool).
PartitionEstimate pixel_partition(const LevelSetMask& mask);

// Inclusive prefix-sum table over a signal, (s0+1) x (s1+1) with a zero
// border. cell_sum answers any dyadic-rectangle sum in O(1).
struct SignalSums {
  GridShape shape;
  std::vector<double> table;
};

SignalSums build_signal_sums(const GridSignal& f);
double cell_sum(const SignalSums& sums, const DyadicCell& cell);

}  // namespace pls
