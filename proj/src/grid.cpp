#include "pls/grid.hpp"

#include <bit>
#include <cassert>
#include <cmath>

namespace pls {

namespace {

bool is_pow2(std::uint32_t x) { return x != 0 && std::has_single_bit(x); }

}  // namespace

GridShape GridShape::line(std::uint32_t n) {
  GridShape s;
  s.d = 1;
  s.sides = {n, 1};
  validate_shape(s);
  return s;
}

GridShape GridShape::plane(std::uint32_t s0, std::uint32_t s1) {
  GridShape s;
  s.d = 2;
  s.sides = {s0, s1};
  validate_shape(s);
  return s;
}

int GridShape::levels(int dim) const {
  return std::bit_width(sides[static_cast<std::size_t>(dim)]) - 1;
}

void validate_shape(const GridShape& shape) {
  if (shape.d != 1 && shape.d != 2)
    throw Error("grid dimension must be 1 or 2");
  if (!is_pow2(shape.sides[0]) || !is_pow2(shape.sides[1]))
    throw Error("grid sides must be powers of two");
  if (shape.d == 1 && shape.sides[1] != 1)
    throw Error("1-D grid must have sides[1] == 1");
}

GridSignal make_signal(const GridShape& shape, double fill) {
  validate_shape(shape);
  return GridSignal{shape, std::vector<double>(shape.size(), fill)};
}

void validate_signal(const GridSignal& f) {
  validate_shape(f.shape);
  if (f.values.size() != f.shape.size())
    throw Error("signal length does not match grid size");
  for (double v : f.values)
    if (!std::isfinite(v)) throw Error("signal contains non-finite value");
}

DyadicCell root_cell() { return DyadicCell{}; }

void validate_cell(const DyadicCell& cell, const GridShape& shape) {
  validate_shape(shape);
  for (int t = 0; t < 2; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    if (cell.level[ts] < 0 || cell.level[ts] > shape.levels(t))
      throw Error("cell level exceeds grid depth");
    if (cell.index[ts] >= (1u << cell.level[ts]))
      throw Error("cell index out of range for its level");
  }
}

CellExtent cell_extent(const DyadicCell& cell, const GridShape& shape) {
  validate_cell(cell, shape);
  CellExtent e;
  for (int t = 0; t < 2; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const std::uint32_t ext = shape.sides[ts] >> cell.level[ts];
    e.begin[ts] = cell.index[ts] * ext;
    e.end[ts] = e.begin[ts] + ext;
  }
  return e;
}

DyadicCell child_cell(const DyadicCell& cell, int dim, int which) {
  assert(dim == 0 || dim == 1);
  assert(which == 0 || which == 1);
  DyadicCell c = cell;
  const auto ds = static_cast<std::size_t>(dim);
  c.level[ds] += 1;
  c.index[ds] = 2 * c.index[ds] + static_cast<std::uint32_t>(which);
  return c;
}

std::vector<std::uint32_t> cell_pixels(const DyadicCell& cell,
                                       const GridShape& shape) {
  const CellExtent e = cell_extent(cell, shape);
  std::vector<std::uint32_t> out;
  out.reserve(e.size());
  for (std::uint32_t r = e.begin[0]; r < e.end[0]; ++r)
    for (std::uint32_t c = e.begin[1]; c < e.end[1]; ++c)
      out.push_back(r * shape.sides[1] + c);
  return out;
}

LevelSetMask make_mask(const GridShape& shape, bool fill) {
  validate_shape(shape);
  return LevelSetMask{shape,
                      std::vector<std::uint8_t>(shape.size(), fill ? 1 : 0)};
}

std::vector<std::int32_t> PartitionEstimate::leaf_indices() const {
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf) out.push_back(static_cast<std::int32_t>(i));
  return out;
}

void validate_partition(const PartitionEstimate& est) {
  validate_shape(est.shape);
  if (est.nodes.empty()) throw Error("partition has no nodes");
  if (!(est.nodes[0].cell == root_cell()))
    throw Error("partition root must cover the whole grid");

  std::vector<std::uint8_t> referenced(est.nodes.size(), 0);
  referenced[0] = 1;
  for (std::size_t i = 0; i < est.nodes.size(); ++i) {
    const PartitionNode& n = est.nodes[i];
    validate_cell(n.cell, est.shape);
    if (n.is_leaf) continue;
    if (n.split_dim < 0 || n.split_dim >= est.shape.d)
      throw Error("split dimension out of range");
    const auto ds = static_cast<std::size_t>(n.split_dim);
    if (n.cell.level[ds] >= est.shape.levels(n.split_dim))
      throw Error("split below pixel resolution");
    for (int w = 0; w < 2; ++w) {
      const std::int32_t ci = n.child[static_cast<std::size_t>(w)];
      if (ci <= 0 || static_cast<std::size_t>(ci) >= est.nodes.size())
        throw Error("split child index out of range");
      if (referenced[static_cast<std::size_t>(ci)])
        throw Error("partition node referenced twice");
      referenced[static_cast<std::size_t>(ci)] = 1;
      if (!(est.nodes[static_cast<std::size_t>(ci)].cell ==
            child_cell(n.cell, n.split_dim, w)))
        throw Error("split children do not tile the parent");
    }
  }
  for (std::size_t i = 0; i < est.nodes.size(); ++i)
    if (!referenced[i]) throw Error("partition contains unreachable node");
}

LevelSetMask partition_to_mask(const PartitionEstimate& est) {
  validate_partition(est);
  LevelSetMask mask = make_mask(est.shape, false);
  std::uint64_t covered = 0;
  for (const PartitionNode& n : est.nodes) {
    if (!n.is_leaf) continue;
    const CellExtent e = cell_extent(n.cell, est.shape);
    covered += e.size();
    if (!n.label) continue;
    for (std::uint32_t r = e.begin[0]; r < e.end[0]; ++r)
      for (std::uint32_t c = e.begin[1]; c < e.end[1]; ++c)
        mask.inside[r * est.shape.sides[1] + c] = 1;
  }
  // Structural validation guarantees disjointness, so coverage is the only
  // remaining tiling condition.
  if (covered != est.shape.size())
    throw Error("partition leaves do not cover the grid");
  return mask;
}

PartitionEstimate single_leaf_partition(const GridShape& shape, bool label) {
  validate_shape(shape);
  PartitionEstimate est;
  est.shape = shape;
  PartitionNode n;
  n.is_leaf = true;
  n.label = label;
  est.nodes.push_back(n);
  return est;
}

namespace {

std::int32_t split_to_pixels(PartitionEstimate& est, const DyadicCell& cell,
                             const LevelSetMask& mask) {
  const std::int32_t self = static_cast<std::int32_t>(est.nodes.size());
  est.nodes.emplace_back();
  est.nodes[static_cast<std::size_t>(self)].cell = cell;
  int dim = -1;
  for (int t = 0; t < 2; ++t)
    if (cell.level[static_cast<std::size_t>(t)] < est.shape.levels(t)) {
      dim = t;
      break;
    }
  if (dim < 0) {
    const CellExtent e = cell_extent(cell, est.shape);
    PartitionNode& n = est.nodes[static_cast<std::size_t>(self)];
    n.is_leaf = true;
    n.label = mask.inside[e.begin[0] * est.shape.sides[1] + e.begin[1]] != 0;
    return self;
  }
  const std::int32_t c0 = split_to_pixels(est, child_cell(cell, dim, 0), mask);
  const std::int32_t c1 = split_to_pixels(est, child_cell(cell, dim, 1), mask);
  PartitionNode& n = est.nodes[static_cast<std::size_t>(self)];
  n.is_leaf = false;
  n.split_dim = dim;
  n.child = {c0, c1};
  return self;
}

}  // namespace

PartitionEstimate pixel_partition(const LevelSetMask& mask) {
  validate_shape(mask.shape);
  if (mask.inside.size() != mask.shape.size())
    throw Error("mask length does not match grid size");
  PartitionEstimate est;
  est.shape = mask.shape;
  split_to_pixels(est, root_cell(), mask);
  return est;
}

SignalSums build_signal_sums(const GridSignal& f) {
  validate_signal(f);
  const std::uint32_t s0 = f.shape.sides[0];
  const std::uint32_t s1 = f.shape.sides[1];
  SignalSums sums;
  sums.shape = f.shape;
  sums.table.assign(static_cast<std::size_t>(s0 + 1) * (s1 + 1), 0.0);
  const std::uint32_t w = s1 + 1;
  for (std::uint32_t r = 0; r < s0; ++r)
    for (std::uint32_t c = 0; c < s1; ++c)
      sums.table[(r + 1) * static_cast<std::size_t>(w) + (c + 1)] =
          f.values[r * static_cast<std::size_t>(s1) + c] +
          sums.table[r * static_cast<std::size_t>(w) + (c + 1)] +
          sums.table[(r + 1) * static_cast<std::size_t>(w) + c] -
          sums.table[r * static_cast<std::size_t>(w) + c];
  return sums;
}

double cell_sum(const SignalSums& sums, const DyadicCell& cell) {
  const CellExtent e = cell_extent(cell, sums.shape);
  const std::uint32_t w = sums.shape.sides[1] + 1;
  const auto at = [&](std::uint32_t r, std::uint32_t c) {
    return sums.table[r * static_cast<std::size_t>(w) + c];
  };
  return at(e.end[0], e.end[1]) - at(e.begin[0], e.end[1]) -
         at(e.end[0], e.begin[1]) + at(e.begin[0], e.begin[1]);
}

}  // namespace pls
