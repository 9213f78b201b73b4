#include "pls/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace pls {

PenaltyParams default_penalty_params(std::uint64_t N, const NoiseModel& noise,
                                     double tau) {
  PenaltyParams p;
  p.delta = 1.0 / static_cast<double>(N);
  p.c = 0.5;
  p.cs = noise.sub_gaussian_scale();
  p.tau = tau;
  return p;
}

void validate_penalty_params(const PenaltyParams& p) {
  if (!(p.delta > 0.0 && p.delta <= 0.5))
    throw Error("penalty delta must lie in (0, 1/2]");
  if (!(p.c > 0.0)) throw Error("penalty constant c must be positive");
  if (!(p.cs >= 0.0)) throw Error("noise scale cs must be nonnegative");
  if (!(p.tau >= 0.0)) throw Error("penalty scale tau must be nonnegative");
}

int bits(int depth_j, int d) {
  if (depth_j < 0) throw Error("tree depth must be nonnegative");
  if (d != 1 && d != 2) throw Error("dimension must be 1 or 2");
  const int log2d = d == 2 ? 1 : 0;
  return depth_j * (log2d + 2) + 1;
}

RowSats build_row_sats(const MeasurementOperator& A, const GridShape& shape) {
  validate_shape(shape);
  if (A.signal_length() != static_cast<Eigen::Index>(shape.size()))
    throw Error("operator and grid lengths differ");
  const auto K = static_cast<std::size_t>(A.core_rows());
  const std::size_t s0 = shape.sides[0];
  const std::size_t s1 = shape.sides[1];
  const std::size_t w = s1 + 1;

  RowSats sats;
  sats.shape = shape;
  sats.K = K;
  sats.table.assign((s0 + 1) * w * K, 0.0);
  double* t = sats.table.data();
  const auto core = A.core();

  // Pass 1: scatter A into the table interior (position-major), tiled so both
  // the row-major operator reads and the K-contiguous writes stay cache-local.
  constexpr std::size_t kTile = 32;
  for (std::size_t r = 0; r < s0; ++r) {
    const std::size_t row_base = (r + 1) * w;
    for (std::size_t c0 = 0; c0 < s1; c0 += kTile) {
      const std::size_t c1 = std::min(c0 + kTile, s1);
      for (std::size_t k0 = 0; k0 < K; k0 += kTile) {
        const std::size_t k1 = std::min(k0 + kTile, K);
        for (std::size_t c = c0; c < c1; ++c) {
          double* dst = t + (row_base + c + 1) * K;
          const std::size_t i = r * s1 + c;
          for (std::size_t k = k0; k < k1; ++k)
            dst[k] = core(static_cast<Eigen::Index>(k),
                          static_cast<Eigen::Index>(i));
        }
      }
    }
  }

  // Pass 2: prefix along dimension 1 (each grid row), vectorized over k.
  for (std::size_t r = 1; r <= s0; ++r)
    for (std::size_t c = 1; c <= s1; ++c) {
      double* cur = t + (r * w + c) * K;
      const double* prev = t + (r * w + c - 1) * K;
      for (std::size_t k = 0; k < K; ++k) cur[k] += prev[k];
    }

  // Pass 3: prefix along dimension 0, whole position-rows at a time.
  for (std::size_t r = 2; r <= s0; ++r) {
    double* cur = t + r * w * K;
    const double* prev = t + (r - 1) * w * K;
    for (std::size_t k = 0; k < w * K; ++k) cur[k] += prev[k];
  }

  return sats;
}

namespace {

struct CellCorners {
  const double* a;  // (begin0, begin1)
  const double* b;  // (begin0, end1)
  const double* c;  // (end0, begin1)
  const double* d;  // (end0, end1)
};

CellCorners corners(const RowSats& sats, const DyadicCell& cell) {
  const CellExtent e = cell_extent(cell, sats.shape);
  const std::size_t w = sats.shape.sides[1] + 1;
  const double* t = sats.table.data();
  const std::size_t K = sats.K;
  return CellCorners{
      t + (e.begin[0] * w + e.begin[1]) * K,
      t + (e.begin[0] * w + e.end[1]) * K,
      t + (e.end[0] * w + e.begin[1]) * K,
      t + (e.end[0] * w + e.end[1]) * K,
  };
}

}  // namespace

double row_rect_sum(const RowSats& sats, std::size_t k,
                    const DyadicCell& cell) {
  if (k >= sats.K) throw Error("row index out of range");
  const CellCorners p = corners(sats, cell);
  return p.d[k] - p.b[k] - p.c[k] + p.a[k];
}

double gram_sum(const RowSats& sats, const DyadicCell& cell) {
  const CellCorners p = corners(sats, cell);
  double acc = 0.0;
  for (std::size_t k = 0; k < sats.K; ++k) {
    const double v = p.d[k] - p.b[k] - p.c[k] + p.a[k];
    acc += v * v;
  }
  return acc;
}

double leaf_penalty(double G_L, int depth_j, const PenaltyParams& params,
                    std::uint64_t N, int d) {
  validate_penalty_params(params);
  if (!(G_L >= 0.0)) throw Error("Gram sum must be nonnegative");
  const double log_term = std::log(2.0 / params.delta) +
                          static_cast<double>(bits(depth_j, d)) * std::log(2.0);
  return params.tau / static_cast<double>(N) *
         std::sqrt(log_term * params.cs * params.cs * G_L / (2.0 * params.c));
}

double partition_penalty(const PartitionEstimate& est, const RowSats& sats,
                         const PenaltyParams& params) {
  validate_partition(est);
  if (!(est.shape == sats.shape))
    throw Error("partition and SAT shapes differ");
  double pen = 0.0;
  for (const PartitionNode& n : est.nodes) {
    if (!n.is_leaf) continue;
    pen += leaf_penalty(gram_sum(sats, n.cell), n.cell.depth(), params,
                        est.shape.size(), est.shape.d);
  }
  return pen;
}

}  // namespace pls
