#pragma once

#include <cstdint>
#include <vector>

#include "pls/grid.hpp"
#include "pls/operators.hpp"

namespace pls {

// Parameters of the per-leaf penalty
//   phi(L) = tau * (1/N) * sqrt((ln(2/delta) + bits(j, d) ln 2) * cs^2 * G_L / (2c)).
// Natural logarithms; bits stays a base-2 count scaled by ln 2.
struct PenaltyParams {
  double delta = 0.0;
  double c = 0.5;
  double cs = 1.0;
  double tau = 1.0;
};

// delta = 1/N, c = 1/2, cs from the noise model, tau = 1.
PenaltyParams default_penalty_params(std::uint64_t N, const NoiseModel& noise,
                                     double tau = 1.0);

void validate_penalty_params(const PenaltyParams& p);

// Prefix-code length for a leaf at tree depth j in d dimensions:
// j+1 depth bits, j branch bits, j log2(d) orientation bits.
int bits(int depth_j, int d);

// Rectangle sums of every core row of A in O(1) per (row set, cell) query.
// Storage is position-major: table[p*K + k] holds the inclusive prefix sum of
// row k up to grid position p, with a zero border row/column, so one cell
// query reads four contiguous K-vectors.
struct RowSats {
  GridShape shape;
  std::size_t K = 0;
  std::vector<double> table;
};

RowSats build_row_sats(const MeasurementOperator& A, const GridShape& shape);

// Rectangle sum of row k over the cell.
double row_rect_sum(const RowSats& sats, std::size_t k, const DyadicCell& cell);

// G_L = sum_k (rectangle sum of row k over the cell)^2
//     = squared norm of the summed cell columns of A.
double gram_sum(const RowSats& sats, const DyadicCell& cell);

double leaf_penalty(double G_L, int depth_j, const PenaltyParams& params,
                    std::uint64_t N, int d);

// Sum of leaf_penalty over the leaves of the partition.
double partition_penalty(const PartitionEstimate& est, const RowSats& sats,
                         const PenaltyParams& params);

}  // namespace pls
