#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "pls/grid.hpp"
#include "pls/penalty.hpp"

namespace pls {

// free_orientation: any sequence of axis-aligned halvings (per-dimension
// levels independent). square_only: quadrisection for d = 2 (each quad split
// advances the penalty depth by d); identical to free_orientation for d = 1.
enum class TreeFamily { kFreeOrientation, kSquareOnly };

struct FitConfig {
  double gamma = 0.0;
  PenaltyParams penalty;
  // Per-dimension split-depth cap (the estimator's resolution limit M);
  // -1 means full depth down to single pixels.
  std::array<int, 2> max_level{-1, -1};
  TreeFamily family = TreeFamily::kFreeOrientation;
};

// Per-cell DP record, exposed for diagnostics.
struct CellScore {
  DyadicCell cell;
  double sum_gap = 0.0;    // sum over the cell of (gamma - z_i)
  bool best_label = false; // leaf label: inside iff sum_gap < 0
  double gram = 0.0;       // G_L
  double phi = 0.0;        // leaf penalty
  double leaf_cost = 0.0;  // -|sum_gap|/N + phi
  double best_cost = 0.0;
  // -1 leaf, 0 split dim 0, 1 split dim 1, 2 quad split.
  int best_action = -1;
};

struct FitStats {
  std::uint64_t cells_visited = 0;
  std::uint64_t gram_queries = 0;
};

// Leaf vote on raw z values: label inside iff sum_gap < 0 (ties vote
// outside); empirical risk of the voted leaf is -|sum_gap| / N.
std::pair<bool, double> leaf_vote(const GridSignal& z, const DyadicCell& cell,
                                  double gamma);

// Exact minimizer of empirical risk + penalty over the configured tree
// family, by bottom-up dynamic programming over all dyadic cells. Ties prefer
// a leaf over a split, then the lowest split dimension. The returned
// estimate's objective is the DP root cost.
PartitionEstimate fit(const GridSignal& z, const FitConfig& cfg,
                      const RowSats& sats, FitStats* stats = nullptr);

// Direct recursive evaluation of the same objective without the DP table.
// Restricted to N <= 64.
PartitionEstimate brute_force_fit(const GridSignal& z, const FitConfig& cfg,
                                  const RowSats& sats);

struct TauSearchResult {
  double tau_star = 0.0;
  PartitionEstimate estimate;
  double epsilon = 0.0;  // excess risk of the estimate against f_true
};

// Fits at every tau in the grid and keeps the tau with the smallest excess
// risk against the ground truth; ties go to the smaller tau. Gram sums and
// z prefix sums are shared across the grid.
TauSearchResult oracle_tau_search(const GridSignal& z, const FitConfig& cfg,
                                  const RowSats& sats, const GridSignal& f_true,
                                  double gamma_true,
                                  const std::vector<double>& tau_grid);

// DP table contents for diagnostics (cell, G_L, phi, costs), in DP order.
std::vector<CellScore> cell_scores(const GridSignal& z, const FitConfig& cfg,
                                   const RowSats& sats);

}  // namespace pls
