#include "pls/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "pls/baselines.hpp"

namespace pls {

namespace {

// Interval id within one dimension: levels stacked breadth-first.
inline std::size_t dim_id(int level, std::uint32_t index) {
  return (std::size_t{1} << level) - 1 + index;
}

struct DpContext {
  GridShape shape;
  const RowSats* sats = nullptr;
  SignalSums zsums;
  double gamma = 0.0;
  TreeFamily family = TreeFamily::kFreeOrientation;
  std::array<int, 2> L{0, 0};         // effective max level per dimension
  std::array<std::size_t, 2> nid{1, 1};  // interval ids per dimension
  std::vector<double> gram;
  bool gram_ready = false;
  std::vector<double> cost;
  std::vector<std::uint8_t> action;  // 0 leaf, 1 split dim0, 2 split dim1, 3 quad
  FitStats stats;

  std::size_t cell_id(int l0, std::uint32_t i0, int l1,
                      std::uint32_t i1) const {
    return dim_id(l0, i0) * nid[1] + dim_id(l1, i1);
  }
  DyadicCell cell_at(int l0, std::uint32_t i0, int l1,
                     std::uint32_t i1) const {
    DyadicCell c;
    c.level = {l0, l1};
    c.index = {i0, i1};
    return c;
  }
  double n() const { return static_cast<double>(shape.size()); }

  double sum_gap(const DyadicCell& cell) const {
    const CellExtent e = cell_extent(cell, shape);
    return gamma * static_cast<double>(e.size()) - cell_sum(zsums, cell);
  }
};

DpContext make_context(const GridSignal& z, const FitConfig& cfg,
                       const RowSats& sats) {
  validate_signal(z);
  validate_penalty_params(cfg.penalty);
  if (!(z.shape == sats.shape)) throw Error("proxy and SAT shapes differ");
  DpContext ctx;
  ctx.shape = z.shape;
  ctx.sats = &sats;
  ctx.zsums = build_signal_sums(z);
  ctx.gamma = cfg.gamma;
  ctx.family = z.shape.d == 1 ? TreeFamily::kFreeOrientation : cfg.family;
  for (int t = 0; t < 2; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const int full = ctx.shape.levels(t);
    int cap = cfg.max_level[ts];
    if (cap < -1 || cap > full) throw Error("max_level exceeds grid depth");
    ctx.L[ts] = cap < 0 ? full : cap;
  }
  if (ctx.family == TreeFamily::kSquareOnly) {
    const int l = std::min(ctx.L[0], ctx.L[1]);
    ctx.L = {l, l};
  }
  ctx.nid = {(std::size_t{1} << (ctx.L[0] + 1)) - 1,
             (std::size_t{1} << (ctx.L[1] + 1)) - 1};
  const std::size_t cells = ctx.nid[0] * ctx.nid[1];
  ctx.gram.assign(cells, 0.0);
  ctx.cost.assign(cells, 0.0);
  ctx.action.assign(cells, 0);
  return ctx;
}

double leaf_cost_of(DpContext& ctx, const DyadicCell& cell, std::size_t id,
                    const PenaltyParams& params) {
  if (!ctx.gram_ready) {
    ctx.gram[id] = gram_sum(*ctx.sats, cell);
    ++ctx.stats.gram_queries;
  }
  const double sg = ctx.sum_gap(cell);
  const double risk = -std::abs(sg) / ctx.n();
  return risk + leaf_penalty(ctx.gram[id], cell.depth(), params,
                             ctx.shape.size(), ctx.shape.d);
}

void dp_run(DpContext& ctx, const PenaltyParams& params) {
  ctx.stats = FitStats{};
  if (ctx.family == TreeFamily::kFreeOrientation) {
    for (int l0 = ctx.L[0]; l0 >= 0; --l0) {
      for (int l1 = ctx.L[1]; l1 >= 0; --l1) {
        const std::uint32_t n0 = 1u << l0;
        const std::uint32_t n1 = 1u << l1;
        for (std::uint32_t i0 = 0; i0 < n0; ++i0) {
          for (std::uint32_t i1 = 0; i1 < n1; ++i1) {
            const std::size_t id = ctx.cell_id(l0, i0, l1, i1);
            const DyadicCell cell = ctx.cell_at(l0, i0, l1, i1);
            ++ctx.stats.cells_visited;
            double best = leaf_cost_of(ctx, cell, id, params);
            std::uint8_t act = 0;
            if (l0 < ctx.L[0]) {
              const double s =
                  ctx.cost[ctx.cell_id(l0 + 1, 2 * i0, l1, i1)] +
                  ctx.cost[ctx.cell_id(l0 + 1, 2 * i0 + 1, l1, i1)];
              if (s < best) {
                best = s;
                act = 1;
              }
            }
            if (l1 < ctx.L[1]) {
              const double s =
                  ctx.cost[ctx.cell_id(l0, i0, l1 + 1, 2 * i1)] +
                  ctx.cost[ctx.cell_id(l0, i0, l1 + 1, 2 * i1 + 1)];
              if (s < best) {
                best = s;
                act = 2;
              }
            }
            ctx.cost[id] = best;
            ctx.action[id] = act;
          }
        }
      }
    }
  } else {
    for (int l = ctx.L[0]; l >= 0; --l) {
      const std::uint32_t n = 1u << l;
      for (std::uint32_t i0 = 0; i0 < n; ++i0) {
        for (std::uint32_t i1 = 0; i1 < n; ++i1) {
          const std::size_t id = ctx.cell_id(l, i0, l, i1);
          const DyadicCell cell = ctx.cell_at(l, i0, l, i1);
          ++ctx.stats.cells_visited;
          double best = leaf_cost_of(ctx, cell, id, params);
          std::uint8_t act = 0;
          if (l < ctx.L[0]) {
            const double s =
                (ctx.cost[ctx.cell_id(l + 1, 2 * i0, l + 1, 2 * i1)] +
                 ctx.cost[ctx.cell_id(l + 1, 2 * i0, l + 1, 2 * i1 + 1)]) +
                (ctx.cost[ctx.cell_id(l + 1, 2 * i0 + 1, l + 1, 2 * i1)] +
                 ctx.cost[ctx.cell_id(l + 1, 2 * i0 + 1, l + 1, 2 * i1 + 1)]);
            if (s < best) {
              best = s;
              act = 3;
            }
          }
          ctx.cost[id] = best;
          ctx.action[id] = act;
        }
      }
    }
  }
  ctx.gram_ready = true;
}

std::int32_t extract(const DpContext& ctx, const DyadicCell& cell,
                     PartitionEstimate& est) {
  const auto self = static_cast<std::int32_t>(est.nodes.size());
  est.nodes.emplace_back();
  est.nodes.back().cell = cell;
  const std::size_t id =
      ctx.cell_id(cell.level[0], cell.index[0], cell.level[1], cell.index[1]);
  const std::uint8_t act = ctx.action[id];
  if (act == 0) {
    PartitionNode& n = est.nodes[static_cast<std::size_t>(self)];
    n.is_leaf = true;
    n.label = ctx.sum_gap(cell) < 0.0;
    return self;
  }
  if (act == 3) {
    // Quadrisection, written as a dim-0 split whose children split along
    // dim 1; only the four grandchildren are leaves.
    std::array<std::int32_t, 2> mids{};
    for (int w0 = 0; w0 < 2; ++w0) {
      const DyadicCell half = child_cell(cell, 0, w0);
      const auto mid = static_cast<std::int32_t>(est.nodes.size());
      est.nodes.emplace_back();
      est.nodes.back().cell = half;
      std::array<std::int32_t, 2> kids{};
      for (int w1 = 0; w1 < 2; ++w1)
        kids[static_cast<std::size_t>(w1)] =
            extract(ctx, child_cell(half, 1, w1), est);
      PartitionNode& m = est.nodes[static_cast<std::size_t>(mid)];
      m.is_leaf = false;
      m.split_dim = 1;
      m.child = kids;
      mids[static_cast<std::size_t>(w0)] = mid;
    }
    PartitionNode& n = est.nodes[static_cast<std::size_t>(self)];
    n.is_leaf = false;
    n.split_dim = 0;
    n.child = mids;
    return self;
  }
  const int dim = act == 1 ? 0 : 1;
  std::array<std::int32_t, 2> kids{};
  for (int w = 0; w < 2; ++w)
    kids[static_cast<std::size_t>(w)] = extract(ctx, child_cell(cell, dim, w), est);
  PartitionNode& n = est.nodes[static_cast<std::size_t>(self)];
  n.is_leaf = false;
  n.split_dim = dim;
  n.child = kids;
  return self;
}

PartitionEstimate extract_tree(const DpContext& ctx) {
  PartitionEstimate est;
  est.shape = ctx.shape;
  extract(ctx, root_cell(), est);
  est.objective = ctx.cost[ctx.cell_id(0, 0, 0, 0)];
  return est;
}

}  // namespace

std::pair<bool, double> leaf_vote(const GridSignal& z, const DyadicCell& cell,
                                  double gamma) {
  validate_signal(z);
  double sg = 0.0;
  for (const std::uint32_t i : cell_pixels(cell, z.shape))
    sg += gamma - z.values[i];
  const bool inside = sg < 0.0;
  return {inside, -std::abs(sg) / static_cast<double>(z.shape.size())};
}

PartitionEstimate fit(const GridSignal& z, const FitConfig& cfg,
                      const RowSats& sats, FitStats* stats) {
  DpContext ctx = make_context(z, cfg, sats);
  dp_run(ctx, cfg.penalty);
  if (stats) *stats = ctx.stats;
  return extract_tree(ctx);
}

namespace {

// Memo-free recursive evaluation of the DP recurrence; the chosen action per
// cell is recorded so the shared extraction path can rebuild the tree.
double brute_cost(DpContext& ctx, const PenaltyParams& params,
                  const DyadicCell& cell) {
  const std::size_t id =
      ctx.cell_id(cell.level[0], cell.index[0], cell.level[1], cell.index[1]);
  ++ctx.stats.cells_visited;
  double best = leaf_cost_of(ctx, cell, id, params);
  std::uint8_t act = 0;
  if (ctx.family == TreeFamily::kFreeOrientation) {
    for (int dim = 0; dim < 2; ++dim) {
      const auto ds = static_cast<std::size_t>(dim);
      if (cell.level[ds] >= ctx.L[ds]) continue;
      const double s = brute_cost(ctx, params, child_cell(cell, dim, 0)) +
                       brute_cost(ctx, params, child_cell(cell, dim, 1));
      if (s < best) {
        best = s;
        act = static_cast<std::uint8_t>(dim + 1);
      }
    }
  } else {
    if (cell.level[0] < ctx.L[0]) {
      const DyadicCell h0 = child_cell(cell, 0, 0);
      const DyadicCell h1 = child_cell(cell, 0, 1);
      const double s =
          (brute_cost(ctx, params, child_cell(h0, 1, 0)) +
           brute_cost(ctx, params, child_cell(h0, 1, 1))) +
          (brute_cost(ctx, params, child_cell(h1, 1, 0)) +
           brute_cost(ctx, params, child_cell(h1, 1, 1)));
      if (s < best) {
        best = s;
        act = 3;
      }
    }
  }
  ctx.cost[id] = best;
  ctx.action[id] = act;
  return best;
}

}  // namespace

PartitionEstimate brute_force_fit(const GridSignal& z, const FitConfig& cfg,
                                  const RowSats& sats) {
  if (z.shape.size() > 64)
    throw Error("brute_force_fit supports at most 64 pixels");
  DpContext ctx = make_context(z, cfg, sats);
  brute_cost(ctx, cfg.penalty, root_cell());
  ctx.gram_ready = true;
  return extract_tree(ctx);
}

TauSearchResult oracle_tau_search(const GridSignal& z, const FitConfig& cfg,
                                  const RowSats& sats, const GridSignal& f_true,
                                  double gamma_true,
                                  const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw Error("tau grid is empty");
  std::vector<double> grid = tau_grid;
  std::sort(grid.begin(), grid.end());
  DpContext ctx = make_context(z, cfg, sats);
  TauSearchResult best;
  bool have = false;
  for (const double tau : grid) {
    PenaltyParams params = cfg.penalty;
    params.tau = tau;
    validate_penalty_params(params);
    dp_run(ctx, params);
    PartitionEstimate est = extract_tree(ctx);
    const double eps =
        excess_risk(partition_to_mask(est), f_true, gamma_true);
    if (!have || eps < best.epsilon) {
      have = true;
      best.tau_star = tau;
      best.estimate = std::move(est);
      best.epsilon = eps;
    }
  }
  return best;
}

std::vector<CellScore> cell_scores(const GridSignal& z, const FitConfig& cfg,
                                   const RowSats& sats) {
  DpContext ctx = make_context(z, cfg, sats);
  dp_run(ctx, cfg.penalty);
  std::vector<CellScore> out;
  out.reserve(ctx.cost.size());
  const auto emit = [&](int l0, std::uint32_t i0, int l1, std::uint32_t i1) {
    const std::size_t id = ctx.cell_id(l0, i0, l1, i1);
    const DyadicCell cell = ctx.cell_at(l0, i0, l1, i1);
    CellScore s;
    s.cell = cell;
    s.sum_gap = ctx.sum_gap(cell);
    s.best_label = s.sum_gap < 0.0;
    s.gram = ctx.gram[id];
    s.phi = leaf_penalty(s.gram, cell.depth(), cfg.penalty, ctx.shape.size(),
                         ctx.shape.d);
    s.leaf_cost = -std::abs(s.sum_gap) / ctx.n() + s.phi;
    s.best_cost = ctx.cost[id];
    s.best_action = ctx.action[id] == 0 ? -1 : (ctx.action[id] == 3 ? 2 : ctx.action[id] - 1);
    out.push_back(s);
  };
  if (ctx.family == TreeFamily::kFreeOrientation) {
    for (int l0 = ctx.L[0]; l0 >= 0; --l0)
      for (int l1 = ctx.L[1]; l1 >= 0; --l1)
        for (std::uint32_t i0 = 0; i0 < (1u << l0); ++i0)
          for (std::uint32_t i1 = 0; i1 < (1u << l1); ++i1)
            emit(l0, i0, l1, i1);
  } else {
    for (int l = ctx.L[0]; l >= 0; --l)
      for (std::uint32_t i0 = 0; i0 < (1u << l); ++i0)
        for (std::uint32_t i1 = 0; i1 < (1u << l); ++i1)
          emit(l, i0, l, i1);
  }
  return out;
}

}  // namespace pls
