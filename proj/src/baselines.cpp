#include "pls/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace pls {

namespace {

void check_shapes(const LevelSetMask& mask, const GridSignal& f) {
  validate_signal(f);
  if (!(mask.shape == f.shape) || mask.inside.size() != f.values.size())
    throw Error("mask and signal shapes differ");
}

GridSignal signal_from_vector(const Eigen::VectorXd& v,
                              const GridShape& shape) {
  if (v.size() != static_cast<Eigen::Index>(shape.size()))
    throw Error("vector length does not match grid size");
  GridSignal s = make_signal(shape);
  std::copy(v.data(), v.data() + v.size(), s.values.begin());
  return s;
}

}  // namespace

LevelSetMask truth_mask(const GridSignal& f, double gamma) {
  validate_signal(f);
  LevelSetMask m = make_mask(f.shape);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    m.inside[i] = f.values[i] > gamma ? 1 : 0;
  return m;
}

double excess_risk(const LevelSetMask& mask, const GridSignal& f_true,
                   double gamma) {
  check_shapes(mask, f_true);
  // Extended precision keeps the risk identity tight at large N.
  long double acc = 0.0L;
  for (std::size_t i = 0; i < f_true.values.size(); ++i) {
    const bool truth = f_true.values[i] > gamma;
    if (truth != (mask.inside[i] != 0))
      acc += std::abs(static_cast<long double>(gamma) - f_true.values[i]);
  }
  return static_cast<double>(acc / static_cast<long double>(f_true.values.size()));
}

double risk(const LevelSetMask& mask, const GridSignal& f_true, double gamma) {
  check_shapes(mask, f_true);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < f_true.values.size(); ++i) {
    const long double gap =
        static_cast<long double>(gamma) - f_true.values[i];
    acc += mask.inside[i] ? gap : -gap;
  }
  return static_cast<double>(acc / static_cast<long double>(f_true.values.size()));
}

LevelSetMask threshold_estimate(const GridSignal& z, double gamma) {
  validate_signal(z);
  LevelSetMask m = make_mask(z.shape);
  for (std::size_t i = 0; i < z.values.size(); ++i)
    m.inside[i] = z.values[i] >= gamma ? 1 : 0;
  return m;
}

TunedEstimate risk_optimal_threshold(const GridSignal& z,
                                     const GridSignal& f_true, double gamma) {
  validate_signal(z);
  validate_signal(f_true);
  if (!(z.shape == f_true.shape)) throw Error("proxy and truth shapes differ");
  const std::size_t n = z.values.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return z.values[a] < z.values[b];
  });

  // Cut p excludes the p smallest z values. Walking p upward, the error
  // gains the excluded true-inside weights and sheds included true-outside
  // weights.
  long double eps_total_out = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    if (!(f_true.values[i] > gamma))
      eps_total_out += std::abs(static_cast<long double>(gamma) -
                                f_true.values[i]);

  double best_gamma = -std::numeric_limits<double>::infinity();
  long double best_eps = eps_total_out;  // p = 0: everything included
  long double in_excl = 0.0L, out_excl = 0.0L;
  for (std::size_t p = 1; p <= n; ++p) {
    const std::uint32_t i = order[p - 1];
    const long double w =
        std::abs(static_cast<long double>(gamma) - f_true.values[i]);
    if (f_true.values[i] > gamma)
      in_excl += w;
    else
      out_excl += w;
    // A threshold exists strictly between sorted positions p-1 and p only if
    // the z values differ; p = n corresponds to +inf (empty mask).
    double cut;
    if (p == n) {
      cut = std::numeric_limits<double>::infinity();
    } else {
      const double lo = z.values[order[p - 1]];
      const double hi = z.values[order[p]];
      if (lo == hi) continue;
      cut = lo + (hi - lo) / 2.0;
    }
    const long double eps = in_excl + (eps_total_out - out_excl);
    if (eps < best_eps) {
      best_eps = eps;
      best_gamma = cut;
    }
  }

  TunedEstimate out;
  out.tuning = best_gamma;
  out.mask = threshold_estimate(z, best_gamma);
  out.epsilon = excess_risk(out.mask, f_true, gamma);
  return out;
}

namespace {

void haar_rows_forward(std::vector<double>& a, std::uint32_t rows,
                       std::uint32_t cols, std::uint32_t stride) {
  const double r2 = std::numbers::sqrt2_v<double>;
  std::vector<double> tmp(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    double* row = a.data() + static_cast<std::size_t>(r) * stride;
    const std::uint32_t half = cols / 2;
    for (std::uint32_t c = 0; c < half; ++c) {
      tmp[c] = (row[2 * c] + row[2 * c + 1]) / r2;
      tmp[half + c] = (row[2 * c] - row[2 * c + 1]) / r2;
    }
    std::copy(tmp.begin(), tmp.begin() + cols, row);
  }
}

void haar_rows_inverse(std::vector<double>& a, std::uint32_t rows,
                       std::uint32_t cols, std::uint32_t stride) {
  const double r2 = std::numbers::sqrt2_v<double>;
  std::vector<double> tmp(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    double* row = a.data() + static_cast<std::size_t>(r) * stride;
    const std::uint32_t half = cols / 2;
    for (std::uint32_t c = 0; c < half; ++c) {
      tmp[2 * c] = (row[c] + row[half + c]) / r2;
      tmp[2 * c + 1] = (row[c] - row[half + c]) / r2;
    }
    std::copy(tmp.begin(), tmp.begin() + cols, row);
  }
}

void haar_cols_forward(std::vector<double>& a, std::uint32_t rows,
                       std::uint32_t cols, std::uint32_t stride) {
  const double r2 = std::numbers::sqrt2_v<double>;
  const std::uint32_t half = rows / 2;
  std::vector<double> tmp(rows);
  for (std::uint32_t c = 0; c < cols; ++c) {
    for (std::uint32_t r = 0; r < half; ++r) {
      const double x = a[static_cast<std::size_t>(2 * r) * stride + c];
      const double y = a[static_cast<std::size_t>(2 * r + 1) * stride + c];
      tmp[r] = (x + y) / r2;
      tmp[half + r] = (x - y) / r2;
    }
    for (std::uint32_t r = 0; r < rows; ++r)
      a[static_cast<std::size_t>(r) * stride + c] = tmp[r];
  }
}

void haar_cols_inverse(std::vector<double>& a, std::uint32_t rows,
                       std::uint32_t cols, std::uint32_t stride) {
  const double r2 = std::numbers::sqrt2_v<double>;
  const std::uint32_t half = rows / 2;
  std::vector<double> tmp(rows);
  for (std::uint32_t c = 0; c < cols; ++c) {
    for (std::uint32_t r = 0; r < half; ++r) {
      const double s = a[static_cast<std::size_t>(r) * stride + c];
      const double d = a[static_cast<std::size_t>(half + r) * stride + c];
      tmp[2 * r] = (s + d) / r2;
      tmp[2 * r + 1] = (s - d) / r2;
    }
    for (std::uint32_t r = 0; r < rows; ++r)
      a[static_cast<std::size_t>(r) * stride + c] = tmp[r];
  }
}

int haar_levels(const GridShape& shape) {
  return shape.d == 1 ? shape.levels(0)
                      : std::min(shape.levels(0), shape.levels(1));
}

}  // namespace

std::vector<double> haar_analysis(const GridSignal& x) {
  validate_signal(x);
  std::vector<double> a = x.values;
  const std::uint32_t s0 = x.shape.sides[0];
  const std::uint32_t s1 = x.shape.sides[1];
  const int J = haar_levels(x.shape);
  for (int lev = 0; lev < J; ++lev) {
    // A dimension stops shrinking once fully transformed (1-D grids keep a
    // single column throughout).
    const std::uint32_t r = s0 >> std::min(lev, x.shape.levels(0));
    const std::uint32_t c = s1 >> std::min(lev, x.shape.levels(1));
    if (c > 1) haar_rows_forward(a, r, c, s1);
    if (r > 1) haar_cols_forward(a, r, c, s1);
  }
  return a;
}

GridSignal haar_synthesis(const std::vector<double>& coeffs,
                          const GridShape& shape) {
  validate_shape(shape);
  if (coeffs.size() != shape.size())
    throw Error("coefficient length does not match grid size");
  GridSignal x{shape, coeffs};
  const std::uint32_t s0 = shape.sides[0];
  const std::uint32_t s1 = shape.sides[1];
  const int J = haar_levels(shape);
  for (int lev = J - 1; lev >= 0; --lev) {
    const std::uint32_t r = s0 >> std::min(lev, shape.levels(0));
    const std::uint32_t c = s1 >> std::min(lev, shape.levels(1));
    if (r > 1) haar_cols_inverse(x.values, r, c, s1);
    if (c > 1) haar_rows_inverse(x.values, r, c, s1);
  }
  return x;
}

namespace {

// The approximation block that soft thresholding must leave untouched is the
// top-left corner remaining after the per-dimension transform levels.
bool is_detail_index(const GridShape& shape, std::size_t flat) {
  const int J = haar_levels(shape);
  const std::uint32_t ar = shape.sides[0] >> std::min(J, shape.levels(0));
  const std::uint32_t ac = shape.sides[1] >> std::min(J, shape.levels(1));
  const std::uint32_t r =
      static_cast<std::uint32_t>(flat / shape.sides[1]);
  const std::uint32_t c =
      static_cast<std::uint32_t>(flat % shape.sides[1]);
  return r >= ar || c >= ac;
}

GridSignal circular_shift(const GridSignal& x, std::uint32_t sr,
                          std::uint32_t sc) {
  GridSignal out = make_signal(x.shape);
  const std::uint32_t s0 = x.shape.sides[0];
  const std::uint32_t s1 = x.shape.sides[1];
  for (std::uint32_t r = 0; r < s0; ++r)
    for (std::uint32_t c = 0; c < s1; ++c)
      out.values[static_cast<std::size_t>((r + sr) % s0) * s1 +
                 (c + sc) % s1] =
          x.values[static_cast<std::size_t>(r) * s1 + c];
  return out;
}

}  // namespace

GridSignal haar_denoise(const GridSignal& z, double thr, int cycle_spins) {
  validate_signal(z);
  if (thr < 0.0) throw Error("soft threshold must be nonnegative");
  if (cycle_spins < 1 ||
      static_cast<std::uint64_t>(cycle_spins) > z.shape.size())
    throw Error("cycle_spins must lie in [1, N]");
  GridSignal acc = make_signal(z.shape);
  const std::uint32_t s1 = z.shape.sides[1];
  for (int t = 0; t < cycle_spins; ++t) {
    const auto sr = static_cast<std::uint32_t>(t) / s1;
    const auto sc = static_cast<std::uint32_t>(t) % s1;
    const GridSignal shifted = circular_shift(z, sr, sc);
    std::vector<double> coeffs = haar_analysis(shifted);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (!is_detail_index(z.shape, i)) continue;
      const double v = coeffs[i];
      coeffs[i] = std::copysign(std::max(std::abs(v) - thr, 0.0), v);
    }
    const GridSignal rec = haar_synthesis(coeffs, z.shape);
    const GridSignal back =
        circular_shift(rec, z.shape.sides[0] - sr, s1 - sc);
    for (std::size_t i = 0; i < acc.values.size(); ++i)
      acc.values[i] += back.values[i];
  }
  for (double& v : acc.values) v /= cycle_spins;
  return acc;
}

LevelSetMask haar_plugin(const GridSignal& z, double gamma, double thr,
                         int cycle_spins) {
  return threshold_estimate(haar_denoise(z, thr, cycle_spins), gamma);
}

TunedEstimate haar_oracle_search(const GridSignal& z, double gamma_est,
                                 const GridSignal& f_true, double gamma_true,
                                 const std::vector<double>& thr_grid,
                                 int cycle_spins) {
  if (thr_grid.empty()) throw Error("threshold grid is empty");
  std::vector<double> grid = thr_grid;
  std::sort(grid.begin(), grid.end());
  TunedEstimate best;
  bool have = false;
  for (const double thr : grid) {
    LevelSetMask mask = haar_plugin(z, gamma_est, thr, cycle_spins);
    const double eps = excess_risk(mask, f_true, gamma_true);
    if (!have || eps < best.epsilon) {
      have = true;
      best.tuning = thr;
      best.mask = std::move(mask);
      best.epsilon = eps;
    }
  }
  return best;
}

Eigen::VectorXd tsvd_reconstruct(const MeasurementOperator& A,
                                 const Eigen::VectorXd& y, int rank) {
  const auto core = A.core();
  if (y.size() != core.rows())
    throw Error("observation length does not match operator rows");
  if (rank < 1 || rank > std::min(core.rows(), core.cols()))
    throw Error("rank out of range");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw Error("SVD factorization failed");
  const auto& s = svd.singularValues();
  if (s(rank - 1) <= s(0) * 1e-14)
    throw Error("rank " + std::to_string(rank) +
                " exceeds numerical rank; sigma_r/sigma_1 = " +
                std::to_string(s(rank - 1) / s(0)));
  Eigen::VectorXd uty = svd.matrixU().leftCols(rank).transpose() * y;
  uty.array() /= s.head(rank).array();
  return svd.matrixV().leftCols(rank) * uty;
}

LevelSetMask tsvd_plugin(const MeasurementOperator& A, const Eigen::VectorXd& y,
                         int rank, const GridShape& shape, double gamma) {
  return threshold_estimate(
      signal_from_vector(tsvd_reconstruct(A, y, rank), shape), gamma);
}

TunedEstimate tsvd_oracle_search(const MeasurementOperator& A,
                                 const Eigen::VectorXd& y, double gamma_est,
                                 const GridSignal& f_true, double gamma_true,
                                 const std::vector<int>& rank_grid) {
  if (rank_grid.empty()) throw Error("rank grid is empty");
  std::vector<int> grid = rank_grid;
  std::sort(grid.begin(), grid.end());
  TunedEstimate best;
  bool have = false;
  for (const int r : grid) {
    LevelSetMask mask = tsvd_plugin(A, y, r, f_true.shape, gamma_est);
    const double eps = excess_risk(mask, f_true, gamma_true);
    if (!have || eps < best.epsilon) {
      have = true;
      best.tuning = r;
      best.mask = std::move(mask);
      best.epsilon = eps;
    }
  }
  return best;
}

TikhonovResult tikhonov_reconstruct(const MeasurementOperator& A,
                                    const Eigen::VectorXd& y, double alpha) {
  const auto core = A.core();
  if (y.size() != core.rows())
    throw Error("observation length does not match operator rows");
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  Eigen::MatrixXd gram = core * core.transpose();
  gram.diagonal().array() += alpha;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw Error("Cholesky factorization failed for alpha = " +
                std::to_string(alpha));
  TikhonovResult r;
  r.dual = llt.solve(y);
  r.f_hat = core.transpose() * r.dual;
  return r;
}

LevelSetMask tikhonov_plugin(const MeasurementOperator& A,
                             const Eigen::VectorXd& y, double alpha,
                             const GridShape& shape, double gamma) {
  return threshold_estimate(
      signal_from_vector(tikhonov_reconstruct(A, y, alpha).f_hat, shape),
      gamma);
}

TunedEstimate tikhonov_oracle_search(const MeasurementOperator& A,
                                     const Eigen::VectorXd& y, double gamma_est,
                                     const GridSignal& f_true,
                                     double gamma_true,
                                     const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw Error("alpha grid is empty");
  std::vector<double> grid = alpha_grid;
  std::sort(grid.begin(), grid.end());
  TunedEstimate best;
  bool have = false;
  for (const double a : grid) {
    LevelSetMask mask = tikhonov_plugin(A, y, a, f_true.shape, gamma_est);
    const double eps = excess_risk(mask, f_true, gamma_true);
    if (!have || eps < best.epsilon) {
      have = true;
      best.tuning = a;
      best.mask = std::move(mask);
      best.epsilon = eps;
    }
  }
  return best;
}

}  // namespace pls
