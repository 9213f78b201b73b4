#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pls/grid.hpp"
#include "pls/rng.hpp"

namespace pls {

// Row-major to match the on-disk operator layout byte for byte.
using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class NoiseKind { kGaussian, kUniformBounded };

// gaussian: scale is the standard deviation sigma.
// uniform_bounded: scale is the half-width a, entries uniform on [-a, a).
struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double scale = 0.0;

  // Sub-Gaussian parameter c_s feeding the penalty; both kinds map to their
  // scale parameter.
  double sub_gaussian_scale() const { return scale; }
};

// Dense K x N measurement operator. When has_mean_row is set, row 0 is the
// all-ones row of the augmented operator and the core block is rows 1..K;
// normalization, coherence, Gram sums, and proxies use the core block only.
struct MeasurementOperator {
  MatrixRM entries;
  bool has_mean_row = false;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index signal_length() const { return entries.cols(); }
  Eigen::Index core_rows() const {
    return entries.rows() - (has_mean_row ? 1 : 0);
  }
  auto core() const {
    return entries.bottomRows(core_rows());
  }
};

struct OperatorDiagnostics {
  double coherence = 0.0;
  double spectral_norm = 0.0;
  // High-probability coherence bound for Gaussian operators,
  // sqrt(15 ln N) / (sqrt(K) - sqrt(12 ln N)); +inf when the denominator is
  // not positive. Meaningful when 60 ln N <= K <= (N-1)/(4 ln N).
  double coherence_bound = 0.0;
  bool coherence_bound_applicable = false;
  // The two additive terms of the excess-risk bound:
  // (|A|_2^2 ln N / N)^(kappa/(2 kappa + d - 2)) and mu(A) * |f|_1.
  double bound_term_approx = 0.0;
  double bound_term_interference = 0.0;
};

// Entries drawn i.i.d. N(0, 1/K) from per-column substreams of the seed, then
// each column rescaled to unit l2 norm. A zero column (never observed in
// practice) is regenerated from later positions of its own substream.
MeasurementOperator gen_gaussian_operator(std::uint32_t K, std::uint32_t N,
                                          std::uint64_t seed);

MeasurementOperator identity_operator(std::uint32_t N);

// Prepends the all-ones row; the copied core block is left untouched.
MeasurementOperator augment_mean_row(const MeasurementOperator& A);

// Noiseless forward map: core rows give A f, the mean row (if present) gives
// sum(f) in slot 0.
Eigen::VectorXd forward(const MeasurementOperator& A,
                        const GridSignal& f);

// y = A f + n with one noise draw per operator row (mean row included when
// present), from the noise substream of the seed.
Eigen::VectorXd forward_noisy(const MeasurementOperator& A, const GridSignal& f,
                              const NoiseModel& noise, std::uint64_t seed);

// Noise vector of the given length from stream `stream` of the seed; entry i
// is a pure function of (seed, stream, i).
Eigen::VectorXd noise_vector(const NoiseModel& noise, Eigen::Index len,
                             std::uint64_t seed, std::uint32_t stream = 0);

// Worst-case coherence: max |<a_i, a_j>| over distinct core columns.
double coherence(const MeasurementOperator& A);

// Largest singular value via power iteration on A^T A (two products per
// step), deterministic start vector. Throws after max_iter steps without
// reaching the relative tolerance.
double spectral_norm(const MeasurementOperator& A, double tol = 1e-10,
                     int max_iter = 10000);

OperatorDiagnostics theory_bounds(const MeasurementOperator& A,
                                  const GridSignal& f, double kappa_assumed);

// The Gaussian-operator coherence bound alone (also exposed for tests).
double gaussian_coherence_bound(std::uint32_t K, std::uint32_t N);

}  // namespace pls
