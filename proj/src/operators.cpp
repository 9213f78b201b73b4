#include "pls/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pls {

MeasurementOperator gen_gaussian_operator(std::uint32_t K, std::uint32_t N,
                                          std::uint64_t seed) {
  if (K < 1 || N < 1) throw Error("operator dimensions must be positive");
  MeasurementOperator A;
  A.entries.resize(K, N);
  A.has_mean_row = false;
  const double sd = 1.0 / std::sqrt(static_cast<double>(K));
  std::vector<double> col(K);
  for (std::uint32_t j = 0; j < N; ++j) {
    const RandomStream stream(seed, StreamPurpose::kOperator, j);
    std::uint64_t pos = 0;
    double norm2 = 0.0;
    do {
      // Retry (norm exactly zero) continues the same column substream.
      norm2 = 0.0;
      for (std::uint32_t k = 0; k < K; k += 2) {
        const auto g = stream.gaussian_pair(pos++);
        col[k] = sd * g[0];
        if (k + 1 < K) col[k + 1] = sd * g[1];
      }
      for (std::uint32_t k = 0; k < K; ++k) norm2 += col[k] * col[k];
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::uint32_t k = 0; k < K; ++k) A.entries(k, j) = col[k] * inv;
  }
  return A;
}

MeasurementOperator identity_operator(std::uint32_t N) {
  if (N < 1) throw Error("operator dimensions must be positive");
  MeasurementOperator A;
  A.entries = MatrixRM::Identity(N, N);
  A.has_mean_row = false;
  return A;
}

MeasurementOperator augment_mean_row(const MeasurementOperator& A) {
  if (A.has_mean_row) throw Error("operator already has a mean row");
  MeasurementOperator B;
  B.entries.resize(A.rows() + 1, A.signal_length());
  B.entries.row(0).setOnes();
  B.entries.bottomRows(A.rows()) = A.entries;
  B.has_mean_row = true;
  return B;
}

Eigen::VectorXd forward(const MeasurementOperator& A, const GridSignal& f) {
  validate_signal(f);
  if (A.signal_length() != static_cast<Eigen::Index>(f.shape.size()))
    throw Error("operator and signal lengths differ");
  const Eigen::Map<const Eigen::VectorXd> fv(f.values.data(),
                                             static_cast<Eigen::Index>(
                                                 f.values.size()));
  return A.entries * fv;
}

Eigen::VectorXd noise_vector(const NoiseModel& noise, Eigen::Index len,
                             std::uint64_t seed, std::uint32_t stream) {
  Eigen::VectorXd n(len);
  if (len == 0) return n;
  const RandomStream rs(seed, StreamPurpose::kNoise, stream);
  std::span<double> view(n.data(), static_cast<std::size_t>(len));
  if (noise.kind == NoiseKind::kGaussian) {
    rs.fill_gaussian(view);
  } else {
    rs.fill_uniform_sym(view);
  }
  n *= noise.scale;
  return n;
}

Eigen::VectorXd forward_noisy(const MeasurementOperator& A, const GridSignal& f,
                              const NoiseModel& noise, std::uint64_t seed) {
  Eigen::VectorXd y = forward(A, f);
  if (noise.scale != 0.0) y += noise_vector(noise, y.size(), seed);
  return y;
}

double coherence(const MeasurementOperator& A) {
  const auto core = A.core();
  const Eigen::Index n = core.cols();
  if (n < 2) throw Error("coherence needs at least two columns");
  // Panelled Gram computation keeps memory at O(N * panel) for large N.
  const Eigen::Index panel = std::min<Eigen::Index>(n, 1024);
  double best = 0.0;
  for (Eigen::Index j0 = 0; j0 < n; j0 += panel) {
    const Eigen::Index w = std::min(panel, n - j0);
    Eigen::MatrixXd block = core.transpose() * core.middleCols(j0, w);
    for (Eigen::Index c = 0; c < w; ++c)
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r == j0 + c) continue;
        best = std::max(best, std::abs(block(r, c)));
      }
  }
  return best;
}

double spectral_norm(const MeasurementOperator& A, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error("spectral_norm tolerance must be positive");
  const auto core = A.core();
  const Eigen::Index n = core.cols();
  Eigen::VectorXd v(n);
  {
    const RandomStream rs(0x9e3779b97f4a7c15ull, StreamPurpose::kSpectral, 0);
    rs.fill_gaussian(std::span<double>(v.data(), static_cast<std::size_t>(n)));
  }
  v.normalize();
  double lambda = 0.0;
  Eigen::VectorXd av(core.rows()), w(n);
  for (int it = 0; it < max_iter; ++it) {
    av.noalias() = core * v;
    w.noalias() = core.transpose() * av;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    w /= next;
    if (it > 0 && std::abs(next - lambda) <= tol * next) {
      return std::sqrt(next);
    }
    lambda = next;
    v.swap(w);
  }
  throw Error("spectral_norm did not converge; best estimate " +
              std::to_string(std::sqrt(lambda)));
}

double gaussian_coherence_bound(std::uint32_t K, std::uint32_t N) {
  const double lnN = std::log(static_cast<double>(N));
  const double denom = std::sqrt(static_cast<double>(K)) -
                       std::sqrt(12.0 * lnN);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(15.0 * lnN) / denom;
}

OperatorDiagnostics theory_bounds(const MeasurementOperator& A,
                                  const GridSignal& f, double kappa_assumed) {
  if (kappa_assumed < 1.0) throw Error("kappa must be at least 1");
  validate_signal(f);
  if (A.signal_length() != static_cast<Eigen::Index>(f.shape.size()))
    throw Error("operator and signal lengths differ");
  OperatorDiagnostics diag;
  diag.coherence = coherence(A);
  diag.spectral_norm = spectral_norm(A);
  const auto N = static_cast<std::uint32_t>(A.signal_length());
  const auto K = static_cast<std::uint32_t>(A.core_rows());
  const double lnN = std::log(static_cast<double>(N));
  diag.coherence_bound = gaussian_coherence_bound(K, N);
  diag.coherence_bound_applicable =
      60.0 * lnN <= static_cast<double>(K) &&
      static_cast<double>(K) <= (static_cast<double>(N) - 1.0) / (4.0 * lnN);
  const double expo =
      kappa_assumed / (2.0 * kappa_assumed + static_cast<double>(f.shape.d) -
                       2.0);
  diag.bound_term_approx = std::pow(
      diag.spectral_norm * diag.spectral_norm * lnN / static_cast<double>(N),
      expo);
  double l1 = 0.0;
  for (double v : f.values) l1 += std::abs(v);
  diag.bound_term_interference = diag.coherence * l1;
  return diag;
}

}  // namespace pls
