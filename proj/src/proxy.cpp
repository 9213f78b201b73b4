#include "pls/proxy.hpp"

#include <algorithm>

namespace pls {

std::string to_string(SubtractMode mode) {
  switch (mode) {
    case SubtractMode::kNone: return "none";
    case SubtractMode::kProjectedMean: return "projected_mean";
    case SubtractMode::kOracleMedian: return "oracle_median";
  }
  return "none";
}

namespace {

GridSignal proxy_from_core(const MeasurementOperator& A,
                           const Eigen::VectorXd& y_core,
                           const GridShape& shape) {
  if (static_cast<Eigen::Index>(shape.size()) != A.signal_length())
    throw Error("operator and grid lengths differ");
  GridSignal z = make_signal(shape);
  Eigen::Map<Eigen::VectorXd> zv(z.values.data(),
                                 static_cast<Eigen::Index>(z.values.size()));
  zv.noalias() = A.core().transpose() * y_core;
  return z;
}

Eigen::VectorXd core_part(const MeasurementOperator& A,
                          const Eigen::VectorXd& y) {
  if (y.size() == A.core_rows()) return y;
  if (A.has_mean_row && y.size() == A.rows()) return y.tail(A.core_rows());
  throw Error("observation length does not match operator rows");
}

}  // namespace

GridSignal compute_proxy(const MeasurementOperator& A, const Eigen::VectorXd& y,
                         const GridShape& shape) {
  return proxy_from_core(A, core_part(A, y), shape);
}

ProxyResult plain_proxy(const MeasurementOperator& A, const Eigen::VectorXd& y,
                        const GridShape& shape, double gamma) {
  ProxyResult r;
  r.z = compute_proxy(A, y, shape);
  r.lambda_hat = 0.0;
  r.gamma_effective = gamma;
  r.mode = SubtractMode::kNone;
  return r;
}

ProxyResult projected_mean_subtract(const MeasurementOperator& A,
                                    const Eigen::VectorXd& y,
                                    const GridShape& shape, double gamma) {
  if (!A.has_mean_row)
    throw Error("projected mean subtraction needs an augmented operator");
  if (y.size() != A.rows())
    throw Error("observation length does not match operator rows");
  const double lambda = y[0] / static_cast<double>(A.signal_length());
  Eigen::VectorXd y_tilde = y.tail(A.core_rows());
  y_tilde.noalias() -= lambda * (A.core() * Eigen::VectorXd::Ones(
                                                A.signal_length()));
  ProxyResult r;
  r.z = proxy_from_core(A, y_tilde, shape);
  r.lambda_hat = lambda;
  r.gamma_effective = gamma - lambda;
  r.mode = SubtractMode::kProjectedMean;
  return r;
}

ProxyResult oracle_median_subtract(const MeasurementOperator& A,
                                   const Eigen::VectorXd& y,
                                   const GridSignal& f_true, double gamma) {
  const double lambda = oracle_median_offset(f_true);
  Eigen::VectorXd y_core = core_part(A, y);
  y_core.noalias() -= lambda * (A.core() * Eigen::VectorXd::Ones(
                                               A.signal_length()));
  ProxyResult r;
  r.z = proxy_from_core(A, y_core, f_true.shape);
  r.lambda_hat = lambda;
  r.gamma_effective = gamma - lambda;
  r.mode = SubtractMode::kOracleMedian;
  return r;
}

double oracle_median_offset(const GridSignal& f) {
  validate_signal(f);
  std::vector<double> v = f.values;
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k),
                   v.end());
  return v[k];
}

}  // namespace pls
