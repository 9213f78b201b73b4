#pragma once

#include <Eigen/Dense>
#include <string>

#include "pls/grid.hpp"
#include "pls/operators.hpp"

namespace pls {

enum class SubtractMode { kNone, kProjectedMean, kOracleMedian };

std::string to_string(SubtractMode mode);

// Proxy observations z = A^T y with optional offset handling. The estimator
// consumes (z, gamma_effective); level sets are invariant to the shift.
struct ProxyResult {
  GridSignal z;
  double lambda_hat = 0.0;
  double gamma_effective = 0.0;
  SubtractMode mode = SubtractMode::kNone;
};

// z = A^T y over the core block. If the operator is augmented, y may carry
// either all rows (row 0 is ignored) or just the core rows.
GridSignal compute_proxy(const MeasurementOperator& A, const Eigen::VectorXd& y,
                         const GridShape& shape);

ProxyResult plain_proxy(const MeasurementOperator& A, const Eigen::VectorXd& y,
                        const GridShape& shape, double gamma);

// Mean subtraction from the augmented observation: lambda_hat = y[0] / N,
// y_core is debiased by lambda_hat * (A 1), and z = A^T y_tilde with
// gamma_effective = gamma - lambda_hat.
ProxyResult projected_mean_subtract(const MeasurementOperator& A,
                                    const Eigen::VectorXd& y,
                                    const GridShape& shape, double gamma);

// Subtraction with the ground-truth lower median of f (test/experiment use).
ProxyResult oracle_median_subtract(const MeasurementOperator& A,
                                   const Eigen::VectorXd& y,
                                   const GridSignal& f_true, double gamma);

// Lower median: the (N/2)-th smallest for even N, the middle value for odd.
double oracle_median_offset(const GridSignal& f);

}  // namespace pls
