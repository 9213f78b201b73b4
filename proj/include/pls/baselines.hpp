#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pls/grid.hpp"
#include "pls/operators.hpp"

namespace pls {

// Ground-truth level set {i : f_i > gamma} (strict). Estimates below use >=;
// the two conventions differ only on pixels with f_i exactly gamma.
LevelSetMask truth_mask(const GridSignal& f, double gamma);

// Estimation error: (1/N) * sum over the symmetric difference of |gamma - f_i|.
double excess_risk(const LevelSetMask& mask, const GridSignal& f_true,
                   double gamma);

// Weighted risk: (1/N) * sum_i (gamma - f_i) * (+1 if i in mask else -1).
// risk(S) - risk(S*) = 2 * excess_risk(S) exactly.
double risk(const LevelSetMask& mask, const GridSignal& f_true, double gamma);

// Mask {i : z_i >= gamma}.
LevelSetMask threshold_estimate(const GridSignal& z, double gamma);

// A tuned baseline output: the tuning value chosen by oracle search, the
// resulting mask, and its excess risk.
struct TunedEstimate {
  double tuning = 0.0;
  LevelSetMask mask;
  double epsilon = 0.0;
};

// Best threshold on z against the ground truth. Candidates are -inf, the
// midpoints of consecutive distinct sorted z values, and +inf; ties keep the
// smallest threshold.
TunedEstimate risk_optimal_threshold(const GridSignal& z,
                                     const GridSignal& f_true, double gamma);

// Orthonormal Haar wavelet transform, full depth (for d = 2, min of the two
// per-dimension depths). Coefficient layout: approximation block first
// (row-major), then per-level detail blocks as laid out by the in-place
// separable transform.
std::vector<double> haar_analysis(const GridSignal& x);
GridSignal haar_synthesis(const std::vector<double>& coeffs,
                          const GridShape& shape);

// Soft-thresholds all detail coefficients by thr and averages over
// cycle_spins circular shifts (all N shifts make it translation invariant).
GridSignal haar_denoise(const GridSignal& z, double thr, int cycle_spins);

// Threshold the denoised signal at gamma.
LevelSetMask haar_plugin(const GridSignal& z, double gamma, double thr,
                         int cycle_spins);

// gamma_est is applied to the denoised signal (the effective threshold after
// any mean subtraction); gamma_true scores the mask against the truth.
TunedEstimate haar_oracle_search(const GridSignal& z, double gamma_est,
                                 const GridSignal& f_true, double gamma_true,
                                 const std::vector<double>& thr_grid,
                                 int cycle_spins);

// Rank-r truncated-SVD reconstruction f_hat = V_r S_r^-1 U_r^T y.
Eigen::VectorXd tsvd_reconstruct(const MeasurementOperator& A,
                                 const Eigen::VectorXd& y, int rank);
LevelSetMask tsvd_plugin(const MeasurementOperator& A, const Eigen::VectorXd& y,
                         int rank, const GridShape& shape, double gamma);
TunedEstimate tsvd_oracle_search(const MeasurementOperator& A,
                                 const Eigen::VectorXd& y, double gamma_est,
                                 const GridSignal& f_true, double gamma_true,
                                 const std::vector<int>& rank_grid);

// Tikhonov reconstruction in dual form: f_hat = A^T w with
// (A A^T + alpha I) w = y.
struct TikhonovResult {
  Eigen::VectorXd f_hat;
  Eigen::VectorXd dual;
};
TikhonovResult tikhonov_reconstruct(const MeasurementOperator& A,
                                    const Eigen::VectorXd& y, double alpha);
LevelSetMask tikhonov_plugin(const MeasurementOperator& A,
                             const Eigen::VectorXd& y, double alpha,
                             const GridShape& shape, double gamma);
TunedEstimate tikhonov_oracle_search(const MeasurementOperator& A,
                                     const Eigen::VectorXd& y, double gamma_est,
                                     const GridSignal& f_true,
                                     double gamma_true,
                                     const std::vector<double>& alpha_grid);

}  // namespace pls
