#include "pls/proxy.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pls/operators.hpp"
#include "pls/rng.hpp"

using namespace pls;

namespace {

Eigen::Map<const Eigen::VectorXd> as_vec(const GridSignal& f) {
  return {f.values.data(), static_cast<Eigen::Index>(f.values.size())};
}

// Orthonormal square operator from the QR factorization of a seeded matrix.
MeasurementOperator orthonormal_operator(std::uint32_t n, std::uint64_t seed) {
  const MeasurementOperator raw = gen_gaussian_operator(n, n, seed);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(raw.entries));
  MeasurementOperator Q;
  Q.entries = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q;
}

}  // namespace

TEST_CASE("identity operator passes observations through unchanged") {
  const MeasurementOperator I = identity_operator(8);
  Eigen::VectorXd y(8);
  y << 3, -1, 4, -1, 5, -9, 2, 6;
  const GridSignal z = compute_proxy(I, y, GridShape::line(8));
  CHECK((as_vec(z) - y).norm() == 0.0);
}

TEST_CASE("orthonormal operators recover the signal exactly without noise") {
  const GridShape shape = GridShape::plane(4, 4);
  const MeasurementOperator Q = orthonormal_operator(16, 31);
  GridSignal f = make_signal(shape);
  const RandomStream rs(12, StreamPurpose::kGeneric, 0);
  rs.fill_gaussian(f.values);
  const Eigen::VectorXd y = forward(Q, f);
  const GridSignal z = compute_proxy(Q, y, shape);
  CHECK((as_vec(z) - as_vec(f)).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("proxy matches a hand transpose-multiply") {
  MeasurementOperator A;
  A.entries.resize(2, 4);
  // Unit columns: (1,0), (0,-1), (0.6,-0.8), (0,1).
  A.entries << 1.0, 0.0, 0.6, 0.0,
               0.0, -1.0, -0.8, 1.0;
  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  const GridSignal z = compute_proxy(A, y, GridShape::line(4));
  CHECK(z.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(z.values[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(z.values[2] == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(z.values[3] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("proxy is linear in the observations") {
  const MeasurementOperator A = gen_gaussian_operator(6, 8, 44);
  const GridShape shape = GridShape::line(8);
  Eigen::VectorXd y1(6), y2(6);
  const RandomStream rs(3, StreamPurpose::kGeneric, 1);
  rs.fill_gaussian(std::span<double>(y1.data(), 6));
  rs.fill_uniform_sym(std::span<double>(y2.data(), 6));
  const GridSignal za = compute_proxy(A, Eigen::VectorXd(2.0 * y1 - 3.0 * y2),
                                      shape);
  const GridSignal z1 = compute_proxy(A, y1, shape);
  const GridSignal z2 = compute_proxy(A, y2, shape);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(za.values[i] ==
          doctest::Approx(2.0 * z1.values[i] - 3.0 * z2.values[i])
              .epsilon(1e-9));
}

TEST_CASE("plain proxy keeps gamma and reports no subtraction") {
  const MeasurementOperator A = gen_gaussian_operator(4, 4, 5);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  const ProxyResult r = plain_proxy(A, y, GridShape::plane(2, 2), 7.5);
  CHECK(r.lambda_hat == 0.0);
  CHECK(r.gamma_effective == 7.5);
  CHECK(r.mode == SubtractMode::kNone);
  CHECK(to_string(r.mode) == "none");
  CHECK(r.z.values == compute_proxy(A, y, GridShape::plane(2, 2)).values);
}

TEST_CASE("proxy accepts full or core observations of an augmented operator") {
  const MeasurementOperator A = gen_gaussian_operator(5, 4, 9);
  const MeasurementOperator aug = augment_mean_row(A);
  GridSignal f = make_signal(GridShape::plane(2, 2));
  f.values = {1.0, 2.0, 3.0, 4.0};
  const Eigen::VectorXd y_full = forward(aug, f);
  const GridShape shape = f.shape;
  const GridSignal z_full = compute_proxy(aug, y_full, shape);
  const GridSignal z_core =
      compute_proxy(aug, Eigen::VectorXd(y_full.tail(5)), shape);
  const GridSignal z_plain = compute_proxy(A, Eigen::VectorXd(y_full.tail(5)),
                                           shape);
  CHECK(z_full.values == z_core.values);
  CHECK(z_full.values == z_plain.values);

  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(compute_proxy(aug, wrong, shape), Error);
}

TEST_CASE("projected mean subtraction recovers a constant offset exactly") {
  const GridShape shape = GridShape::plane(2, 2);
  const MeasurementOperator A = gen_gaussian_operator(3, 4, 77);
  const MeasurementOperator aug = augment_mean_row(A);

  SUBCASE("constant signal collapses to a near-zero proxy") {
    GridSignal f = make_signal(shape, 5.0);
    const Eigen::VectorXd y = forward(aug, f);
    const ProxyResult r = projected_mean_subtract(aug, y, shape, 3.0);
    CHECK(r.lambda_hat == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(r.gamma_effective == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r.mode == SubtractMode::kProjectedMean);
    CHECK(as_vec(r.z).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("zero-mean signal reduces to the plain proxy") {
    GridSignal f = make_signal(shape);
    f.values = {2.0, -2.0, 1.0, -1.0};
    const Eigen::VectorXd y = forward(aug, f);
    const ProxyResult r = projected_mean_subtract(aug, y, shape, 3.0);
    CHECK(r.lambda_hat == doctest::Approx(0.0).epsilon(1e-12));
    const ProxyResult plain =
        plain_proxy(A, Eigen::VectorXd(y.tail(3)), shape, 3.0);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(r.z.values[i] == doctest::Approx(plain.z.values[i]).epsilon(1e-9));
  }
  SUBCASE("noisy 4-pixel case matches direct arithmetic") {
    GridSignal f = make_signal(shape);
    f.values = {1.0, 2.0, 3.0, 6.0};  // mean 3
    Eigen::VectorXd noise(4);
    noise << 0.8, -0.1, 0.2, 0.4;  // slot 0 hits the mean row
    const Eigen::VectorXd y = forward(aug, f) + noise;
    const ProxyResult r = projected_mean_subtract(aug, y, shape, 2.5);
    // lambda_hat = (sum f + n_0) / N.
    CHECK(r.lambda_hat == doctest::Approx(3.0 + 0.8 / 4.0).epsilon(1e-12));
    CHECK(r.gamma_effective ==
          doctest::Approx(2.5 - r.lambda_hat).epsilon(1e-15));
    // z = A^T (y_core - lambda_hat * A 1).
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    const Eigen::VectorXd y_tilde =
        y.tail(3) - r.lambda_hat * (A.entries * ones);
    const Eigen::VectorXd expect = A.entries.transpose() * y_tilde;
    for (int i = 0; i < 4; ++i)
      CHECK(r.z.values[static_cast<std::size_t>(i)] ==
            doctest::Approx(expect[i]).epsilon(1e-12));
  }
  SUBCASE("missing mean row is an error") {
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(projected_mean_subtract(A, y, shape, 0.0), Error);
  }
}

TEST_CASE("lower median picks the N/2-th order statistic") {
  GridSignal f = make_signal(GridShape::line(4));
  f.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(oracle_median_offset(f) == 2.0);
  f.values = {4.0, 3.0, 2.0, 1.0};
  CHECK(oracle_median_offset(f) == 2.0);
  GridSignal c = make_signal(GridShape::line(8), 3.25);
  CHECK(oracle_median_offset(c) == 3.25);
  double l1 = 0.0;
  for (const double v : c.values) l1 += std::abs(v - 3.25);
  CHECK(l1 == 0.0);
}

TEST_CASE("median subtraction never inflates the l1 norm") {
  // Values are multiples of 1/64 bounded by 8, so differences and the short
  // sums below are exact in double arithmetic and the inequality can be
  // checked with zero tolerance, including the equality case where zero sits
  // between the two central order statistics.
  const RandomStream rs(2024, StreamPurpose::kGeneric, 0);
  for (std::uint32_t t = 0; t < 1000; ++t) {
    GridSignal f = make_signal(GridShape::line(16));
    for (std::size_t i = 0; i < 16; ++i) {
      const double u = rs.uniform_pair(t * 8 + i / 2)[i % 2];
      f.values[i] = std::floor(u * 512.0) / 64.0 - 2.5;
    }
    const double med = oracle_median_offset(f);
    double l1 = 0.0, l1_shift = 0.0;
    for (const double v : f.values) {
      l1 += std::abs(v);
      l1_shift += std::abs(v - med);
    }
    CHECK(l1_shift <= l1);
  }
}

TEST_CASE("oracle median subtraction debiases with the true median") {
  const GridShape shape = GridShape::plane(2, 2);
  GridSignal f = make_signal(shape);
  f.values = {1.0, 5.0, 2.0, 8.0};  // lower median 2
  const MeasurementOperator A = gen_gaussian_operator(4, 4, 13);
  const Eigen::VectorXd y = forward(A, f);
  const ProxyResult r = oracle_median_subtract(A, y, f, 4.0);
  CHECK(r.lambda_hat == 2.0);
  CHECK(r.gamma_effective == 2.0);
  CHECK(r.mode == SubtractMode::kOracleMedian);
  CHECK(to_string(r.mode) == "oracle_median");
  const Eigen::VectorXd expect =
      A.entries.transpose() *
      (y - 2.0 * (A.entries * Eigen::VectorXd::Ones(4)));
  for (int i = 0; i < 4; ++i)
    CHECK(r.z.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("shifting signal and threshold together preserves the level set") {
  const RandomStream rs(6, StreamPurpose::kGeneric, 0);
  GridSignal f = make_signal(GridShape::line(32));
  rs.fill_gaussian(f.values);
  const double gamma = 0.25;
  for (const double lambda : {-2.0, -0.5, 0.0, 1.0, 3.75}) {
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const bool plain = f.values[i] > gamma;
      const bool shifted = (f.values[i] - lambda) > (gamma - lambda);
      CHECK(plain == shifted);
    }
  }
}
