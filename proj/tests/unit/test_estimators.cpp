#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "toepcov/estimators.hpp"
#include "toepcov/sampling.hpp"

using namespace toepcov;

namespace {
std::vector<double> row_of(const ToeplitzMatrix& t) { return {t.first_row().begin(), t.first_row().end()}; }

const DenseSymmetric kA(3, {4, 1, 0, 1, 2, 3, 0, 3, 6});

// Three observations whose uncentered second-moment matrix is kA:
// x_i = sqrt(3) L e_i with L the Cholesky factor of kA.
SampleMatrix samples_with_covariance_a() {
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(oracle::to_eigen(kA)).matrixL();
  std::vector<double> rows;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rows.push_back(std::sqrt(3.0) * l(j, i));
  return SampleMatrix(3, 3, rows);
}
}  // namespace

TEST(SampleMatrix, Validation) {
  EXPECT_THROW(SampleMatrix(2, 2, {1, 2, 3}), Error);
  EXPECT_THROW(SampleMatrix(1, 2, {1, NAN}), Error);
  const SampleMatrix x(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(x(1, 2), 6.0);
  EXPECT_EQ(x.row(1)[0], 4.0);
}

TEST(SampleCovariance, Examples) {
  const auto a = sample_covariance(SampleMatrix(1, 2, {1, 2}));
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_EQ(a(0, 1), 2.0);
  EXPECT_EQ(a(1, 0), 2.0);
  EXPECT_EQ(a(1, 1), 4.0);

  const auto b = sample_covariance(SampleMatrix(2, 2, {1, 0, -1, 0}));
  EXPECT_EQ(b(0, 0), 1.0);
  EXPECT_EQ(b(0, 1), 0.0);
  EXPECT_EQ(b(1, 1), 0.0);
}

TEST(SampleCovariance, CenteringSubtractsMean) {
  const auto c = sample_covariance(SampleMatrix(2, 1, {3, 5}), true);
  EXPECT_DOUBLE_EQ(c(0, 0), 1.0);
  try {
    sample_covariance(SampleMatrix(1, 1, {3}), true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
  }
}

TEST(SampleCovariance, GaussianIdentityLargeN) {
  const auto spec = make_sampler_spec(Family::Gaussian, ToeplitzMatrix::identity(4), 1);
  const auto cov = sample_covariance(sample(spec, 100000));
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(cov(s, t), s == t ? 1.0 : 0.0, 0.02);
}

TEST(DiagonalAverage, Examples) {
  const auto t = diagonal_average(kA);
  EXPECT_EQ(row_of(t), (std::vector<double>{4, 2, 0}));

  const ToeplitzMatrix toe({3, -1, 0.5, 2});
  EXPECT_EQ(diagonal_average(toe.dense()), toe);

  EXPECT_EQ(row_of(diagonal_average(DenseSymmetric(1, {7}))), (std::vector<double>{7}));
}

TEST(MaskedEstimate, OnesMaskIsDiagonalAverage) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> rows(30);
  for (double& v : rows) v = g(rng);
  const SampleMatrix x(6, 5, rows);
  EXPECT_EQ(masked_toeplitz_estimate(x, ones_mask(5)), diagonal_average(sample_covariance(x)));
  EXPECT_EQ(row_of(masked_toeplitz_estimate(x, zero_mask(5))), std::vector<double>(5, 0.0));
}

TEST(MaskedEstimate, BandingComposesHandExamples) {
  const auto est = masked_toeplitz_estimate(samples_with_covariance_a(), banding_mask(3, 1));
  EXPECT_NEAR(est.lag(0), 4.0, 1e-12);
  EXPECT_NEAR(est.lag(1), 2.0, 1e-12);
  EXPECT_EQ(est.lag(2), 0.0);
}

TEST(MaskedEstimate, DimensionMismatch) {
  try {
    masked_toeplitz_estimate(SampleMatrix(1, 3, {1, 2, 3}), ones_mask(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(EstimationError, Examples) {
  const ToeplitzMatrix a({1, 2, 3});
  EXPECT_EQ(estimation_error(a, a), 0.0);
  EXPECT_NEAR(estimation_error(ToeplitzMatrix({2, 2, 3}), a), 1.0, 1e-14);
  EXPECT_NEAR(estimation_error(ToeplitzMatrix({3, 1}), ToeplitzMatrix({1, 0})), 3.0, 1e-14);
  EXPECT_THROW(estimation_error(ToeplitzMatrix({1}), ToeplitzMatrix({1, 0})), Error);
}

TEST(MaskedEstimate, UnbiasedForMaskedCovariance) {
  const ToeplitzMatrix sigma({1, 0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto spec = make_sampler_spec(Family::Gaussian, sigma, 77);
  const Sampler sampler(spec);
  const auto mask = tapering_mask(6, 3);
  const std::size_t trials = 400;
  std::vector<double> sum(6, 0.0), sq(6, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto est = masked_toeplitz_estimate(sampler.draw(20, t), mask);
    for (std::size_t r = 0; r < 6; ++r) {
      sum[r] += est.lag(r);
      sq[r] += est.lag(r) * est.lag(r);
    }
  }
  const auto target = apply_mask(mask, sigma);
  for (std::size_t r = 0; r < 6; ++r) {
    const double mean = sum[r] / trials;
    const double var = (sq[r] - trials * mean * mean) / (trials - 1);
    const double se = std::sqrt(var / trials);
    EXPECT_LE(std::abs(mean - target.lag(r)), 3.5 * se + 1e-15) << "lag " << r;
  }
}
