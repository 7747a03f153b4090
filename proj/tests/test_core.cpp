#include <doctest.h>

#include "test_util.hpp"

#include <random>

#include "rbss/core.hpp"

using namespace rbss;

namespace {

Mat random_matrix(Index rows, Index cols, std::mt19937_64& gen, double scale = 5.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = dist(gen);
  return M;
}

// Scalar-loop reference for the soft threshold.
double soft_oracle(double x, double lam) {
  const double mag = std::abs(x) - lam;
  if (mag <= 0) return 0.0;
  return x < 0 ? -mag : mag;
}

}  // namespace

TEST_CASE("soft_threshold basic rule") {
  Mat M(1, 3);
  M << 3, -0.5, 2;
  const Mat out = soft_threshold(M, 1.0);
  CHECK(out(0, 0) == doctest::Approx(2));
  CHECK(out(0, 1) == 0);
  CHECK(out(0, 2) == doctest::Approx(1));
}

TEST_CASE("soft_threshold with zero thresholds is the identity") {
  std::mt19937_64 gen(7);
  const Mat M = random_matrix(4, 6, gen);
  CHECK(testutil::bitwise_equal(soft_threshold(M, 0.0), M));
}

TEST_CASE("soft_threshold per-row thresholds match entrywise oracle") {
  std::mt19937_64 gen(11);
  const Mat M = random_matrix(2, 3, gen);
  Vec lam(2);
  lam << 1, 2;
  const Mat out = soft_threshold(M, lam);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(out(i, j) == doctest::Approx(soft_oracle(M(i, j), lam(i))));
}

TEST_CASE("soft_threshold rejects mismatched threshold length") {
  CHECK_THROWS_AS(soft_threshold(Mat::Zero(2, 2), Vec::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(soft_threshold(Mat::Zero(2, 2), Vec::Constant(2, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("soft_threshold contraction and semigroup properties") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lam_dist(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat M = random_matrix(3, 5, gen);
    const double a = lam_dist(gen), b = lam_dist(gen);
    CHECK(soft_threshold(M, a).norm() <= M.norm() + 1e-12);
    const Mat twice = soft_threshold(soft_threshold(M, a), b);
    const Mat once = soft_threshold(M, a + b);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pseudo_inverse of identity and scalar") {
  CHECK((pseudo_inverse(Mat::Identity(4, 4)) - Mat::Identity(4, 4)).norm() < 1e-12);
  CHECK(pseudo_inverse(Mat::Constant(1, 1, 2.0))(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose conditions") {
  std::mt19937_64 gen(21);
  const Mat M = random_matrix(3, 5, gen);
  const Mat P = pseudo_inverse(M);
  CHECK((M * P * M - M).norm() < 1e-8);
  CHECK((P * M * P - P).norm() < 1e-8);
  CHECK(((M * P) - (M * P).transpose()).norm() < 1e-8);
  CHECK(((P * M) - (P * M).transpose()).norm() < 1e-8);
}

TEST_CASE("pseudo_inverse is an involution on full-rank inputs") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat M = random_matrix(4, 6, gen);
    CHECK((pseudo_inverse(pseudo_inverse(M)) - M).norm() < 1e-8 * M.norm());
  }
}

TEST_CASE("pseudo_inverse rejects bad tolerance") {
  CHECK_THROWS_AS(pseudo_inverse(Mat::Identity(2, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pseudo_inverse(Mat::Identity(2, 2), 1.5), std::invalid_argument);
}

TEST_CASE("mad_sigma hand-computed values") {
  CHECK(mad_sigma(std::vector<double>{5, 5, 5, 5}) == 0);
  CHECK(mad_sigma(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(1.4826));
  CHECK_THROWS_AS(mad_sigma(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("mad_sigma is consistent for Gaussian samples") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> samples(100000);
  for (double& x : samples) x = normal(gen);
  CHECK(mad_sigma(samples) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("mad_sigma shift invariance and absolute homogeneity") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> dist(-10, 10);
  std::vector<double> v(101);
  for (double& x : v) x = dist(gen);
  const double base = mad_sigma(v);
  std::vector<double> shifted = v, scaled = v;
  for (double& x : shifted) x += 7.5;
  for (double& x : scaled) x *= -3.0;
  CHECK(mad_sigma(shifted) == doctest::Approx(base).epsilon(1e-12));
  CHECK(mad_sigma(scaled) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("column_l1_norms examples and loop oracle") {
  CHECK(testutil::bitwise_equal(column_l1_norms(Mat::Zero(3, 4)), Vec::Zero(4)));
  Mat M(2, 2);
  M << 1, -2, 3, 0;
  const Vec norms = column_l1_norms(M);
  CHECK(norms(0) == 4);
  CHECK(norms(1) == 2);

  std::mt19937_64 gen(13);
  const Mat R = random_matrix(5, 7, gen);
  const Vec got = column_l1_norms(R);
  for (Index j = 0; j < 7; ++j) {
    double sum = 0;
    for (Index i = 0; i < 5; ++i) sum += std::abs(R(i, j));
    CHECK(got(j) == sum);
  }
}
