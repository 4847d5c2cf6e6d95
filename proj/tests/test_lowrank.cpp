#include "oracles.hpp"

#include <doctest.h>

#include <limits>

using namespace mlcp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double orthonormality_error(const Matrix<double> &u)
{
  return (u.transpose() * u - Matrix<double>::Identity(u.cols(), u.cols())).norm();
}

} // namespace

TEST_CASE("hpca: all-ones 2x2")
{
  Matrix<double> sigma(2, 2);
  sigma << 1, 1, 1, 1;
  const auto res = hpca(sigma, 1);
  CHECK_FALSE(res.rank_deficient);
  CHECK(res.basis(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(res.basis(1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("hpca: pure diagonal input is flagged")
{
  const auto res = hpca<double>(3.0 * Matrix<double>::Identity(4, 4), 1);
  CHECK(res.rank_deficient);
  CHECK(orthonormality_error(res.basis) <= 1e-10);
}

TEST_CASE("hpca: recovers a rank-2 subspace under diagonal corruption")
{
  auto rng = make_engine(21);
  std::uniform_real_distribution<double> diag(0.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u0 = oracle::random_orthonormal(8, 2, rng);
    Matrix<double> sigma = u0 * Eigen::Vector2d(9, 4).asDiagonal() * u0.transpose();
    for (Index i = 0; i < 8; ++i)
      sigma(i, i) += diag(rng);
    const auto res = hpca(sigma, 2, HpcaConfig{1000, 1e-14});
    CHECK(orthonormality_error(res.basis) <= 1e-10);
    CHECK(oracle::principal_angle(u0, res.basis) <= 1e-6);
  }
}

TEST_CASE("hpca: argument checks and orthonormality on random input")
{
  auto rng = make_engine(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix<double> g = oracle::random_tensor({6, 6, 1}, rng).vec().reshaped(6, 6);
    const Matrix<double> sigma = g * g.transpose();
    const auto res = hpca(sigma, 3);
    CHECK(res.basis.cols() == 3);
    CHECK(orthonormality_error(res.basis) <= 1e-10);
  }
  Matrix<double> bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(hpca(bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(hpca<double>(Matrix<double>::Identity(3, 3), 0), std::invalid_argument);
  CHECK_THROWS_AS(hpca<double>(Matrix<double>::Identity(3, 3), 4), std::invalid_argument);
  CHECK_THROWS_AS(hpca<double>(Matrix<double>::Identity(3, 2), 1), std::invalid_argument);
}

TEST_CASE("hpca is deterministic")
{
  auto rng = make_engine(23);
  const Matrix<double> g = oracle::random_tensor({7, 7, 1}, rng).vec().reshaped(7, 7);
  const Matrix<double> sigma = g * g.transpose();
  CHECK(hpca(sigma, 2).basis == hpca(sigma, 2).basis);
}

TEST_CASE("thpca: exact recovery of a noiseless rank-(1,1,1) tensor")
{
  auto rng = make_engine(24);
  Tensor3d core(Dims{1, 1, 1});
  core(0, 0, 0) = 2.0;
  const auto u1 = oracle::random_orthonormal(6, 1, rng);
  const auto u2 = oracle::random_orthonormal(5, 1, rng);
  const auto u3 = oracle::random_orthonormal(3, 1, rng);
  const Tensor3d x = oracle::tucker(core, u1, u2, u3);
  const auto res = thpca(x, TuckerRanks{1, 1, 1}, kInf, kInf, HpcaConfig{2000, 1e-14});
  CHECK((res.estimate.vec() - x.vec()).norm() <= 1e-8 * frob_norm(x));
}

TEST_CASE("thpca: clipping, full ranks and zero input")
{
  auto rng = make_engine(25);
  const Tensor3d a = oracle::random_tensor({4, 4, 2}, rng, -1.0, 1.0);
  const auto clipped = thpca(a, TuckerRanks{2, 2, 2}, 0.5, 0.0);
  CHECK(clipped.estimate.vec().minCoeff() >= 0.0);
  CHECK(clipped.estimate.vec().maxCoeff() <= 0.5);

  // full ranks project onto everything, so clipping alone acts
  Tensor3d b = Tensor3d::Zero({2, 2, 1});
  b(0, 0, 0) = 0.7;
  b(1, 1, 0) = -0.2;
  b(0, 1, 0) = 0.3;
  const auto full = thpca(b, TuckerRanks{2, 2, 1}, 0.5, 0.0);
  CHECK(full.estimate(0, 0, 0) == 0.5);
  CHECK(full.estimate(1, 1, 0) == 0.0);
  CHECK(full.estimate(0, 1, 0) == doctest::Approx(0.3));
  CHECK((thpca(a, TuckerRanks{4, 4, 2}, kInf, kInf).estimate.vec() - a.vec()).norm() == 0.0);

  const auto zero = thpca(Tensor3d::Zero({3, 3, 2}), TuckerRanks{1, 1, 1}, kInf, kInf);
  CHECK(zero.rank_deficient);
  CHECK(frob_norm(zero.estimate) == 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    const Tensor3d x = oracle::random_tensor({5, 4, 3}, rng, -2.0, 2.0);
    const auto r = thpca(x, TuckerRanks{2, 3, 2}, 0.8, 0.3);
    CHECK(r.estimate.vec().minCoeff() >= -0.3);
    CHECK(r.estimate.vec().maxCoeff() <= 0.8);
  }
  CHECK_THROWS_AS(thpca(a, TuckerRanks{5, 1, 1}, kInf, kInf), std::invalid_argument);
}

TEST_CASE("off-diagonal identifiability rule")
{
  CHECK(detail::off_diagonal_determines_rank(8, 2));
  CHECK(detail::off_diagonal_determines_rank(12, 2));
  CHECK(detail::off_diagonal_determines_rank(50, 15));
  CHECK_FALSE(detail::off_diagonal_determines_rank(4, 2));
  CHECK_FALSE(detail::off_diagonal_determines_rank(2, 1));
  CHECK(detail::off_diagonal_determines_rank(3, 1));
}

TEST_CASE("hpca: default settings stop within the iteration cap")
{
  auto rng = make_engine(27);
  const auto u0 = oracle::random_orthonormal(30, 3, rng);
  Matrix<double> sigma = u0 * Eigen::Vector3d(9, 6, 4).asDiagonal() * u0.transpose();
  const auto res = hpca(sigma, 3);
  CHECK(res.iterations <= HpcaConfig{}.max_iterations);
  CHECK(oracle::principal_angle(u0, res.basis) <= 1e-3);
}

TEST_CASE("thpca: error shrinks with the perturbation scale")
{
  auto rng = make_engine(26);
  const Dims d{8, 8, 4};
  Tensor3d core = oracle::random_tensor({2, 2, 2}, rng, 1.0, 2.0);
  const auto u1 = oracle::random_orthonormal(8, 2, rng);
  const auto u2 = oracle::random_orthonormal(8, 2, rng);
  const auto u3 = oracle::random_orthonormal(4, 2, rng);
  const Tensor3d x = oracle::tucker(core, u1, u2, u3);
  const Tensor3d noise = oracle::random_tensor(d, rng);
  double previous = kInf;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto r = thpca(x + eps * noise, TuckerRanks{2, 2, 2}, kInf, kInf, HpcaConfig{2000, 1e-14});
    const double err = frob_norm(r.estimate - x);
    CHECK(err < previous);
    previous = err;
  }
}
