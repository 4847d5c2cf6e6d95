#include "mlcp/scan.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <limits>
#include <set>

using namespace mlcp;

namespace {

std::vector<std::pair<int, int>> pairs(const SeededIntervalSet &set)
{
  std::vector<std::pair<int, int>> out;
  for (const auto &iv : set.intervals)
    out.emplace_back(iv.left, iv.right);
  return out;
}

} // namespace

TEST_CASE("seeded_intervals: small horizons")
{
  const auto two = seeded_intervals(2, 1.0);
  CHECK(two.scales == 1);
  CHECK(pairs(two) == std::vector<std::pair<int, int>>{{0, 2}});

  const auto eight = seeded_intervals(8, 1.0);
  CHECK(eight.scales == 3);
  const std::vector<std::pair<int, int>> expected = {{0, 8}, {0, 4}, {2, 6}, {4, 8}, {0, 2}, {1, 3},
                                                     {2, 4}, {3, 5}, {4, 6}, {5, 7}, {6, 8}};
  CHECK(pairs(eight) == expected);
  CHECK_THROWS_AS(seeded_intervals(1), std::invalid_argument);
  CHECK_THROWS_AS(seeded_intervals(10, 0.0), std::invalid_argument);
}

TEST_CASE("seeded_intervals: clamping, no duplicates, linear size")
{
  auto rng = make_engine(31);
  std::uniform_int_distribution<int> pick(2, 500);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = pick(rng);
    const auto set = seeded_intervals(T, 1.0);
    CHECK(set.intervals.size() <= static_cast<std::size_t>(4 * T));
    std::set<std::pair<int, int>> seen;
    for (const auto &iv : set.intervals) {
      CHECK(0 <= iv.left);
      CHECK(iv.left < iv.right);
      CHECK(iv.right <= T);
      CHECK(seen.emplace(iv.left, iv.right).second);
    }
  }
}

TEST_CASE("cusum_weights")
{
  const auto w = cusum_weights(0, 2, 4);
  REQUIRE(w.weights.size() == 4);
  CHECK(w.at(1) == doctest::Approx(0.5));
  CHECK(w.at(2) == doctest::Approx(0.5));
  CHECK(w.at(3) == doctest::Approx(-0.5));
  CHECK(w.at(4) == doctest::Approx(-0.5));

  const auto v = cusum_weights(0, 1, 3);
  CHECK(v.at(1) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(v.at(2) == doctest::Approx(-std::sqrt(1.0 / 6.0)));
  CHECK(v.at(3) == doctest::Approx(-std::sqrt(1.0 / 6.0)));

  auto rng = make_engine(32);
  std::uniform_int_distribution<int> pick(0, 300);
  for (int trial = 0; trial < 1000; ++trial) {
    int s = pick(rng), t = pick(rng), e = pick(rng);
    if (s > e)
      std::swap(s, e);
    if (!(s < t && t < e))
      continue;
    const auto c = cusum_weights(s, t, e);
    CHECK(std::abs(c.weights.sum()) <= 1e-10);
    CHECK(std::abs(c.weights.squaredNorm() - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(cusum_weights(2, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(cusum_weights(0, 4, 4), std::invalid_argument);
}

TEST_CASE("cusum_transform: null invariance, oracle and single change")
{
  auto rng = make_engine(33);
  const Dims d{3, 3, 2};
  const SeriesD flat = oracle::constant_series(oracle::random_tensor(d, rng), 12);
  CHECK(frob_norm(cusum_transform(flat, 0, 5, 12)) <= 1e-10);

  const SeriesD x = oracle::random_series(d, 20, rng);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> pick(0, 20);
    int s = pick(rng), t = pick(rng), e = pick(rng);
    if (s > e)
      std::swap(s, e);
    if (!(s < t && t < e))
      continue;
    CHECK(frob_norm(cusum_transform(x, s, t, e) - oracle::naive_cusum(x, s, t, e)) <= 1e-10);
  }

  const Tensor3d p1 = oracle::random_tensor(d, rng, 0, 1), p2 = oracle::random_tensor(d, rng, 0, 1);
  const int s = 2, eta = 9, e = 17;
  const SeriesD step = oracle::step_series(p1, p2, eta, 20);
  const double expected = std::sqrt(double(eta - s) * (e - eta) / (e - s)) * frob_norm(p2 - p1);
  CHECK(frob_norm(cusum_transform(step, s, eta, e)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(cusum_transform(step, 0, 5, 21), std::invalid_argument);
}

TEST_CASE("cusum_inner_profile: oracle, null and single change")
{
  auto rng = make_engine(34);
  const Dims d{3, 2, 2};
  for (int trial = 0; trial < 20; ++trial) {
    const SeriesD a = oracle::random_series(d, 15, rng), b = oracle::random_series(d, 15, rng);
    std::uniform_int_distribution<int> pick(0, 15);
    int alpha = pick(rng), beta = pick(rng);
    if (alpha > beta)
      std::swap(alpha, beta);
    if (beta - alpha < 2)
      continue;
    const auto fast = cusum_inner_profile(a, b, alpha, beta);
    const auto slow = oracle::naive_profile(a, b, alpha, beta);
    REQUIRE(fast.size() == static_cast<Index>(slow.size()));
    for (std::size_t k = 0; k < slow.size(); ++k)
      CHECK(std::abs(fast[k] - slow[k]) <= 1e-8);
  }

  const SeriesD flat = oracle::constant_series(oracle::random_tensor(d, rng), 10);
  CHECK(cusum_inner_profile(flat, flat, 0, 10).cwiseAbs().maxCoeff() <= 1e-10);

  const SeriesD step = oracle::step_series(Tensor3d::Zero(d), Tensor3d::Constant(d, 0.5), 5, 12);
  const auto profile = cusum_inner_profile(step, step, 0, 12);
  const Index k = first_argmax(profile.cwiseAbs());
  CHECK(k + 1 == 5);
  for (Index i = 0; i < profile.size(); ++i)
    if (i != k)
      CHECK(profile[i] < profile[k]);
}

TEST_CASE("first_argmax prefers the smallest index")
{
  Vector<double> v(5);
  v << 1, 3, 2, 3, 0;
  CHECK(first_argmax(v) == 1);
  CHECK_THROWS_AS(first_argmax(Vector<double>()), std::invalid_argument);
}

TEST_CASE("refined_scan_profile")
{
  auto rng = make_engine(35);
  const Dims d{4, 4, 2};
  const TuckerRanks full{4, 4, 2};
  const SeriesD flat = oracle::constant_series(oracle::random_tensor(d, rng, 0, 1), 12);
  const SeriesD noisy = oracle::random_series(d, 12, rng);
  const auto deg = refined_scan_profile(noisy, flat, 0, 6, 12, full);
  CHECK(deg.degenerate);
  CHECK(deg.values.size() == 11);
  CHECK(deg.values.cwiseAbs().maxCoeff() == 0.0);

  const Tensor3d p1 = oracle::random_tensor(d, rng, 0.2, 0.4);
  const Tensor3d jump = oracle::random_tensor(d, rng, 0.0, 0.5);
  const int eta = 5;
  const SeriesD step = oracle::step_series(p1, p1 + jump, eta, 12);
  const auto scan = refined_scan_profile(step, step, 0, 7, 12, full);
  CHECK_FALSE(scan.degenerate);
  CHECK(scan.values.minCoeff() >= 0.0);
  CHECK(first_argmax(scan.values) + 1 == eta);

  // the direction is normalized, so scaling b's jump leaves the profile alone
  const SeriesD scaled = oracle::step_series(p1, p1 + 1.7 * jump, eta, 12);
  const auto scan2 = refined_scan_profile(step, scaled, 0, 7, 12, full);
  CHECK((scan2.values - scan.values).cwiseAbs().maxCoeff() <= 1e-8);

  CHECK_THROWS_AS(refined_scan_profile(step, step, 0, 1, 2, full), std::invalid_argument);
  CHECK_THROWS_AS(refined_scan_profile(step, step, 3, 3, 9, full), std::invalid_argument);
}
