#include "mlcp/scan.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace mlcp {

namespace {

void check_triple(int s, int t, int e)
{
  if (!(0 <= s && s < t && t < e))
    throw std::invalid_argument("CUSUM requires 0 <= s < t < e, got (" + std::to_string(s) + ", " +
                                std::to_string(t) + ", " + std::to_string(e) + ")");
}

double left_weight(int s, int t, int e)
{
  return std::sqrt(static_cast<double>(e - t) / (static_cast<double>(e - s) * (t - s)));
}

double right_weight(int s, int t, int e)
{
  return std::sqrt(static_cast<double>(t - s) / (static_cast<double>(e - s) * (e - t)));
}

} // namespace

SeededIntervalSet seeded_intervals(int T, double c_J)
{
  if (T < 2)
    throw std::invalid_argument("seeded_intervals: T must be >= 2");
  if (!(c_J > 0.0))
    throw std::invalid_argument("seeded_intervals: c_J must be > 0");
  const double scales = std::ceil(c_J * std::log2(static_cast<double>(T)));
  if (scales > 40.0)
    throw std::invalid_argument("seeded_intervals: too many scales");

  SeededIntervalSet set;
  set.horizon = T;
  set.c_J = c_J;
  set.scales = static_cast<int>(scales);

  std::set<std::pair<int, int>> seen;
  for (int j = 1; j <= set.scales; ++j) {
    const long long denom = 1LL << j;
    for (long long i = 1; i <= denom - 1; ++i) {
      // floor((i-1)T/2^j) and ceil((i-1)T/2^j + T/2^(j-1)) = ceil((i+1)T/2^j)
      const long long left = ((i - 1) * T) / denom;
      long long right = ((i + 1) * T + denom - 1) / denom;
      if (right > T)
        right = T;
      if (left >= right)
        continue;
      if (!seen.emplace(static_cast<int>(left), static_cast<int>(right)).second)
        continue;
      set.intervals.push_back({static_cast<int>(left), static_cast<int>(right), j});
    }
  }
  return set;
}

CusumWeights cusum_weights(int s, int t, int e)
{
  check_triple(s, t, e);
  CusumWeights w{s, t, e, Vector<double>(e - s)};
  w.weights.head(t - s).setConstant(left_weight(s, t, e));
  w.weights.tail(e - t).setConstant(-right_weight(s, t, e));
  return w;
}

Tensor3d cusum_transform(const SeriesD &series, int s, int t, int e)
{
  check_triple(s, t, e);
  if (e > series.length())
    throw std::invalid_argument("cusum_transform: e exceeds series length");
  const Vector<double> before = series.block(s, t).colwise().sum().transpose();
  const Vector<double> after = series.block(t, e).colwise().sum().transpose();
  return Tensor3d(series.shape(), left_weight(s, t, e) * before - right_weight(s, t, e) * after);
}

Vector<double> cusum_inner_profile(const SeriesD &a, const SeriesD &b, int alpha, int beta)
{
  if (!a.conforms(b))
    throw std::invalid_argument("cusum_inner_profile: series shape or length mismatch");
  if (alpha < 0 || beta - alpha < 2 || beta > a.length())
    throw std::invalid_argument("cusum_inner_profile: need 0 <= alpha, beta - alpha >= 2, beta <= T");

  const auto block_a = a.block(alpha, beta);
  const auto block_b = b.block(alpha, beta);
  const Vector<double> total_a = block_a.colwise().sum().transpose();
  const Vector<double> total_b = block_b.colwise().sum().transpose();
  // ⟨A(u), D_B⟩ and ⟨B(u), D_A⟩ for every u in the window
  const Vector<double> a_dot_total_b = block_a * total_b;
  const Vector<double> b_dot_total_a = block_b * total_a;
  const double total_cross = total_a.dot(total_b);

  Vector<double> run_a = Vector<double>::Zero(a.width());
  Vector<double> run_b = Vector<double>::Zero(a.width());
  double xx = 0.0; // ⟨X_A, X_B⟩ with X the partial sums up to t
  double xa = 0.0; // ⟨X_A, D_B⟩
  double xb = 0.0; // ⟨D_A, X_B⟩

  Vector<double> profile(beta - alpha - 1);
  for (int t = alpha + 1; t < beta; ++t) {
    const Index k = t - alpha - 1;
    const auto row_a = block_a.row(k).transpose();
    const auto row_b = block_b.row(k).transpose();
    xx += run_a.dot(row_b) + row_a.dot(run_b) + row_a.dot(row_b);
    run_a += row_a;
    run_b += row_b;
    xa += a_dot_total_b[k];
    xb += b_dot_total_a[k];

    const double wl = left_weight(alpha, t, beta);
    const double wr = right_weight(alpha, t, beta);
    const double before_before = xx;
    const double cross = (xa - xx) + (xb - xx);
    const double after_after = total_cross - xa - xb + xx;
    profile[k] = wl * wl * before_before - wl * wr * cross + wr * wr * after_after;
  }
  return profile;
}

Index first_argmax(const Vector<double> &v)
{
  if (v.size() == 0)
    throw std::invalid_argument("first_argmax: empty vector");
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best])
      best = i;
  return best;
}

RefinedScan refined_scan_profile(const SeriesD &a_prime, const SeriesD &b_prime, int s, int b, int e,
                                 const TuckerRanks &ranks, const HpcaConfig &cfg)
{
  if (!a_prime.conforms(b_prime))
    throw std::invalid_argument("refined_scan_profile: series shape or length mismatch");
  if (!(0 <= s && s < b && b < e && e <= a_prime.length()))
    throw std::invalid_argument("refined_scan_profile: need 0 <= s < b < e <= T");
  if (e - s < 3)
    throw std::invalid_argument("refined_scan_profile: window (s, e] too short");

  const double tau = std::sqrt(static_cast<double>(e - b) * (b - s) / (e - s));
  const auto est = thpca<double>(cusum_transform(b_prime, s, b, e), ranks, tau, tau, cfg);

  RefinedScan out;
  out.rank_deficient = est.rank_deficient;
  out.values = Vector<double>::Zero(e - s - 1);
  const double norm = frob_norm(est.estimate);
  if (norm <= 1e-12) {
    out.degenerate = true;
    return out;
  }
  const Vector<double> direction = est.estimate.vec() / norm;

  // ⟨direction, Ã'(t)⟩ is the scalar CUSUM of g(u) = ⟨direction, A'(u)⟩
  const Vector<double> g = a_prime.block(s, e) * direction;
  const double total = g.sum();
  double before = 0.0;
  for (int t = s + 1; t < e; ++t) {
    before += g[t - s - 1];
    const double stat = left_weight(s, t, e) * before - right_weight(s, t, e) * (total - before);
    out.values[t - s - 1] = std::abs(stat);
  }
  return out;
}

} // namespace mlcp
