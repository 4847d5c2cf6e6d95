#include "mlcp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mlcp {

namespace {

constexpr double kZeroJump = 1e-12;

void check_change_points(const std::vector<int> &eta, Index T)
{
  for (std::size_t k = 0; k < eta.size(); ++k)
    if (eta[k] <= 0 || eta[k] >= T || (k > 0 && eta[k] <= eta[k - 1]))
      throw std::invalid_argument("change points must be strictly increasing inside (0, T)");
}

} // namespace

SegmentEstimate segment_mean_estimate(const SeriesD &b, int l, int r, const TuckerRanks &ranks,
                                      const HpcaConfig &cfg)
{
  if (!(0 <= l && l < r && r <= b.length()))
    throw std::invalid_argument("segment_mean_estimate: need 0 <= l < r <= T, got (" + std::to_string(l) +
                                ", " + std::to_string(r) + "]");
  const Vector<double> mean = b.block(l, r).colwise().mean().transpose();
  auto fit = thpca<double>(Tensor3d(b.shape(), mean), ranks, 1.0, 0.0, cfg);
  return {l, r, std::move(fit.estimate), ranks, fit.rank_deficient};
}

FinalRefinement final_refine(const SeriesD &a, const SeriesD &b, const std::vector<int> &eta_tilde,
                             const TuckerRanks &ranks, const HpcaConfig &cfg)
{
  if (!a.conforms(b))
    throw std::invalid_argument("final_refine: series shape or length mismatch");
  const int T = static_cast<int>(a.length());
  check_change_points(eta_tilde, T);

  FinalRefinement out;
  const std::size_t K = eta_tilde.size();
  if (K == 0)
    return out;

  std::vector<int> bounds{0};
  bounds.insert(bounds.end(), eta_tilde.begin(), eta_tilde.end());
  bounds.push_back(T);
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k)
    out.segments.push_back(segment_mean_estimate(b, bounds[k], bounds[k + 1], ranks, cfg));

  for (std::size_t k = 1; k <= K; ++k) {
    const int lo = (bounds[k - 1] + bounds[k]) / 2;
    const int hi = (bounds[k] + bounds[k + 1] + 1) / 2;
    const Tensor3d &left = out.segments[k - 1].p_hat;
    const Tensor3d &right = out.segments[k].p_hat;
    unsigned flags = kFlagNone;
    if (out.segments[k - 1].rank_deficient || out.segments[k].rank_deficient)
      flags |= kFlagRankDeficient;
    if ((right.vec() - left.vec()).norm() <= kZeroJump)
      flags |= kFlagZeroJump;
    if (hi - lo < 3) {
      out.eta_hat.push_back(bounds[k]);
      out.flags.push_back(flags | kFlagShortWindow);
      continue;
    }

    // Q(t+1) - Q(t) = ‖A(t+1) - P̂_left‖² - ‖A(t+1) - P̂_right‖²
    const auto window = a.block(lo, hi);
    const Vector<double> cost_left = (window.rowwise() - left.vec().transpose()).rowwise().squaredNorm();
    const Vector<double> cost_right = (window.rowwise() - right.vec().transpose()).rowwise().squaredNorm();
    double q = cost_left[0] + cost_right.tail(hi - lo - 1).sum();
    double best_q = q;
    int best_t = lo + 1;
    for (int t = lo + 2; t < hi; ++t) {
      const Index u = t - lo - 1; // offset of time t within the window
      q += cost_left[u] - cost_right[u];
      if (q < best_q) {
        best_q = q;
        best_t = t;
      }
    }
    out.eta_hat.push_back(best_t);
    out.flags.push_back(flags);
  }
  return out;
}

JumpEstimate jump_estimate(const SegmentEstimate &p_left, const SegmentEstimate &p_right)
{
  p_left.p_hat.require_same_shape(p_right.p_hat);
  Tensor3d diff = p_right.p_hat - p_left.p_hat;
  const double kappa = frob_norm(diff);
  if (kappa <= kZeroJump)
    return {0.0, Tensor3d::Zero(diff.dims())};
  diff /= kappa;
  return {kappa, std::move(diff)};
}

double variance_estimate(const SeriesD &a, const Tensor3d &psi, int l, int r, const SegmentEstimate &p_hat)
{
  if (psi.dims() != a.shape() || p_hat.p_hat.dims() != a.shape())
    throw std::invalid_argument("variance_estimate: shape mismatch");
  if (!(0 <= l && r <= a.length() && r - l >= 2))
    throw std::invalid_argument("variance_estimate: need r - l >= 2 inside [0, T]");
  const Vector<double> proj = a.block(l, r) * psi.vec();
  const double offset = psi.vec().dot(p_hat.p_hat.vec());
  return (proj.array() - offset).square().sum() / static_cast<double>(r - l - 1);
}

void LimitLawConfig::validate() const
{
  if (draws < 2)
    throw std::invalid_argument("limit law: draws (B) must be >= 2");
  if (horizon < 1)
    throw std::invalid_argument("limit law: horizon T must be >= 1");
  if (range < 0.0 || !std::isfinite(range))
    throw std::invalid_argument("limit law: M must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("limit law: alpha must lie in (0, 1)");
}

std::vector<double> simulate_vanishing_law(double sigma_left, double sigma_right, const LimitLawConfig &cfg)
{
  cfg.validate();
  if (!(sigma_left >= 0.0) || !(sigma_right >= 0.0))
    throw std::invalid_argument("simulate_vanishing_law: sigmas must be >= 0");
  const double T = cfg.horizon;
  const double span = T * cfg.effective_range();
  const long long left_steps = static_cast<long long>(std::floor(span));
  const long long right_steps = static_cast<long long>(std::ceil(span));
  const long long steps = std::max(left_steps, right_steps);
  const double scale_left = 2.0 * sigma_left / std::sqrt(T);
  const double scale_right = 2.0 * sigma_right / std::sqrt(T);

  std::vector<double> out(static_cast<std::size_t>(cfg.draws));
  for (int d = 0; d < cfg.draws; ++d) {
    Engine rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(d)}));
    std::normal_distribution<double> normal;
    double walk_left = 0.0, walk_right = 0.0;
    double best = 0.0;
    long long best_i = 0;
    // increasing |i|, left before right, strict improvement only: ties go to
    // the smallest |r| and then the smallest r
    for (long long m = 1; m <= steps; ++m) {
      if (m <= left_steps) {
        walk_left += normal(rng);
        const double v = m / T + scale_left * walk_left;
        if (v < best) {
          best = v;
          best_i = -m;
        }
      }
      if (m <= right_steps) {
        walk_right += normal(rng);
        const double v = m / T + scale_right * walk_right;
        if (v < best) {
          best = v;
          best_i = m;
        }
      }
    }
    out[static_cast<std::size_t>(d)] = static_cast<double>(best_i) / T;
  }
  return out;
}

std::vector<int> simulate_nonvanishing_law(double rho, const InnerSampler &left, const InnerSampler &right,
                                           int r_max, int draws, std::uint64_t seed)
{
  if (!(rho > 0.0))
    throw std::invalid_argument("simulate_nonvanishing_law: rho must be > 0");
  if (r_max < 1)
    throw std::invalid_argument("simulate_nonvanishing_law: r_max must be >= 1");
  if (draws < 2)
    throw std::invalid_argument("simulate_nonvanishing_law: draws must be >= 2");
  if (!left || !right)
    throw std::invalid_argument("simulate_nonvanishing_law: samplers required");

  const double drift = rho * rho;
  std::vector<int> out(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) {
    Engine rng_left(derive_seed(seed, {static_cast<std::uint64_t>(d), 0}));
    Engine rng_right(derive_seed(seed, {static_cast<std::uint64_t>(d), 1}));
    double sum_left = 0.0, sum_right = 0.0;
    double best = 0.0;
    int best_r = 0;
    for (int m = 1; m <= r_max; ++m) {
      // r = -m: m·ρ² - 2ρ Σ_{t=-m+1}^{0} left draws
      sum_left += left(rng_left);
      const double v_left = m * drift - 2.0 * rho * sum_left;
      if (v_left < best) {
        best = v_left;
        best_r = -m;
      }
      sum_right += right(rng_right);
      const double v_right = m * drift + 2.0 * rho * sum_right;
      if (v_right < best) {
        best = v_right;
        best_r = m;
      }
    }
    out[static_cast<std::size_t>(d)] = best_r;
  }
  return out;
}

double empirical_quantile(std::vector<double> values, double p)
{
  if (values.empty())
    throw std::invalid_argument("empirical_quantile: no values");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("empirical_quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ConfidenceInterval confidence_interval(int eta_hat, double kappa, const std::vector<double> &draws, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("confidence_interval: alpha must lie in (0, 1)");
  if (draws.empty())
    throw std::invalid_argument("confidence_interval: no draws");
  const double center = eta_hat;
  if (!(kappa > 0.0))
    return {center, center};
  const double q_lo = empirical_quantile(draws, alpha / 2.0);
  const double q_hi = empirical_quantile(draws, 1.0 - alpha / 2.0);
  const double k2 = kappa * kappa;
  return {center - q_hi / k2, center - q_lo / k2};
}

std::vector<ChangePointEstimate> infer(const SeriesD &a, const SeriesD &b, const std::vector<int> &eta_tilde,
                                       const TuckerRanks &ranks, const HpcaConfig &hpca_cfg,
                                       const LimitLawConfig &law_cfg)
{
  law_cfg.validate();
  std::vector<ChangePointEstimate> out;
  if (eta_tilde.empty())
    return out;

  const FinalRefinement fr = final_refine(a, b, eta_tilde, ranks, hpca_cfg);
  for (std::size_t k = 0; k < eta_tilde.size(); ++k) {
    const SegmentEstimate &left = fr.segments[k];
    const SegmentEstimate &right = fr.segments[k + 1];
    ChangePointEstimate est;
    est.k = static_cast<int>(k) + 1;
    est.eta_tilde = eta_tilde[k];
    est.eta_hat = fr.eta_hat[k];
    est.flags = fr.flags[k];

    JumpEstimate jump = jump_estimate(left, right);
    est.kappa = jump.kappa;
    est.psi = std::move(jump.psi);
    if (est.kappa == 0.0) {
      est.flags |= kFlagZeroJump;
      est.ci = {static_cast<double>(est.eta_hat), static_cast<double>(est.eta_hat)};
      out.push_back(std::move(est));
      continue;
    }

    if (left.right - left.left >= 2)
      est.sigma_left = std::sqrt(variance_estimate(a, est.psi, left.left, left.right, left));
    else
      est.flags |= kFlagShortSegment;
    if (right.right - right.left >= 2)
      est.sigma_right = std::sqrt(variance_estimate(a, est.psi, right.left, right.right, right));
    else
      est.flags |= kFlagShortSegment;

    LimitLawConfig cfg = law_cfg;
    cfg.seed = derive_seed(law_cfg.seed, {static_cast<std::uint64_t>(est.k)});
    const std::vector<double> draws = simulate_vanishing_law(est.sigma_left, est.sigma_right, cfg);
    est.ci = confidence_interval(est.eta_hat, est.kappa, draws, law_cfg.alpha);
    out.push_back(std::move(est));
  }
  return out;
}

} // namespace mlcp
