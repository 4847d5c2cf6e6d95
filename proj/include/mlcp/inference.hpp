#pragma once

#include "mlcp/lowrank.hpp"
#include "mlcp/rng.hpp"
#include "mlcp/tensor.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mlcp {

/// Low-rank estimate of the mean probability tensor on (left, right].
struct SegmentEstimate
{
  int left = 0;
  int right = 0;
  Tensor3d p_hat;
  TuckerRanks ranks;
  bool rank_deficient = false;
};

SegmentEstimate segment_mean_estimate(const SeriesD &b, int l, int r, const TuckerRanks &ranks,
                                      const HpcaConfig &cfg = {});

enum EstimateFlag : unsigned {
  kFlagNone = 0,
  kFlagShortWindow = 1u << 0,   ///< final window too short, kept Stage-II estimate
  kFlagZeroJump = 1u << 1,      ///< estimated jump is numerically zero
  kFlagShortSegment = 1u << 2,  ///< a flanking segment is too short for a variance
  kFlagRankDeficient = 1u << 3, ///< a low-rank fit saw a rank-deficient Gram matrix
};

struct FinalRefinement
{
  std::vector<int> eta_hat;
  std::vector<unsigned> flags;
  /// K+1 segment estimates on (η̃_{k-1}, η̃_k]
  std::vector<SegmentEstimate> segments;
};

/// Least-squares re-estimation of each change point against low-rank segment
/// means fitted on `b`, scanning `a`.
FinalRefinement final_refine(const SeriesD &a, const SeriesD &b, const std::vector<int> &eta_tilde,
                             const TuckerRanks &ranks, const HpcaConfig &cfg = {});

struct JumpEstimate
{
  double kappa = 0.0;
  Tensor3d psi;
};

JumpEstimate jump_estimate(const SegmentEstimate &p_left, const SegmentEstimate &p_right);

/// (r - l - 1)^{-1} Σ_{t=l+1}^{r} ⟨ψ, A(t) - P̂⟩².
double variance_estimate(const SeriesD &a, const Tensor3d &psi, int l, int r, const SegmentEstimate &p_hat);

struct LimitLawConfig
{
  int draws = 500;       ///< B
  double range = 0.0;    ///< M; 0 selects M = T
  int horizon = 0;       ///< T, the grid is r = i / T
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
  double effective_range() const { return range > 0.0 ? range : static_cast<double>(horizon); }
};

/// Monte-Carlo draws of the argmin of the drifted two-sided Brownian motion,
/// evaluated on the grid i/T.
std::vector<double> simulate_vanishing_law(double sigma_left, double sigma_right, const LimitLawConfig &cfg);

using InnerSampler = std::function<double(Engine &)>;

/// Monte-Carlo draws of the argmin of the drifted two-sided random walk on
/// integers in [-r_max, r_max].
std::vector<int> simulate_nonvanishing_law(double rho, const InnerSampler &left, const InnerSampler &right,
                                           int r_max, int draws, std::uint64_t seed);

/// Type-7 (linear interpolation) empirical quantile.
double empirical_quantile(std::vector<double> values, double p);

struct ConfidenceInterval
{
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

ConfidenceInterval confidence_interval(int eta_hat, double kappa, const std::vector<double> &draws, double alpha);

struct ChangePointEstimate
{
  int k = 0;
  int candidate = 0; ///< Stage-I b_k, 0 when not known
  int eta_tilde = 0;
  int eta_hat = 0;
  double kappa = 0.0;
  Tensor3d psi;
  double sigma_left = 0.0;  ///< σ̂_{k,k}
  double sigma_right = 0.0; ///< σ̂_{k,k+1}
  ConfidenceInterval ci;
  unsigned flags = kFlagNone;
};

/// Final refinement, jump and variance estimation and Monte-Carlo confidence
/// intervals for every Stage-II estimate.
std::vector<ChangePointEstimate> infer(const SeriesD &a, const SeriesD &b, const std::vector<int> &eta_tilde,
                                       const TuckerRanks &ranks, const HpcaConfig &hpca_cfg,
                                       const LimitLawConfig &law_cfg);

} // namespace mlcp
