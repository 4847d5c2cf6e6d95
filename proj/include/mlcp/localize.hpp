#pragma once

#include "mlcp/lowrank.hpp"
#include "mlcp/scan.hpp"

#include <optional>
#include <vector>

namespace mlcp {

struct DetectConfig
{
  double c_tau1 = 0.1;
  double c_J = 1.0;
  std::optional<TuckerRanks> ranks; ///< defaults to (min(15,n), min(15,n), L)
  HpcaConfig hpca;
  std::optional<double> threshold_override;

  void validate() const;

  /// c_tau1 · n · sqrt(L) · (ln T)^{3/2} unless overridden.
  double threshold(Index n, Index layers, Index T) const;

  TuckerRanks ranks_for(const Dims &shape) const;
};

struct Candidate
{
  int location = 0;
  Interval seeded;  ///< seeded interval that won the selection
  Interval trimmed; ///< its trimmed version actually scanned
  double score = 0.0;
};

/// Stage-I output: strictly increasing locations in (0, T).
struct CandidateSet
{
  int horizon = 0;
  double threshold = 0.0;
  std::vector<Candidate> candidates;

  std::vector<int> locations() const;
  bool empty() const { return candidates.empty(); }
};

/// Seeded binary segmentation on the inner-product CUSUM of two independent
/// series.
CandidateSet sbs_detect(const SeriesD &a, const SeriesD &b, const DetectConfig &cfg);

struct Refinement
{
  int candidate = 0;
  int window_left = 0;  ///< s_k
  int window_right = 0; ///< e_k
  int location = 0;     ///< refined estimate
  bool degenerate = false;
};

/// Stage-II local refinement of every candidate.
std::vector<Refinement> local_refine(const SeriesD &a_prime, const SeriesD &b_prime,
                                     const CandidateSet &candidates, const DetectConfig &cfg);

struct Detection
{
  CandidateSet stage1;
  std::vector<Refinement> stage2;

  std::vector<int> locations() const;
};

/// Two-stage localization. Stage II uses (a2, b2) when both are given and
/// reuses (a, b) otherwise.
Detection detect(const SeriesD &a, const SeriesD &b, const SeriesD *a2, const SeriesD *b2,
                 const DetectConfig &cfg);

inline Detection detect(const SeriesD &a, const SeriesD &b, const DetectConfig &cfg)
{
  return detect(a, b, nullptr, nullptr, cfg);
}

/// Odd snapshots to `a`, even snapshots to `b`; index t' in the halves maps
/// back to original time 2t'.
struct SplitSeries
{
  SeriesD a;
  SeriesD b;
  bool dropped_last = false;

  static int to_original(int t_half) { return 2 * t_half; }
};

SplitSeries split_series(const SeriesD &x);

} // namespace mlcp
