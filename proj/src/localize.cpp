#include "mlcp/localize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlcp {

void DetectConfig::validate() const
{
  if (!(c_tau1 > 0.0))
    throw std::invalid_argument("c_tau1 must be > 0");
  if (!(c_J > 0.0))
    throw std::invalid_argument("c_J must be > 0");
  if (threshold_override && !(*threshold_override >= 0.0))
    throw std::invalid_argument("threshold override must be >= 0");
  hpca.validate();
}

double DetectConfig::threshold(Index n, Index layers, Index T) const
{
  if (threshold_override)
    return *threshold_override;
  const double log_t = std::log(static_cast<double>(T));
  return c_tau1 * static_cast<double>(n) * std::sqrt(static_cast<double>(layers)) * std::pow(log_t, 1.5);
}

TuckerRanks DetectConfig::ranks_for(const Dims &shape) const
{
  TuckerRanks r = ranks ? *ranks : TuckerRanks::defaults_for(shape);
  r.validate_for(shape);
  return r;
}

std::vector<int> CandidateSet::locations() const
{
  std::vector<int> out;
  out.reserve(candidates.size());
  for (const auto &c : candidates)
    out.push_back(c.location);
  return out;
}

std::vector<int> Detection::locations() const
{
  std::vector<int> out;
  out.reserve(stage2.size());
  for (const auto &r : stage2)
    out.push_back(r.location);
  return out;
}

namespace {

struct ScoredInterval
{
  Interval seeded;
  Interval trimmed;
  double score = -1.0;
  int argmax = 0;
};

Interval trim(const Interval &iv)
{
  // (floor(a + (b-a)/64), ceil(b - (b-a)/64)]
  const long long len = iv.right - iv.left;
  const long long lo = (64LL * iv.left + len) / 64;
  const long long hi = (64LL * iv.right - len + 63) / 64;
  return {static_cast<int>(lo), static_cast<int>(hi), iv.scale};
}

void sbs_recurse(const std::vector<ScoredInterval> &scored, int s, int e, double tau,
                 std::vector<Candidate> &out)
{
  const ScoredInterval *best = nullptr;
  for (const auto &si : scored) {
    if (!si.seeded.contained_in(s, e))
      continue;
    if (best == nullptr || si.score > best->score)
      best = &si;
  }
  if (best == nullptr || !(best->score > tau))
    return;
  out.push_back({best->argmax, best->seeded, best->trimmed, best->score});
  sbs_recurse(scored, s, best->argmax, tau, out);
  sbs_recurse(scored, best->argmax, e, tau, out);
}

} // namespace

CandidateSet sbs_detect(const SeriesD &a, const SeriesD &b, const DetectConfig &cfg)
{
  cfg.validate();
  if (!a.conforms(b))
    throw std::invalid_argument("sbs_detect: series shape or length mismatch");
  const int T = static_cast<int>(a.length());
  const auto &shape = a.shape();

  CandidateSet result;
  result.horizon = T;
  result.threshold = cfg.threshold(shape[0], shape[2], T);

  // An interval's score depends only on the interval, so every seeded
  // interval is scored once and the recursion reuses the scores.
  const SeededIntervalSet seeds = seeded_intervals(T, cfg.c_J);
  std::vector<ScoredInterval> scored;
  scored.reserve(seeds.intervals.size());
  for (const auto &iv : seeds.intervals) {
    ScoredInterval si{iv, trim(iv)};
    if (si.trimmed.length() >= 2) {
      const Vector<double> profile =
          cusum_inner_profile(a, b, si.trimmed.left, si.trimmed.right).cwiseAbs();
      const Index k = first_argmax(profile);
      si.score = profile[k];
      si.argmax = si.trimmed.left + 1 + static_cast<int>(k);
    }
    scored.push_back(si);
  }

  sbs_recurse(scored, 0, T, result.threshold, result.candidates);
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const Candidate &x, const Candidate &y) { return x.location < y.location; });
  return result;
}

std::vector<Refinement> local_refine(const SeriesD &a_prime, const SeriesD &b_prime,
                                     const CandidateSet &candidates, const DetectConfig &cfg)
{
  std::vector<Refinement> out;
  if (candidates.empty())
    return out;
  if (!a_prime.conforms(b_prime))
    throw std::invalid_argument("local_refine: series shape or length mismatch");
  const int T = static_cast<int>(a_prime.length());
  const TuckerRanks ranks = cfg.ranks_for(a_prime.shape());

  const std::vector<int> b = candidates.locations();
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] <= 0 || b[k] >= T || (k > 0 && b[k] <= b[k - 1]))
      throw std::invalid_argument("local_refine: candidates must be strictly increasing inside (0, T)");
    const int prev = k == 0 ? 0 : b[k - 1];
    const int next = k + 1 == b.size() ? T : b[k + 1];
    Refinement r;
    r.candidate = b[k];
    r.window_left = (prev + b[k]) / 2;
    r.window_right = (b[k] + next + 1) / 2;
    r.location = b[k];
    if (r.window_right - r.window_left < 3) {
      r.degenerate = true;
    } else {
      const RefinedScan scan =
          refined_scan_profile(a_prime, b_prime, r.window_left, b[k], r.window_right, ranks, cfg.hpca);
      if (scan.degenerate)
        r.degenerate = true;
      else
        r.location = r.window_left + 1 + static_cast<int>(first_argmax(scan.values));
    }
    out.push_back(r);
  }
  return out;
}

Detection detect(const SeriesD &a, const SeriesD &b, const SeriesD *a2, const SeriesD *b2,
                 const DetectConfig &cfg)
{
  if (!a.conforms(b))
    throw std::invalid_argument("detect: series shape or length mismatch");
  if ((a2 == nullptr) != (b2 == nullptr))
    throw std::invalid_argument("detect: supply both refinement series or neither");
  if (a2 != nullptr && (!a.conforms(*a2) || !a.conforms(*b2)))
    throw std::invalid_argument("detect: refinement series shape or length mismatch");

  Detection d;
  d.stage1 = sbs_detect(a, b, cfg);
  d.stage2 = a2 != nullptr ? local_refine(*a2, *b2, d.stage1, cfg) : local_refine(a, b, d.stage1, cfg);
  return d;
}

SplitSeries split_series(const SeriesD &x)
{
  const Index T = x.length();
  if (T < 4)
    throw std::invalid_argument("split_series: need at least 4 snapshots");
  const Index half = T / 2;
  SeriesD::Rows odd(half, x.width());
  SeriesD::Rows even(half, x.width());
  for (Index k = 0; k < half; ++k) {
    odd.row(k) = x.rows().row(2 * k);
    even.row(k) = x.rows().row(2 * k + 1);
  }
  return {SeriesD(x.shape(), std::move(odd)), SeriesD(x.shape(), std::move(even)), T % 2 == 1};
}

} // namespace mlcp
