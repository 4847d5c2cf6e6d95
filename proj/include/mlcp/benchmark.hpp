#pragma once

#include "mlcp/io.hpp"

#include <string>
#include <vector>

namespace mlcp {

struct TrialResult
{
  int trial = 0;
  bool ok = true;
  std::string error;
  int K = 0;
  int K_hat = 0;
  int abs_K_error = 0;
  double d_est_truth = 0.0; ///< d(Ĉ | C)
  double d_truth_est = 0.0; ///< d(C | Ĉ)
  double coverage = 0.0;
  std::vector<int> estimates;
  int ci_hits = 0;
  int ci_total = 0;
  std::vector<double> ci_lengths;
  double seconds = 0.0;
};

struct BenchmarkSummary
{
  int trials = 0;
  int failures = 0;
  double mean_K_hat = 0.0;
  double mean_abs_K_error = 0.0;
  double mean_d_est_truth = 0.0;
  double mean_d_truth_est = 0.0;
  double mean_coverage = 0.0;
  double detection_rate = 0.0; ///< share of trials with at least one estimate
  double ci_coverage = 0.0;    ///< covered true change points / all true change points
  double ci_mean_length = 0.0;
  int ci_total = 0;
};

/// Generate, detect, optionally infer and score one trial.
TrialResult run_trial(const RunConfig &cfg, int trial);

/// All trials, ordered by trial index whatever the thread count.
std::vector<TrialResult> run_trials(const RunConfig &cfg);

BenchmarkSummary summarize(const std::vector<TrialResult> &results);

std::string benchmark_csv(const RunConfig &cfg, const std::vector<TrialResult> &results);

/// CSV with one row per trial and a trailing row of means.
std::string run_benchmark(const RunConfig &cfg);

struct SensitivityRow
{
  double c_tau1 = 0.0;
  BenchmarkSummary summary;
};

std::vector<SensitivityRow> sensitivity_sweep(const RunConfig &cfg, const std::vector<double> &c_values);

std::string sensitivity_csv(const RunConfig &cfg, const std::vector<SensitivityRow> &rows);

/// Benchmark repeated per threshold constant on shared seeds.
std::string run_sensitivity(const RunConfig &cfg, const std::vector<double> &c_values);

/// Pairwise summation; the result does not depend on worker scheduling.
double pairwise_sum(const double *values, std::size_t count);

} // namespace mlcp
