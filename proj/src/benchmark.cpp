#include "mlcp/benchmark.hpp"

#include "mlcp/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace mlcp {

namespace {

constexpr std::uint64_t kLawPurpose = 99;

std::string fmt(double v)
{
  if (std::isinf(v))
    return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join(const std::vector<int> &v)
{
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? ";" : "") + std::to_string(v[i]);
  return out;
}

double mean_of(std::vector<double> v)
{
  if (v.empty())
    return 0.0;
  // an infinite term makes the mean infinite, as in the reported tables
  for (double x : v)
    if (std::isinf(x))
      return x;
  return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

std::string csv_field(const std::string &s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

} // namespace

double pairwise_sum(const double *values, std::size_t count)
{
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      s += values[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

TrialResult run_trial(const RunConfig &cfg, int trial)
{
  TrialResult r;
  r.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::uint64_t seed =
        derive_seed(cfg.seed, {static_cast<std::uint64_t>(cfg.scenario), static_cast<std::uint64_t>(trial)});
    const ScenarioSize size{cfg.n, cfg.T, cfg.L};
    const ScenarioData data = cfg.scenario == 0 ? gen_null_msbm(size, seed) : gen_scenario(cfg.scenario, size, seed);
    const std::vector<int> &truth = data.truth.change_points;

    const Detection det = detect(data.a, data.b, cfg.detect);
    r.estimates = det.locations();
    r.K = static_cast<int>(truth.size());
    r.K_hat = static_cast<int>(r.estimates.size());
    r.abs_K_error = count_error(r.estimates, truth);
    r.d_est_truth = hausdorff_one_sided(r.estimates, truth);
    r.d_truth_est = hausdorff_one_sided(truth, r.estimates);
    r.coverage = coverage(Partition::from_change_points(truth, cfg.T), Partition::from_change_points(r.estimates, cfg.T));

    if (cfg.inference) {
      const auto estimates = infer(data.a, data.b, r.estimates, cfg.detect.ranks_for(data.a.shape()), cfg.detect.hpca,
                                   cfg.law_config(cfg.T, derive_seed(seed, {kLawPurpose})));
      for (const auto &e : estimates)
        r.ci_lengths.push_back(e.ci.length());
      // each true change point is judged by the interval of the nearest
      // final estimate
      r.ci_total = r.K;
      for (int eta : truth) {
        const ChangePointEstimate *nearest = nullptr;
        for (const auto &e : estimates)
          if (nearest == nullptr || std::abs(e.eta_hat - eta) < std::abs(nearest->eta_hat - eta))
            nearest = &e;
        if (nearest != nullptr && nearest->ci.contains(eta))
          ++r.ci_hits;
      }
    }
  } catch (const std::exception &e) {
    r.ok = false;
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TrialResult> run_trials(const RunConfig &cfg)
{
  cfg.validate();
  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  if (cfg.trials == 0)
    return results;
  int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, cfg.trials);

  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < cfg.trials; t = next++)
      results[static_cast<std::size_t>(t)] = run_trial(cfg, t);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(work);
  }
  return results;
}

BenchmarkSummary summarize(const std::vector<TrialResult> &results)
{
  BenchmarkSummary s;
  s.trials = static_cast<int>(results.size());
  std::vector<double> k_hat, abs_err, d1, d2, cov, detected, lengths;
  int hits = 0;
  for (const auto &r : results) {
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    k_hat.push_back(r.K_hat);
    abs_err.push_back(r.abs_K_error);
    d1.push_back(r.d_est_truth);
    d2.push_back(r.d_truth_est);
    cov.push_back(r.coverage);
    detected.push_back(r.K_hat > 0 ? 1.0 : 0.0);
    hits += r.ci_hits;
    s.ci_total += r.ci_total;
    lengths.insert(lengths.end(), r.ci_lengths.begin(), r.ci_lengths.end());
  }
  s.mean_K_hat = mean_of(k_hat);
  s.mean_abs_K_error = mean_of(abs_err);
  s.mean_d_est_truth = mean_of(d1);
  s.mean_d_truth_est = mean_of(d2);
  s.mean_coverage = mean_of(cov);
  s.detection_rate = mean_of(detected);
  s.ci_coverage = s.ci_total > 0 ? static_cast<double>(hits) / s.ci_total : 0.0;
  s.ci_mean_length = mean_of(lengths);
  return s;
}

std::string benchmark_csv(const RunConfig &cfg, const std::vector<TrialResult> &results)
{
  std::string out = "trial,status,K,K_hat,abs_K_error,d_est_truth,d_truth_est,coverage,estimates,ci_hits,ci_total,"
                    "ci_mean_length";
  if (cfg.timing)
    out += ",seconds";
  out += '\n';
  if (results.empty())
    return out;

  for (const auto &r : results) {
    out += std::to_string(r.trial) + ',' + (r.ok ? std::string("ok") : csv_field("error: " + r.error));
    if (r.ok) {
      out += ',' + std::to_string(r.K) + ',' + std::to_string(r.K_hat) + ',' + std::to_string(r.abs_K_error) + ',' +
             fmt(r.d_est_truth) + ',' + fmt(r.d_truth_est) + ',' + fmt(r.coverage) + ',' + join(r.estimates) + ',' +
             std::to_string(r.ci_hits) + ',' + std::to_string(r.ci_total) + ',' + fmt(mean_of(r.ci_lengths));
    } else {
      out += ",,,,,,,,,,";
    }
    if (cfg.timing)
      out += ',' + fmt(r.seconds);
    out += '\n';
  }

  const BenchmarkSummary s = summarize(results);
  out += "mean," + std::to_string(s.failures) + "_failed,," + fmt(s.mean_K_hat) + ',' + fmt(s.mean_abs_K_error) + ',' +
         fmt(s.mean_d_est_truth) + ',' + fmt(s.mean_d_truth_est) + ',' + fmt(s.mean_coverage) + ",," +
         fmt(s.ci_coverage) + ',' + std::to_string(s.ci_total) + ',' + fmt(s.ci_mean_length);
  if (cfg.timing) {
    std::vector<double> secs;
    for (const auto &r : results)
      secs.push_back(r.seconds);
    out += ',' + fmt(mean_of(secs));
  }
  out += '\n';
  return out;
}

std::string run_benchmark(const RunConfig &cfg) { return benchmark_csv(cfg, run_trials(cfg)); }

std::vector<SensitivityRow> sensitivity_sweep(const RunConfig &cfg, const std::vector<double> &c_values)
{
  if (c_values.empty())
    throw ValidationError("sensitivity needs at least one c_tau1 value");
  std::vector<SensitivityRow> rows;
  for (double c : c_values) {
    RunConfig run = cfg;
    run.detect.c_tau1 = c;
    run.detect.threshold_override.reset();
    rows.push_back({c, summarize(run_trials(run))});
  }
  return rows;
}

std::string sensitivity_csv(const RunConfig &cfg, const std::vector<SensitivityRow> &rows)
{
  std::string out = "n,c_tau1,trials,failures,mean_K_hat,abs_K_error,d_est_truth,d_truth_est,coverage\n";
  for (const auto &row : rows)
    out += std::to_string(cfg.n) + ',' + fmt(row.c_tau1) + ',' + std::to_string(row.summary.trials) + ',' +
           std::to_string(row.summary.failures) + ',' + fmt(row.summary.mean_K_hat) + ',' +
           fmt(row.summary.mean_abs_K_error) + ',' + fmt(row.summary.mean_d_est_truth) + ',' +
           fmt(row.summary.mean_d_truth_est) + ',' + fmt(row.summary.mean_coverage) + '\n';
  return out;
}

std::string run_sensitivity(const RunConfig &cfg, const std::vector<double> &c_values)
{
  return sensitivity_csv(cfg, sensitivity_sweep(cfg, c_values));
}

} // namespace mlcp
