// Command-line front end: simulate, detect, infer, benchmark, sensitivity, metrics.

#include "mlcp/benchmark.hpp"
#include "mlcp/io.hpp"
#include "mlcp/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using mlcp::RunConfig;
using mlcp::SeriesD;
using mlcp::ValidationError;

// config keys exposed as --flags on every subcommand
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"scenario", "scenario id, 0 = no-change block model"},
    {"n", "number of nodes"},
    {"T", "number of snapshots"},
    {"L", "number of layers"},
    {"c_tau1", "threshold constant"},
    {"c_J", "seeded interval density constant"},
    {"threshold", "explicit Stage-I threshold"},
    {"ranks", "Tucker ranks r1,r2,r3"},
    {"hpca_max_iterations", "H-PCA iteration cap"},
    {"hpca_tolerance", "H-PCA relative tolerance"},
    {"B", "Monte-Carlo draws for the limit law"},
    {"M", "limit-law range (0 = T)"},
    {"alpha", "confidence level 1 - alpha"},
    {"trials", "Monte-Carlo trials"},
    {"seed", "base seed"},
    {"threads", "worker threads (0 = all cores)"},
    {"inference", "run inference in benchmarks (true/false)"},
    {"split", "split one series into odd/even halves (true/false)"},
    {"timing", "add a wall-time column (true/false)"},
    {"c_values", "comma-separated threshold constants"},
    {"input", "edge list used with split=true"},
    {"a", "edge list of the first series"},
    {"b", "edge list of the second series"},
    {"a2", "first Stage-II series (optional)"},
    {"b2", "second Stage-II series (optional)"},
    {"change_points", "JSON file with change points"},
    {"truth", "JSON file with true change points"},
    {"output", "output path or prefix ('-' or empty = stdout)"},
};

struct Command
{
  CLI::App *app = nullptr;
  std::string config;
  std::map<std::string, std::string> values;
};

void add_options(Command &cmd)
{
  cmd.app->add_option("--config", cmd.config, "key = value configuration file (default: $MLCP_CONFIG)");
  for (const auto &[key, help] : kKeys) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd.app->add_option_function<std::string>(flag, [&cmd, key = key](const std::string &v) { cmd.values[key] = v; },
                                              help);
  }
}

RunConfig resolve(const Command &cmd, const std::string &mode)
{
  RunConfig cfg;
  std::string path = cmd.config;
  if (path.empty())
    if (const char *env = std::getenv("MLCP_CONFIG"))
      path = env;
  if (!path.empty())
    cfg = mlcp::load_run_config(path, cfg);
  for (const auto &[k, v] : cmd.values)
    cfg.set(k, v);
  cfg.mode = mode;
  cfg.validate();
  return cfg;
}

void emit(const RunConfig &cfg, const std::string &text)
{
  if (cfg.output.empty() || cfg.output == "-")
    std::cout << text;
  else
    mlcp::write_text(cfg.output, text);
}

std::vector<int> read_change_points(const std::string &path, const char *what)
{
  if (path.empty())
    throw ValidationError(std::string("missing --") + what);
  return mlcp::change_points_from_json(mlcp::read_json(path));
}

struct Inputs
{
  SeriesD a, b;
  std::optional<SeriesD> a2, b2;
  int factor = 1; ///< 2 when the halves of one series are used
  int horizon = 0;
};

Inputs load_inputs(const RunConfig &cfg)
{
  if (cfg.split) {
    if (cfg.input.empty())
      throw ValidationError("split=true needs --input");
    SeriesD x = mlcp::read_edge_list(cfg.input);
    auto halves = mlcp::split_series(x);
    if (halves.dropped_last)
      std::cerr << "note: odd T, last snapshot dropped\n";
    return {std::move(halves.a), std::move(halves.b), std::nullopt, std::nullopt, 2, static_cast<int>(x.length())};
  }
  if (cfg.input_a.empty() || cfg.input_b.empty())
    throw ValidationError("need --a and --b (or --split true --input)");
  Inputs in{mlcp::read_edge_list(cfg.input_a), mlcp::read_edge_list(cfg.input_b), std::nullopt, std::nullopt, 1, 0};
  if (!in.a.conforms(in.b))
    throw ValidationError("series a and b differ in shape or length");
  if (cfg.input_a2.empty() != cfg.input_b2.empty())
    throw ValidationError("--a2 and --b2 go together");
  if (!cfg.input_a2.empty()) {
    in.a2 = mlcp::read_edge_list(cfg.input_a2);
    in.b2 = mlcp::read_edge_list(cfg.input_b2);
    if (!in.a.conforms(*in.a2) || !in.a.conforms(*in.b2))
      throw ValidationError("Stage-II series differ in shape or length from a");
  }
  in.horizon = static_cast<int>(in.a.length());
  return in;
}

int run_simulate(const RunConfig &cfg)
{
  const mlcp::ScenarioSize size{cfg.n, cfg.T, cfg.L};
  const auto data = cfg.scenario == 0 ? mlcp::gen_null_msbm(size, cfg.seed) : mlcp::gen_scenario(cfg.scenario, size, cfg.seed);
  const std::string truth = mlcp::to_json(data.truth).dump(2) + "\n";
  if (cfg.output.empty() || cfg.output == "-") {
    std::cout << truth;
    std::cerr << "note: pass --output PREFIX to write PREFIX.a.csv and PREFIX.b.csv\n";
    return 0;
  }
  mlcp::write_edge_list(cfg.output + ".a.csv", data.a);
  mlcp::write_edge_list(cfg.output + ".b.csv", data.b);
  mlcp::write_text(cfg.output + ".truth.json", truth);
  return 0;
}

int run_detect(const RunConfig &cfg)
{
  const Inputs in = load_inputs(cfg);
  const auto det = mlcp::detect(in.a, in.b, in.a2 ? &*in.a2 : nullptr, in.b2 ? &*in.b2 : nullptr, cfg.detect);
  emit(cfg, mlcp::to_json(det, in.factor).dump(2) + "\n");
  return 0;
}

int run_infer(const RunConfig &cfg)
{
  const Inputs in = load_inputs(cfg);
  std::vector<int> cps = read_change_points(cfg.change_points, "change-points");
  // a detection document also carries the Stage-I candidate behind each estimate
  std::vector<int> candidates;
  const auto doc = mlcp::read_json(cfg.change_points);
  if (doc.is_object() && doc.contains("refinements") && doc["refinements"].size() == cps.size())
    for (const auto &r : doc["refinements"])
      candidates.push_back(r.value("candidate", 0));
  const int T = static_cast<int>(in.a.length());
  for (int &c : cps) {
    c /= in.factor;
    if (c <= 0 || c >= T)
      throw ValidationError("change point " + std::to_string(c * in.factor) + " outside the series");
  }
  const auto estimates = mlcp::infer(in.a, in.b, cps, cfg.detect.ranks_for(in.a.shape()), cfg.detect.hpca,
                                     cfg.law_config(T, cfg.seed));
  nlohmann::json out = {{"T", in.horizon}, {"split_factor", in.factor}, {"alpha", cfg.alpha}};
  out["estimates"] = nlohmann::json::array();
  for (auto e : estimates) {
    e.candidate = candidates.empty() ? e.candidate * in.factor : candidates[static_cast<std::size_t>(e.k - 1)];
    e.eta_tilde *= in.factor;
    e.eta_hat *= in.factor;
    e.ci.lo *= in.factor;
    e.ci.hi *= in.factor;
    out["estimates"].push_back(mlcp::to_json(e));
  }
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

int run_metrics(const RunConfig &cfg)
{
  const auto est = read_change_points(cfg.change_points, "change-points");
  const auto truth = read_change_points(cfg.truth, "truth");
  // a truth document written by `simulate` records its horizon
  int T = cfg.T;
  if (const auto doc = mlcp::read_json(cfg.truth); doc.is_object() && doc.contains("T"))
    T = doc.at("T").get<int>();
  auto num = [](double v) { return std::isinf(v) ? nlohmann::json("Inf") : nlohmann::json(v); };
  const nlohmann::json out = {
      {"K", static_cast<int>(truth.size())},
      {"K_hat", static_cast<int>(est.size())},
      {"abs_K_error", mlcp::count_error(est, truth)},
      {"d_est_truth", num(mlcp::hausdorff_one_sided(est, truth))},
      {"d_truth_est", num(mlcp::hausdorff_one_sided(truth, est))},
      {"coverage", mlcp::coverage(mlcp::Partition::from_change_points(truth, T),
                                  mlcp::Partition::from_change_points(est, T))},
  };
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Change-point detection and inference for multilayer network sequences"};
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"simulate", "generate a synthetic scenario (edge lists + truth JSON)"},
      {"detect", "two-stage change-point localization"},
      {"infer", "refined estimates and confidence intervals"},
      {"benchmark", "Monte-Carlo benchmark, CSV output"},
      {"sensitivity", "benchmark repeated over threshold constants"},
      {"metrics", "compare estimated and true change points"},
  };
  for (const auto &[name, help] : subs) {
    Command &cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    add_options(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    for (auto &[name, cmd] : commands) {
      if (!cmd.app->parsed())
        continue;
      const RunConfig cfg = resolve(cmd, name);
      if (name == "simulate")
        return run_simulate(cfg);
      if (name == "detect")
        return run_detect(cfg);
      if (name == "infer")
        return run_infer(cfg);
      if (name == "benchmark") {
        emit(cfg, mlcp::run_benchmark(cfg));
        return 0;
      }
      if (name == "sensitivity") {
        if (cfg.c_values.empty())
          throw ValidationError("sensitivity needs --c-values");
        emit(cfg, mlcp::run_sensitivity(cfg, cfg.c_values));
        return 0;
      }
      if (name == "metrics")
        return run_metrics(cfg);
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const mlcp::ParseError &e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
