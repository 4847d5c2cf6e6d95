#pragma once

#include "mlcp/rng.hpp"
#include "mlcp/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlcp {

/// Latent positions and layer weights of one multilayer random dot product
/// graph. Without `y` the graph is undirected: entries with i <= j are drawn
/// and mirrored.
struct MrdpgParams
{
  Matrix<double> x;                ///< n × d
  std::optional<Matrix<double>> y; ///< n × d, directed variant
  std::vector<Matrix<double>> w;   ///< L matrices, d × d
};

struct ProbabilityTensor
{
  Tensor3d p;
  std::size_t clipped = 0; ///< entries moved into [0, 1]
};

ProbabilityTensor probability_tensor(const MrdpgParams &params);

/// Independent Bernoulli draws, one per entry (or per i <= j when symmetric).
Tensor3d sample_bernoulli(const Tensor3d &p, Engine &rng, bool symmetric = false);

Tensor3d sample_mrdpg(const MrdpgParams &params, std::uint64_t seed);

struct ScenarioTruth
{
  int scenario = 0; ///< 0 for the no-change null model
  int horizon = 0;
  std::vector<int> change_points;
  std::vector<std::string> segments; ///< one summary per segment
  std::size_t clipped = 0;
  std::vector<std::string> notes;

  int K() const { return static_cast<int>(change_points.size()); }
};

struct ScenarioData
{
  SeriesD a;
  SeriesD b;
  ScenarioTruth truth;
};

struct ScenarioSize
{
  int n = 50;
  int T = 200;
  int L = 4;

  void validate() const;
};

/// One of the four synthetic designs (1: Dirichlet latent positions, 2-4:
/// multilayer stochastic block models). `a` and `b` are independent draws
/// over a shared probability path.
ScenarioData gen_scenario(int id, const ScenarioSize &size, std::uint64_t seed);

/// Constant multilayer SBM with four evenly sized communities.
ScenarioData gen_null_msbm(const ScenarioSize &size, std::uint64_t seed);

/// Community sizes from fractions by largest-remainder rounding.
std::vector<int> community_sizes(int n, const std::vector<double> &fractions);

} // namespace mlcp
