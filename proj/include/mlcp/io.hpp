#pragma once

#include "mlcp/inference.hpp"
#include "mlcp/localize.hpp"
#include "mlcp/simgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcp {

struct ParseError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

/// Everything a CLI run or benchmark needs. Loaded from a flat `key = value`
/// file; command-line flags override file values.
struct RunConfig
{
  std::string mode = "benchmark";
  int scenario = 1; ///< 0 selects the no-change block model
  int n = 50;
  int T = 200;
  int L = 4;

  DetectConfig detect;
  int B = 500;       ///< Monte-Carlo draws for the limit law
  double M = 0.0;    ///< limit-law range, 0 means M = T
  double alpha = 0.05;

  int trials = 100;
  std::uint64_t seed = 20240601;
  int threads = 0; ///< 0 uses the hardware concurrency
  bool inference = true;
  bool split = false;
  bool timing = false;

  std::vector<double> c_values;

  std::string input, input_a, input_b, input_a2, input_b2;
  std::string change_points, truth, output;

  void validate() const;

  /// Applies one key/value pair; unknown keys or bad values throw ValidationError.
  void set(const std::string &key, const std::string &value);

  LimitLawConfig law_config(int horizon, std::uint64_t law_seed) const;
};

std::map<std::string, std::string> parse_key_values(const std::string &text);

RunConfig load_run_config(const std::string &path, RunConfig base = {});

/// Shape declared next to an edge list; zero fields are inferred.
struct EdgeListDescriptor
{
  int n = 0;
  int L = 0;
  int T = 0;
};

std::string descriptor_path(const std::string &edge_list_path);

std::optional<EdgeListDescriptor> read_descriptor(const std::string &path);

void write_descriptor(const std::string &path, const EdgeListDescriptor &desc);

/// Lines "t,layer,i,j" (1-based) mark unit entries; a non-numeric first line
/// is treated as a header.
SeriesD parse_edge_list(const std::string &text, const std::optional<EdgeListDescriptor> &desc);

SeriesD read_edge_list(const std::string &path, const std::optional<EdgeListDescriptor> &desc);

/// Reads an edge list with the descriptor found at descriptor_path(path), if any.
SeriesD read_edge_list(const std::string &path);

std::string format_edge_list(const SeriesD &series);

void write_edge_list(const std::string &path, const SeriesD &series);

nlohmann::json to_json(const ScenarioTruth &truth);
nlohmann::json to_json(const Detection &detection, int split_factor = 1);
nlohmann::json to_json(const ChangePointEstimate &est);

/// Change points from a truth, detection or inference JSON document.
std::vector<int> change_points_from_json(const nlohmann::json &doc);

nlohmann::json read_json(const std::string &path);
void write_text(const std::string &path, const std::string &text);
std::string read_text(const std::string &path);

} // namespace mlcp
