#include "mlcp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mlcp {

namespace {

std::string trim(const std::string &s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string &key, const std::string &value)
{
  const std::string v = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ValidationError("invalid value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string &key, const std::string &value)
{
  std::string v = trim(value);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on")
    return true;
  if (v == "0" || v == "false" || v == "no" || v == "off")
    return false;
  throw ValidationError("invalid boolean '" + value + "' for " + key);
}

std::vector<std::string> split_list(const std::string &value)
{
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty())
      out.push_back(trim(item));
  return out;
}

nlohmann::json interval_json(const Interval &iv) { return nlohmann::json::array({iv.left, iv.right}); }

std::vector<std::string> flag_names(unsigned flags)
{
  std::vector<std::string> out;
  if (flags & kFlagShortWindow)
    out.emplace_back("short_window");
  if (flags & kFlagZeroJump)
    out.emplace_back("zero_jump");
  if (flags & kFlagShortSegment)
    out.emplace_back("short_segment");
  if (flags & kFlagRankDeficient)
    out.emplace_back("rank_deficient");
  return out;
}

} // namespace

void RunConfig::set(const std::string &raw_key, const std::string &value)
{
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "mode")
    mode = trim(value);
  else if (key == "scenario")
    scenario = parse_number<int>(key, value);
  else if (key == "n")
    n = parse_number<int>(key, value);
  else if (key == "T")
    T = parse_number<int>(key, value);
  else if (key == "L")
    L = parse_number<int>(key, value);
  else if (key == "c_tau1")
    detect.c_tau1 = parse_number<double>(key, value);
  else if (key == "c_J")
    detect.c_J = parse_number<double>(key, value);
  else if (key == "threshold")
    detect.threshold_override = parse_number<double>(key, value);
  else if (key == "ranks") {
    const auto parts = split_list(value);
    if (parts.size() != 3)
      throw ValidationError("ranks needs three comma-separated integers");
    detect.ranks = TuckerRanks{parse_number<Index>(key, parts[0]), parse_number<Index>(key, parts[1]),
                               parse_number<Index>(key, parts[2])};
  } else if (key == "hpca_max_iterations")
    detect.hpca.max_iterations = parse_number<int>(key, value);
  else if (key == "hpca_tolerance")
    detect.hpca.rel_tolerance = parse_number<double>(key, value);
  else if (key == "B")
    B = parse_number<int>(key, value);
  else if (key == "M")
    M = parse_number<double>(key, value);
  else if (key == "alpha")
    alpha = parse_number<double>(key, value);
  else if (key == "trials")
    trials = parse_number<int>(key, value);
  else if (key == "seed")
    seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads")
    threads = parse_number<int>(key, value);
  else if (key == "inference")
    inference = parse_bool(key, value);
  else if (key == "split")
    split = parse_bool(key, value);
  else if (key == "timing")
    timing = parse_bool(key, value);
  else if (key == "c_values") {
    c_values.clear();
    for (const auto &p : split_list(value))
      c_values.push_back(parse_number<double>(key, p));
  } else if (key == "input")
    input = trim(value);
  else if (key == "a")
    input_a = trim(value);
  else if (key == "b")
    input_b = trim(value);
  else if (key == "a2")
    input_a2 = trim(value);
  else if (key == "b2")
    input_b2 = trim(value);
  else if (key == "change_points")
    change_points = trim(value);
  else if (key == "truth")
    truth = trim(value);
  else if (key == "output")
    output = trim(value);
  else
    throw ValidationError("unknown configuration key '" + raw_key + "'");
}

void RunConfig::validate() const
{
  static const char *modes[] = {"simulate", "detect", "infer", "benchmark", "sensitivity", "metrics"};
  if (std::find(std::begin(modes), std::end(modes), mode) == std::end(modes))
    throw ValidationError("unknown mode '" + mode + "'");
  if (scenario < 0 || scenario > 4)
    throw ValidationError("scenario must be 0 (null model) or 1..4");
  if (n < 1 || L < 1 || T < 4)
    throw ValidationError("need n >= 1, L >= 1 and T >= 4");
  if (trials < 0)
    throw ValidationError("trials must be >= 0");
  if (threads < 0)
    throw ValidationError("threads must be >= 0");
  if (B < 2)
    throw ValidationError("B must be >= 2");
  if (M < 0.0 || !std::isfinite(M))
    throw ValidationError("M must be > 0 (or 0 for M = T)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  for (double c : c_values)
    if (!(c > 0.0))
      throw ValidationError("c_values must be > 0");
  try {
    detect.validate();
    if (detect.ranks)
      detect.ranks->validate_for(Dims{n, n, L});
  } catch (const std::invalid_argument &e) {
    throw ValidationError(e.what());
  }
}

LimitLawConfig RunConfig::law_config(int horizon, std::uint64_t law_seed) const
{
  LimitLawConfig cfg;
  cfg.draws = B;
  cfg.range = M;
  cfg.horizon = horizon;
  cfg.alpha = alpha;
  cfg.seed = law_seed;
  return cfg;
}

std::map<std::string, std::string> parse_key_values(const std::string &text)
{
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ParseError("line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig load_run_config(const std::string &path, RunConfig base)
{
  for (const auto &[k, v] : parse_key_values(read_text(path)))
    base.set(k, v);
  return base;
}

std::string descriptor_path(const std::string &edge_list_path) { return edge_list_path + ".desc"; }

std::optional<EdgeListDescriptor> read_descriptor(const std::string &path)
{
  if (!std::filesystem::exists(path))
    return std::nullopt;
  EdgeListDescriptor d;
  for (const auto &[k, v] : parse_key_values(read_text(path))) {
    if (k == "n")
      d.n = parse_number<int>(k, v);
    else if (k == "L")
      d.L = parse_number<int>(k, v);
    else if (k == "T")
      d.T = parse_number<int>(k, v);
    else
      throw ParseError(path + ": unknown descriptor key '" + k + "'");
  }
  return d;
}

void write_descriptor(const std::string &path, const EdgeListDescriptor &desc)
{
  write_text(path, "n = " + std::to_string(desc.n) + "\nL = " + std::to_string(desc.L) +
                       "\nT = " + std::to_string(desc.T) + "\n");
}

SeriesD parse_edge_list(const std::string &text, const std::optional<EdgeListDescriptor> &desc)
{
  struct Entry
  {
    long long t, layer, i, j;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty())
      continue;
    if (number == 1 && !std::isdigit(static_cast<unsigned char>(body.front())))
      continue; // header
    const auto parts = split_list(body);
    if (parts.size() != 4)
      throw ParseError("edge list line " + std::to_string(number) + ": expected 4 fields t,layer,i,j");
    long long v[4];
    for (int k = 0; k < 4; ++k) {
      const auto [ptr, ec] = std::from_chars(parts[k].data(), parts[k].data() + parts[k].size(), v[k]);
      if (ec != std::errc() || ptr != parts[k].data() + parts[k].size())
        throw ParseError("edge list line " + std::to_string(number) + ": field '" + parts[k] +
                         "' is not an integer");
      if (v[k] < 1)
        throw ValidationError("edge list line " + std::to_string(number) + ": indices are 1-based");
    }
    entries.push_back({v[0], v[1], v[2], v[3]});
  }

  EdgeListDescriptor d = desc.value_or(EdgeListDescriptor{});
  long long max_t = 0, max_l = 0, max_node = 0;
  for (const auto &e : entries) {
    max_t = std::max(max_t, e.t);
    max_l = std::max(max_l, e.layer);
    max_node = std::max({max_node, e.i, e.j});
  }
  if (d.n == 0)
    d.n = static_cast<int>(max_node);
  if (d.L == 0)
    d.L = static_cast<int>(max_l);
  if (d.T == 0)
    d.T = static_cast<int>(max_t);
  if (d.n < 1 || d.L < 1 || d.T < 2)
    throw ValidationError("edge list: cannot determine n >= 1, L >= 1, T >= 2");
  if (max_node > d.n || max_l > d.L || max_t > d.T)
    throw ValidationError("edge list: index exceeds declared dimensions (n=" + std::to_string(d.n) +
                          ", L=" + std::to_string(d.L) + ", T=" + std::to_string(d.T) + ")");

  SeriesD series(Dims{d.n, d.n, d.L}, d.T);
  for (const auto &e : entries) {
    const Index col = ((e.i - 1) * d.n + (e.j - 1)) * d.L + (e.layer - 1);
    series.rows()(e.t - 1, col) = 1.0;
  }
  return series;
}

SeriesD read_edge_list(const std::string &path, const std::optional<EdgeListDescriptor> &desc)
{
  return parse_edge_list(read_text(path), desc);
}

SeriesD read_edge_list(const std::string &path) { return read_edge_list(path, read_descriptor(descriptor_path(path))); }

std::string format_edge_list(const SeriesD &series)
{
  const auto [n1, n2, L] = series.shape();
  std::string out = "t,layer,i,j\n";
  for (Index t = 1; t <= series.length(); ++t) {
    const auto row = series.row(t);
    for (Index k = 0; k < row.size(); ++k) {
      if (row[k] == 0.0)
        continue;
      if (row[k] != 1.0)
        throw ValidationError("edge lists hold binary series only");
      const Index l = k % L, j = (k / L) % n2, i = k / (L * n2);
      out += std::to_string(t) + ',' + std::to_string(l + 1) + ',' + std::to_string(i + 1) + ',' +
             std::to_string(j + 1) + '\n';
    }
  }
  return out;
}

void write_edge_list(const std::string &path, const SeriesD &series)
{
  const auto &shape = series.shape();
  if (shape[0] != shape[1])
    throw ValidationError("edge lists need square layers");
  write_text(path, format_edge_list(series));
  write_descriptor(descriptor_path(path), {static_cast<int>(shape[0]), static_cast<int>(shape[2]),
                                           static_cast<int>(series.length())});
}

nlohmann::json to_json(const ScenarioTruth &truth)
{
  return {{"scenario", truth.scenario}, {"T", truth.horizon},       {"K", truth.K()},
          {"change_points", truth.change_points}, {"segments", truth.segments}, {"clipped", truth.clipped},
          {"notes", truth.notes}};
}

nlohmann::json to_json(const Detection &d, int split_factor)
{
  auto scale = [split_factor](int t) { return t * split_factor; };
  nlohmann::json stage1 = nlohmann::json::array();
  for (const auto &c : d.stage1.candidates)
    stage1.push_back({{"location", scale(c.location)},
                      {"interval", interval_json(c.seeded)},
                      {"trimmed", interval_json(c.trimmed)},
                      {"score", c.score}});
  nlohmann::json stage2 = nlohmann::json::array();
  std::vector<int> cps;
  for (const auto &r : d.stage2) {
    stage2.push_back({{"candidate", scale(r.candidate)},
                      {"window", nlohmann::json::array({scale(r.window_left), scale(r.window_right)})},
                      {"location", scale(r.location)},
                      {"degenerate", r.degenerate}});
    cps.push_back(scale(r.location));
  }
  return {{"T", d.stage1.horizon * split_factor},
          {"split_factor", split_factor},
          {"threshold", d.stage1.threshold},
          {"stage1", stage1},
          {"refinements", stage2},
          {"change_points", cps}};
}

nlohmann::json to_json(const ChangePointEstimate &est)
{
  const auto &dims = est.psi.dims();
  std::vector<double> psi(est.psi.vec().data(), est.psi.vec().data() + est.psi.size());
  return {{"k", est.k},
          {"candidate", est.candidate},
          {"eta_tilde", est.eta_tilde},
          {"eta_hat", est.eta_hat},
          {"kappa", est.kappa},
          {"sigma_left", est.sigma_left},
          {"sigma_right", est.sigma_right},
          {"ci", nlohmann::json::array({est.ci.lo, est.ci.hi})},
          {"flags", flag_names(est.flags)},
          {"psi", {{"dims", nlohmann::json::array({dims[0], dims[1], dims[2]})}, {"data", psi}}}};
}

std::vector<int> change_points_from_json(const nlohmann::json &doc)
{
  if (doc.is_array())
    return doc.get<std::vector<int>>();
  if (doc.contains("estimates")) {
    std::vector<int> out;
    for (const auto &e : doc.at("estimates"))
      out.push_back(e.at("eta_hat").get<int>());
    return out;
  }
  if (doc.contains("change_points"))
    return doc.at("change_points").get<std::vector<int>>();
  throw ParseError("document holds no change points");
}

nlohmann::json read_json(const std::string &path)
{
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

std::string read_text(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace mlcp
