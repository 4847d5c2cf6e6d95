#include "mlcp/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlcp {

namespace {

enum Purpose : std::uint64_t {
  kLatent = 1,
  kSegment = 2,
  kWeights = 3,
  kSampleA = 4,
  kSampleB = 5,
};

constexpr int kReferenceHorizon = 200;
constexpr int kLatentDim = 5;

double uniform(Engine &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Matrix<double> dirichlet_rows(int n, int d, Engine &rng)
{
  std::gamma_distribution<double> gamma(1.0, 1.0);
  Matrix<double> x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k)
      x(i, k) = gamma(rng);
    x.row(i) /= x.row(i).sum();
  }
  return x;
}

/// Change points of the 200-step reference design rescaled to horizon T.
std::vector<int> rescale(const std::vector<int> &reference, int T)
{
  std::vector<int> out;
  for (int eta : reference) {
    const int v = static_cast<int>(std::lround(static_cast<double>(eta) * T / kReferenceHorizon));
    if (v <= 0 || v >= T || (!out.empty() && v <= out.back()))
      throw std::invalid_argument("horizon T too short for this scenario's change points");
    out.push_back(v);
  }
  return out;
}

int segment_of(const std::vector<int> &cps, int t)
{
  return static_cast<int>(std::lower_bound(cps.begin(), cps.end(), t) - cps.begin());
}

void sample_row_into(const Vector<double> &p, Engine &rng, SeriesD &series, int t)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double *row = series.rows().row(t - 1).data();
  for (Index k = 0; k < p.size(); ++k)
    row[k] = unit(rng) < p[k] ? 1.0 : 0.0;
}

std::size_t clip_unit(Vector<double> &p)
{
  std::size_t clipped = 0;
  for (Index k = 0; k < p.size(); ++k) {
    if (p[k] < 0.0) {
      p[k] = 0.0;
      ++clipped;
    } else if (p[k] > 1.0) {
      p[k] = 1.0;
      ++clipped;
    }
  }
  return clipped;
}

/// Block-model layer description: community label per node, within and
/// between probabilities.
struct SbmLayer
{
  std::vector<int> labels;
  double p_in = 0.0;
  double p_out = 0.0;
};

Vector<double> sbm_probabilities(const std::vector<SbmLayer> &layers, int n)
{
  const auto L = static_cast<Index>(layers.size());
  Vector<double> p(static_cast<Index>(n) * n * L);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (Index l = 0; l < L; ++l) {
        const SbmLayer &layer = layers[static_cast<std::size_t>(l)];
        const bool same = layer.labels[static_cast<std::size_t>(i)] == layer.labels[static_cast<std::size_t>(j)];
        p[(static_cast<Index>(i) * n + j) * L + l] = same ? layer.p_in : layer.p_out;
      }
  return p;
}

std::vector<int> labels_from_sizes(const std::vector<int> &sizes)
{
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[c]), static_cast<int>(c));
  return labels;
}

std::vector<int> even_labels(int n, int communities)
{
  return labels_from_sizes(community_sizes(n, std::vector<double>(static_cast<std::size_t>(communities), 1.0)));
}

/// p_in ~ U((3L+l'-1)/4L, (3L+l')/4L), p_out ~ U((2L+l'-1)/4L, (2L+l')/4L)
/// with l' = L+1-l when the layer order is reversed.
void draw_standard_sbm_probabilities(std::vector<SbmLayer> &layers, bool reversed, Engine &rng)
{
  const int L = static_cast<int>(layers.size());
  const double q = 4.0 * L;
  for (int l = 1; l <= L; ++l) {
    const int lp = reversed ? L + 1 - l : l;
    SbmLayer &layer = layers[static_cast<std::size_t>(l - 1)];
    layer.p_in = uniform(rng, (3.0 * L + lp - 1) / q, (3.0 * L + lp) / q);
    layer.p_out = uniform(rng, (2.0 * L + lp - 1) / q, (2.0 * L + lp) / q);
  }
}

std::string describe_sbm(const std::vector<SbmLayer> &layers)
{
  std::ostringstream os;
  os.precision(4);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &layer = layers[l];
    const int communities = layer.labels.empty() ? 0 : *std::max_element(layer.labels.begin(), layer.labels.end()) + 1;
    os << (l ? "; " : "") << "layer " << l + 1 << ": C=" << communities << " p_in=" << layer.p_in
       << " p_out=" << layer.p_out;
  }
  return os.str();
}

/// Samples both series from a per-segment probability vector.
ScenarioData sample_piecewise(const ScenarioSize &size, std::uint64_t seed, const std::vector<int> &cps,
                              const std::vector<Vector<double>> &segment_p)
{
  const Dims shape{size.n, size.n, size.L};
  ScenarioData data{SeriesD(shape, size.T), SeriesD(shape, size.T), {}};
  for (int t = 1; t <= size.T; ++t) {
    const Vector<double> &p = segment_p[static_cast<std::size_t>(segment_of(cps, t))];
    Engine rng_a(derive_seed(seed, {kSampleA, static_cast<std::uint64_t>(t)}));
    Engine rng_b(derive_seed(seed, {kSampleB, static_cast<std::uint64_t>(t)}));
    sample_row_into(p, rng_a, data.a, t);
    sample_row_into(p, rng_b, data.b, t);
  }
  return data;
}

ScenarioData scenario_dirichlet(const ScenarioSize &size, std::uint64_t seed)
{
  const std::vector<int> cps = rescale({70, 140}, size.T);
  const int n = size.n, L = size.L, d = kLatentDim;
  Engine latent(derive_seed(seed, {kLatent}));
  const Matrix<double> x = dirichlet_rows(n, d, latent);
  const Matrix<double> y = dirichlet_rows(n, d, latent);

  const Dims shape{n, n, L};
  ScenarioData data{SeriesD(shape, size.T), SeriesD(shape, size.T), {}};
  std::size_t clipped = 0;
  const double q = 4.0 * L;
  for (int t = 1; t <= size.T; ++t) {
    const bool middle = segment_of(cps, t) == 1;
    const double rho = middle ? 3.0 : 2.0;
    Engine rng_w(derive_seed(seed, {kWeights, static_cast<std::uint64_t>(t)}));
    MrdpgParams params{x, y, {}};
    for (int l = 1; l <= L; ++l) {
      const int lp = middle ? L + 1 - l : l;
      Matrix<double> w(d, d);
      for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v)
          w(u, v) = uniform(rng_w, (rho * L + lp) / q, (rho * L + lp + 1) / q);
      params.w.push_back(std::move(w));
    }
    ProbabilityTensor p = probability_tensor(params);
    clipped += p.clipped;
    Engine rng_a(derive_seed(seed, {kSampleA, static_cast<std::uint64_t>(t)}));
    Engine rng_b(derive_seed(seed, {kSampleB, static_cast<std::uint64_t>(t)}));
    sample_row_into(p.p.vec(), rng_a, data.a, t);
    sample_row_into(p.p.vec(), rng_b, data.b, t);
  }
  data.truth.change_points = cps;
  data.truth.segments = {"rho=2", "rho=3, reversed layers", "rho=2"};
  data.truth.clipped = clipped;
  if (clipped > 0)
    data.truth.notes.push_back(std::to_string(clipped) + " probabilities clipped into [0, 1]");
  return data;
}

ScenarioData scenario_sbm(int id, const ScenarioSize &size, std::uint64_t seed)
{
  const int n = size.n, L = size.L;
  std::vector<int> reference;
  std::vector<std::vector<SbmLayer>> segments;
  std::vector<std::string> notes;

  auto equal_layers = [&](int communities) {
    return std::vector<SbmLayer>(static_cast<std::size_t>(L), SbmLayer{even_labels(n, communities), 0.0, 0.0});
  };

  if (id == 2) {
    reference = {20, 60, 80, 160, 180};
    const int communities[] = {4, 2, 4, 4, 3, 4};
    for (int g = 0; g < 6; ++g) {
      auto layers = equal_layers(communities[g]);
      Engine rng(derive_seed(seed, {kSegment, static_cast<std::uint64_t>(g)}));
      draw_standard_sbm_probabilities(layers, g == 3, rng);
      segments.push_back(std::move(layers));
    }
  } else if (id == 3) {
    reference = {50, 100, 150};
    const std::vector<std::vector<double>> first_layer = {
        {0.3, 0.4, 0.3}, {0.4, 0.3, 0.3}, {0.5, 0.3, 0.2}, {0.3, 0.4, 0.3}};
    // connection probabilities are shared by all segments; only the first
    // layer's community sizes move
    auto base = equal_layers(3);
    Engine rng(derive_seed(seed, {kSegment, 0}));
    draw_standard_sbm_probabilities(base, false, rng);
    for (const auto &fractions : first_layer) {
      const std::vector<int> sizes = community_sizes(n, fractions);
      auto layers = base;
      layers[0].labels = labels_from_sizes(sizes);
      segments.push_back(std::move(layers));
    }
  } else {
    reference = {20, 60, 80, 160, 180};
    const int delta[] = {0, 1, 2, 1, 0, 1};
    const double eps = 0.1;
    for (int g = 0; g < 6; ++g) {
      auto layers = equal_layers(4);
      Engine rng(derive_seed(seed, {kSegment, static_cast<std::uint64_t>(g)}));
      const double shift = delta[g] * eps;
      for (auto &layer : layers) {
        layer.p_in = uniform(rng, 0.5 * (0.21 + shift), 0.5 * (0.25 + shift));
        layer.p_out = uniform(rng, 0.21 + shift, 0.25 + shift);
      }
      segments.push_back(std::move(layers));
    }
  }

  const std::vector<int> cps = rescale(reference, size.T);
  std::vector<Vector<double>> probs;
  ScenarioTruth truth;
  for (const auto &layers : segments) {
    probs.push_back(sbm_probabilities(layers, n));
    truth.segments.push_back(describe_sbm(layers));
  }
  ScenarioData data = sample_piecewise(size, seed, cps, probs);
  truth.change_points = cps;
  truth.notes = std::move(notes);
  data.truth = std::move(truth);
  return data;
}

} // namespace

void ScenarioSize::validate() const
{
  if (n < 1 || L < 1)
    throw std::invalid_argument("scenario needs n >= 1 and L >= 1");
  if (T < 2)
    throw std::invalid_argument("scenario needs T >= 2");
}

std::vector<int> community_sizes(int n, const std::vector<double> &fractions)
{
  if (n < 0 || fractions.empty())
    throw std::invalid_argument("community_sizes: need n >= 0 and at least one community");
  const double total = std::accumulate(fractions.begin(), fractions.end(), 0.0);
  if (!(total > 0.0))
    throw std::invalid_argument("community_sizes: fractions must sum to a positive value");
  std::vector<int> sizes(fractions.size());
  std::vector<double> remainder(fractions.size());
  int assigned = 0;
  for (std::size_t c = 0; c < fractions.size(); ++c) {
    if (fractions[c] < 0.0)
      throw std::invalid_argument("community_sizes: negative fraction");
    const double exact = n * fractions[c] / total;
    sizes[c] = static_cast<int>(std::floor(exact + 1e-9));
    remainder[c] = exact - sizes[c];
    assigned += sizes[c];
  }
  std::vector<std::size_t> order(fractions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned)
    ++sizes[order[k % order.size()]];
  return sizes;
}

ProbabilityTensor probability_tensor(const MrdpgParams &params)
{
  const Matrix<double> &x = params.x;
  const Matrix<double> &y = params.y ? *params.y : params.x;
  if (x.rows() < 1 || x.cols() < 1 || params.w.empty())
    throw std::invalid_argument("probability_tensor: need n >= 1, d >= 1, L >= 1");
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw std::invalid_argument("probability_tensor: latent position shapes differ");
  const Index n = x.rows();
  const Index L = static_cast<Index>(params.w.size());
  ProbabilityTensor out{Tensor3d(n, n, L), 0};
  for (Index l = 0; l < L; ++l) {
    const Matrix<double> &w = params.w[static_cast<std::size_t>(l)];
    if (w.rows() != x.cols() || w.cols() != x.cols())
      throw std::invalid_argument("probability_tensor: weight matrix must be d x d");
    const Matrix<double> layer = x * w * y.transpose();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        out.p(i, j, l) = layer(i, j);
  }
  out.clipped = clip_unit(out.p.vec());
  return out;
}

Tensor3d sample_bernoulli(const Tensor3d &p, Engine &rng, bool symmetric)
{
  if (p.vec().minCoeff() < 0.0 || p.vec().maxCoeff() > 1.0)
    throw std::invalid_argument("sample_bernoulli: probabilities must lie in [0, 1]");
  const auto [n1, n2, L] = p.dims();
  Tensor3d a(p.dims());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!symmetric) {
    for (Index k = 0; k < p.size(); ++k)
      a.vec()[k] = unit(rng) < p.vec()[k] ? 1.0 : 0.0;
    return a;
  }
  if (n1 != n2)
    throw std::invalid_argument("sample_bernoulli: symmetric sampling needs square layers");
  for (Index l = 0; l < L; ++l)
    for (Index i = 0; i < n1; ++i)
      for (Index j = i; j < n2; ++j) {
        const double v = unit(rng) < p(i, j, l) ? 1.0 : 0.0;
        a(i, j, l) = v;
        a(j, i, l) = v;
      }
  return a;
}

Tensor3d sample_mrdpg(const MrdpgParams &params, std::uint64_t seed)
{
  const ProbabilityTensor p = probability_tensor(params);
  Engine rng(seed);
  return sample_bernoulli(p.p, rng, !params.y.has_value());
}

ScenarioData gen_scenario(int id, const ScenarioSize &size, std::uint64_t seed)
{
  size.validate();
  if (id < 1 || id > 4)
    throw std::invalid_argument("scenario id must be 1, 2, 3 or 4");
  ScenarioData data = id == 1 ? scenario_dirichlet(size, seed) : scenario_sbm(id, size, seed);
  data.truth.scenario = id;
  data.truth.horizon = size.T;
  return data;
}

ScenarioData gen_null_msbm(const ScenarioSize &size, std::uint64_t seed)
{
  size.validate();
  std::vector<SbmLayer> layers(static_cast<std::size_t>(size.L), SbmLayer{even_labels(size.n, 4), 0.0, 0.0});
  Engine rng(derive_seed(seed, {kSegment, 0}));
  draw_standard_sbm_probabilities(layers, false, rng);
  ScenarioData data = sample_piecewise(size, seed, {}, {sbm_probabilities(layers, size.n)});
  data.truth.scenario = 0;
  data.truth.horizon = size.T;
  data.truth.segments = {describe_sbm(layers)};
  return data;
}

} // namespace mlcp
