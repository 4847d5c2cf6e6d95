#pragma once

#include "mlcp/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace mlcp {

struct HpcaConfig
{
  int max_iterations = 50;
  double rel_tolerance = 1e-6;

  void validate() const
  {
    if (max_iterations < 1)
      throw std::invalid_argument("hpca max_iterations must be >= 1");
    if (!(rel_tolerance > 0.0))
      throw std::invalid_argument("hpca rel_tolerance must be > 0");
  }
};

struct TuckerRanks
{
  Index r1 = 1;
  Index r2 = 1;
  Index r3 = 1;

  Index operator[](int mode) const
  {
    detail::check_mode(mode);
    return mode == 1 ? r1 : mode == 2 ? r2 : r3;
  }

  void validate_for(const Dims &dims) const
  {
    for (int s = 1; s <= 3; ++s)
      if ((*this)[s] < 1 || (*this)[s] > dims[s - 1])
        throw std::invalid_argument("Tucker rank " + std::to_string((*this)[s]) + " invalid for mode " +
                                    std::to_string(s) + " of size " + std::to_string(dims[s - 1]));
  }

  /// (min(cap, p1), min(cap, p2), p3)
  static TuckerRanks defaults_for(const Dims &dims, Index cap = 15)
  {
    return {std::min(cap, dims[0]), std::min(cap, dims[1]), dims[2]};
  }

  bool operator==(const TuckerRanks &) const = default;
};

template <typename Scalar>
struct HpcaResult
{
  Matrix<Scalar> basis;
  bool rank_deficient = false;
  int iterations = 0;
};

namespace detail {

/// Eigendecomposition of a symmetric matrix, components ordered by signed
/// eigenvalue, largest first. On positive semidefinite limits this is the
/// leading singular subspace.
template <typename Scalar>
struct SymmetricSvd
{
  Vector<Scalar> eigenvalues; // signed, descending
  Matrix<Scalar> vectors;

  explicit SymmetricSvd(const Matrix<Scalar> &m)
  {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("symmetric eigendecomposition failed");
    // the solver returns ascending eigenvalues
    eigenvalues = es.eigenvalues().reverse();
    vectors = es.eigenvectors().rowwise().reverse();
  }

  /// Diagonal of the rank-r truncation Σ_{k<r} λ_k u_k u_kᵀ.
  Vector<Scalar> truncated_diagonal(Index r) const
  {
    const auto u = vectors.leftCols(r);
    return u.cwiseAbs2() * eigenvalues.head(r);
  }
};

/// Whether the p(p-1)/2 off-diagonal entries are at least as many as the
/// degrees of freedom p·r - r(r-1)/2 of a rank-r symmetric matrix.
inline bool off_diagonal_determines_rank(Index p, Index r)
{
  return p * (p - 1) / 2 >= p * r - r * (r - 1) / 2;
}

/// Flip each column so its largest-magnitude entry is positive.
template <typename Scalar>
void fix_signs(Matrix<Scalar> &u)
{
  for (Index c = 0; c < u.cols(); ++c) {
    Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < Scalar(0))
      u.col(c) = -u.col(c);
  }
}

} // namespace detail

/// Heteroskedastic PCA: iterative diagonal deletion and reimputation on a
/// symmetric Gram-type matrix, returning the leading r-dimensional left
/// singular subspace.
template <typename Scalar>
HpcaResult<Scalar> hpca(const Matrix<Scalar> &sigma, Index r, const HpcaConfig &cfg = {})
{
  cfg.validate();
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("hpca: input must be square");
  const Index n = sigma.rows();
  if (r < 1 || r > n)
    throw std::invalid_argument("hpca: rank " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
  if (!sigma.allFinite())
    throw std::invalid_argument("hpca: input has non-finite entries");
  const Scalar scale = std::max(Scalar(1), sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-9) * scale)
    throw std::invalid_argument("hpca: input is not symmetric");

  Matrix<Scalar> work = (sigma + sigma.transpose()) / Scalar(2);
  work.diagonal().setZero();

  HpcaResult<Scalar> result;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const detail::SymmetricSvd<Scalar> svd(work);
    const Vector<Scalar> next = svd.truncated_diagonal(r);
    const Scalar denom = next.norm();
    const Scalar change = (next - work.diagonal()).norm();
    work.diagonal() = next;
    result.iterations = it + 1;
    if (change == Scalar(0) || change < Scalar(cfg.rel_tolerance) * denom)
      break;
  }

  const detail::SymmetricSvd<Scalar> svd(work);
  result.basis = svd.vectors.leftCols(r);
  detail::fix_signs(result.basis);
  const Scalar largest = svd.eigenvalues[0];
  result.rank_deficient = !(largest > Scalar(0)) || svd.eigenvalues[r - 1] < Scalar(1e-12) * largest;
  return result;
}

template <typename Scalar>
struct ThpcaResult
{
  Tensor3<Scalar> estimate;
  bool rank_deficient = false;
};

/// Tensor heteroskedastic PCA with entrywise truncation into [-tau2, tau1].
/// A mode whose rank equals its size is projected with the identity; a mode
/// too small for its off-diagonal Gram entries to pin down a rank-r matrix
/// uses the plain eigendecomposition of the Gram matrix instead of hpca.
template <typename Scalar>
ThpcaResult<Scalar> thpca(const Tensor3<Scalar> &a, const TuckerRanks &ranks, Scalar tau1, Scalar tau2,
                          const HpcaConfig &cfg = {})
{
  ranks.validate_for(a.dims());
  if (std::isnan(tau1) || std::isnan(tau2) || tau1 < Scalar(0) || tau2 < Scalar(0))
    throw std::invalid_argument("thpca: thresholds must be >= 0");

  ThpcaResult<Scalar> out;
  std::array<Matrix<Scalar>, 3> factors;
  std::array<bool, 3> identity{};
  for (int s = 1; s <= 3; ++s) {
    const Index p = a.dim(s);
    if (ranks[s] == p) {
      identity[s - 1] = true;
      continue;
    }
    const Matrix<Scalar> m = matricize(a, s);
    Matrix<Scalar> gram = Matrix<Scalar>::Zero(p, p);
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(m);
    gram.template triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    if (detail::off_diagonal_determines_rank(p, ranks[s])) {
      auto h = hpca<Scalar>(gram, ranks[s], cfg);
      out.rank_deficient = out.rank_deficient || h.rank_deficient;
      factors[s - 1] = std::move(h.basis);
    } else {
      const detail::SymmetricSvd<Scalar> svd(gram);
      Matrix<Scalar> u = svd.vectors.leftCols(ranks[s]);
      detail::fix_signs(u);
      const Scalar largest = svd.eigenvalues[0];
      out.rank_deficient = out.rank_deficient || !(largest > Scalar(0)) ||
                           svd.eigenvalues[ranks[s] - 1] < Scalar(1e-12) * largest;
      factors[s - 1] = std::move(u);
    }
  }

  Tensor3<Scalar> projected = a;
  for (int s = 1; s <= 3; ++s) {
    if (identity[s - 1])
      continue;
    const Matrix<Scalar> &u = factors[s - 1];
    projected = tensorize<Scalar>(u * (u.transpose() * matricize(projected, s)), s, projected.dims());
  }

  projected.vec() = projected.vec().cwiseMax(-tau2).cwiseMin(tau1);
  out.estimate = std::move(projected);
  return out;
}

} // namespace mlcp
