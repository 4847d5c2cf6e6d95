#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcp {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Dims = std::array<Index, 3>;

namespace detail {

inline void check_mode(int mode)
{
  if (mode < 1 || mode > 3)
    throw std::invalid_argument("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
}

inline void check_dims(const Dims &dims)
{
  for (Index d : dims)
    if (d <= 0)
      throw std::invalid_argument("tensor dimensions must be positive");
}

} // namespace detail

/// Dense order-3 tensor with row-major (i, j, l) storage.
///
/// Entry access through operator() is 0-based. The flat storage is exposed
/// through vec() so whole-tensor arithmetic can be written as Eigen
/// expressions.
template <typename Scalar = double>
class Tensor3
{
public:
  using Storage = Vector<Scalar>;

  Tensor3() = default;

  Tensor3(Index p1, Index p2, Index p3) : Tensor3(Dims{p1, p2, p3}) {}

  explicit Tensor3(const Dims &dims) : dims_(dims)
  {
    detail::check_dims(dims_);
    data_ = Storage::Zero(dims_[0] * dims_[1] * dims_[2]);
  }

  Tensor3(const Dims &dims, Storage data) : dims_(dims), data_(std::move(data))
  {
    detail::check_dims(dims_);
    if (data_.size() != dims_[0] * dims_[1] * dims_[2])
      throw std::invalid_argument("tensor data length does not match dimensions");
  }

  static Tensor3 Zero(const Dims &dims) { return Tensor3(dims); }

  static Tensor3 Constant(const Dims &dims, Scalar value)
  {
    Tensor3 t(dims);
    t.data_.setConstant(value);
    return t;
  }

  static Tensor3 Ones(const Dims &dims) { return Constant(dims, Scalar(1)); }

  const Dims &dims() const { return dims_; }

  /// Size along a 1-based mode.
  Index dim(int mode) const
  {
    detail::check_mode(mode);
    return dims_[mode - 1];
  }

  Index size() const { return data_.size(); }

  Scalar &operator()(Index i, Index j, Index l) { return data_[offset(i, j, l)]; }
  Scalar operator()(Index i, Index j, Index l) const { return data_[offset(i, j, l)]; }

  Storage &vec() { return data_; }
  const Storage &vec() const { return data_; }

  bool same_shape(const Tensor3 &other) const { return dims_ == other.dims_; }

  bool all_finite() const { return data_.allFinite(); }

  Tensor3 &operator+=(const Tensor3 &o)
  {
    require_same_shape(o);
    data_ += o.data_;
    return *this;
  }
  Tensor3 &operator-=(const Tensor3 &o)
  {
    require_same_shape(o);
    data_ -= o.data_;
    return *this;
  }
  Tensor3 &operator*=(Scalar c)
  {
    data_ *= c;
    return *this;
  }
  Tensor3 &operator/=(Scalar c)
  {
    data_ /= c;
    return *this;
  }

  void require_same_shape(const Tensor3 &o) const
  {
    if (!same_shape(o))
      throw std::invalid_argument("tensor shape mismatch");
  }

private:
  Index offset(Index i, Index j, Index l) const { return (i * dims_[1] + j) * dims_[2] + l; }

  Dims dims_{1, 1, 1};
  Storage data_ = Storage::Zero(1);
};

using Tensor3d = Tensor3<double>;

template <typename Scalar>
Tensor3<Scalar> operator+(Tensor3<Scalar> a, const Tensor3<Scalar> &b)
{
  return a += b;
}

template <typename Scalar>
Tensor3<Scalar> operator-(Tensor3<Scalar> a, const Tensor3<Scalar> &b)
{
  return a -= b;
}

template <typename Scalar>
Tensor3<Scalar> operator*(Scalar c, Tensor3<Scalar> a)
{
  return a *= c;
}

template <typename Scalar>
Scalar inner(const Tensor3<Scalar> &a, const Tensor3<Scalar> &b)
{
  a.require_same_shape(b);
  return a.vec().dot(b.vec());
}

template <typename Scalar>
Scalar frob_norm(const Tensor3<Scalar> &a)
{
  return a.vec().norm();
}

/// Mode-s unfolding. Column indices follow the cyclic convention:
/// mode 1 uses (j, l), mode 2 uses (l, i), mode 3 uses (i, j), with the
/// second index varying fastest.
template <typename Scalar>
Matrix<Scalar> matricize(const Tensor3<Scalar> &t, int mode)
{
  detail::check_mode(mode);
  const auto [p1, p2, p3] = t.dims();
  const Scalar *src = t.vec().data();
  switch (mode) {
  case 1:
    return Eigen::Map<const RowMatrix<Scalar>>(src, p1, p2 * p3);
  case 3:
    return Eigen::Map<const RowMatrix<Scalar>>(src, p1 * p2, p3).transpose();
  default: {
    Matrix<Scalar> m(p2, p3 * p1);
    for (Index i = 0; i < p1; ++i)
      for (Index j = 0; j < p2; ++j)
        for (Index l = 0; l < p3; ++l)
          m(j, l * p1 + i) = t(i, j, l);
    return m;
  }
  }
}

/// Inverse of matricize for the given target dimensions.
template <typename Scalar>
Tensor3<Scalar> tensorize(const Matrix<Scalar> &m, int mode, const Dims &dims)
{
  detail::check_mode(mode);
  detail::check_dims(dims);
  const auto [p1, p2, p3] = dims;
  const Index rows = dims[mode - 1];
  if (m.rows() != rows || m.cols() * rows != p1 * p2 * p3)
    throw std::invalid_argument("matrix shape does not match tensor dimensions for this mode");

  Tensor3<Scalar> t(dims);
  switch (mode) {
  case 1:
    Eigen::Map<RowMatrix<Scalar>>(t.vec().data(), p1, p2 * p3) = m;
    break;
  case 3:
    Eigen::Map<RowMatrix<Scalar>>(t.vec().data(), p1 * p2, p3) = m.transpose();
    break;
  default:
    for (Index i = 0; i < p1; ++i)
      for (Index j = 0; j < p2; ++j)
        for (Index l = 0; l < p3; ++l)
          t(i, j, l) = m(j, l * p1 + i);
  }
  return t;
}

/// Marginal multiplication t ×_mode m: contracts the mode index against the
/// columns of m, replacing that dimension by m.rows().
template <typename Scalar>
Tensor3<Scalar> mode_multiply(const Tensor3<Scalar> &t, const Matrix<Scalar> &m, int mode)
{
  detail::check_mode(mode);
  if (m.cols() != t.dim(mode))
    throw std::invalid_argument("mode_multiply: matrix columns do not match tensor mode size");
  Dims out = t.dims();
  out[mode - 1] = m.rows();
  return tensorize<Scalar>(m * matricize(t, mode), mode, out);
}

/// a ×₁ u1u1ᵀ ×₂ u2u2ᵀ ×₃ u3u3ᵀ. Each u_s is expected to have orthonormal
/// columns.
template <typename Scalar>
Tensor3<Scalar> project_tucker(const Tensor3<Scalar> &a, const Matrix<Scalar> &u1,
                               const Matrix<Scalar> &u2, const Matrix<Scalar> &u3)
{
  const std::array<const Matrix<Scalar> *, 3> us{&u1, &u2, &u3};
  for (int s = 0; s < 3; ++s)
    if (us[s]->rows() != a.dims()[s] || us[s]->cols() < 1 || us[s]->cols() > us[s]->rows())
      throw std::invalid_argument("project_tucker: factor " + std::to_string(s + 1) +
                                  " does not conform to the tensor");
  Tensor3<Scalar> out = a;
  for (int s = 0; s < 3; ++s) {
    const Matrix<Scalar> &u = *us[s];
    // u (uᵀ M_s) keeps the intermediate at rank size
    out = tensorize<Scalar>(u * (u.transpose() * matricize(out, s + 1)), s + 1, out.dims());
  }
  return out;
}

/// Time-indexed sequence of equally shaped tensors. Snapshot t (1-based) is
/// stored flattened as row t-1 of a T × (p1·p2·p3) matrix.
template <typename Scalar = double>
class TensorSeries
{
public:
  using Rows = RowMatrix<Scalar>;

  TensorSeries() = default;

  TensorSeries(const Dims &shape, Index length) : shape_(shape)
  {
    detail::check_dims(shape_);
    if (length < 2)
      throw std::invalid_argument("tensor series needs at least 2 snapshots");
    rows_ = Rows::Zero(length, shape_[0] * shape_[1] * shape_[2]);
  }

  TensorSeries(const Dims &shape, Rows rows) : shape_(shape), rows_(std::move(rows))
  {
    detail::check_dims(shape_);
    if (rows_.rows() < 2)
      throw std::invalid_argument("tensor series needs at least 2 snapshots");
    if (rows_.cols() != shape_[0] * shape_[1] * shape_[2])
      throw std::invalid_argument("tensor series row width does not match shape");
  }

  explicit TensorSeries(const std::vector<Tensor3<Scalar>> &snapshots)
  {
    if (snapshots.size() < 2)
      throw std::invalid_argument("tensor series needs at least 2 snapshots");
    shape_ = snapshots.front().dims();
    rows_.resize(static_cast<Index>(snapshots.size()), snapshots.front().size());
    for (std::size_t t = 0; t < snapshots.size(); ++t) {
      if (snapshots[t].dims() != shape_)
        throw std::invalid_argument("all snapshots of a series must share one shape");
      rows_.row(static_cast<Index>(t)) = snapshots[t].vec().transpose();
    }
  }

  const Dims &shape() const { return shape_; }
  Index length() const { return rows_.rows(); }
  Index width() const { return rows_.cols(); }

  /// Snapshot at 1-based time t, copied out.
  Tensor3<Scalar> snapshot(Index t) const
  {
    check_time(t);
    return Tensor3<Scalar>(shape_, rows_.row(t - 1).transpose());
  }

  void set_snapshot(Index t, const Tensor3<Scalar> &x)
  {
    check_time(t);
    if (x.dims() != shape_)
      throw std::invalid_argument("snapshot shape does not match series shape");
    rows_.row(t - 1) = x.vec().transpose();
  }

  auto row(Index t) { return rows_.row(t - 1); }
  auto row(Index t) const { return rows_.row(t - 1); }

  /// Snapshots s+1..e as a block of rows.
  auto block(Index s, Index e) const { return rows_.middleRows(s, e - s); }

  Rows &rows() { return rows_; }
  const Rows &rows() const { return rows_; }

  bool conforms(const TensorSeries &o) const { return shape_ == o.shape_ && length() == o.length(); }

  void check_time(Index t) const
  {
    if (t < 1 || t > length())
      throw std::out_of_range("time index " + std::to_string(t) + " outside [1, " +
                              std::to_string(length()) + "]");
  }

private:
  Dims shape_{1, 1, 1};
  Rows rows_;
};

using SeriesD = TensorSeries<double>;

} // namespace mlcp
