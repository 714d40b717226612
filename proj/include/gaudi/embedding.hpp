#pragma once

// Dimension-checked vector math for cross-modal embeddings.
//
// Every reduction here accumulates in double precision and sums strictly in
// index order, so a score is a pure function of its inputs: the same two
// vectors give bit-identical results on every run and in either argument
// order. Storage scalars (float on disk, double in memory) are upcast before
// the multiply.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>

#include "gaudi/error.hpp"

namespace gaudi {

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Norms below this are treated as the zero vector.
inline constexpr double kZeroNormThreshold = 1e-12;

/// A validated embedding: dim >= 1 and every component finite.
template <typename Scalar>
class BasicEmbedding {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  using scalar_type = Scalar;
  using vector_type = DenseVector<Scalar>;

  explicit BasicEmbedding(vector_type values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw Error(ErrorCode::InvalidInput, "embedding must have dim >= 1");
    }
    if (!values_.allFinite()) {
      throw Error(ErrorCode::InvalidInput, "embedding has non-finite values");
    }
  }

  BasicEmbedding(std::initializer_list<Scalar> values)
      : BasicEmbedding(from_span(std::span<const Scalar>(values.begin(), values.size()))) {}

  template <typename Other>
  static BasicEmbedding from_span(std::span<const Other> values) {
    vector_type v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(values[i]);
    }
    return BasicEmbedding(std::move(v));
  }

  Eigen::Index dim() const noexcept { return values_.size(); }
  const vector_type& values() const noexcept { return values_; }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }

  template <typename Other>
  BasicEmbedding<Other> cast() const {
    return BasicEmbedding<Other>(values_.template cast<Other>());
  }

  friend bool operator==(const BasicEmbedding& a, const BasicEmbedding& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  vector_type values_;
};

using Embedding = BasicEmbedding<double>;

/// Dot product accumulated in double, summed in index order.
template <typename DerivedA, typename DerivedB>
double ordered_dot(const Eigen::MatrixBase<DerivedA>& a,
                   const Eigen::MatrixBase<DerivedB>& b) {
  eigen_assert(a.size() == b.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a.coeff(i)) * static_cast<double>(b.coeff(i));
  }
  return sum;
}

template <typename Derived>
double ordered_norm(const Eigen::MatrixBase<Derived>& v) {
  return std::sqrt(ordered_dot(v, v));
}

template <typename Scalar>
double norm(const BasicEmbedding<Scalar>& v) {
  return ordered_norm(v.values());
}

namespace detail {
void throw_dimension_mismatch(Eigen::Index a, Eigen::Index b);
void throw_zero_vector();
}  // namespace detail

/// Cosine similarity, clamped to [-1, 1].
template <typename Scalar>
double cosine(const BasicEmbedding<Scalar>& u, const BasicEmbedding<Scalar>& v) {
  if (u.dim() != v.dim()) detail::throw_dimension_mismatch(u.dim(), v.dim());
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu < kZeroNormThreshold || nv < kZeroNormThreshold) detail::throw_zero_vector();
  const double c = ordered_dot(u.values(), v.values()) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

template <typename Scalar>
BasicEmbedding<Scalar> l2_normalize(const BasicEmbedding<Scalar>& v) {
  const double n = norm(v);
  if (n < kZeroNormThreshold) detail::throw_zero_vector();
  DenseVector<Scalar> out(v.dim());
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    out[i] = static_cast<Scalar>(static_cast<double>(v[i]) / n);
  }
  return BasicEmbedding<Scalar>(std::move(out));
}

/// u followed by v (the ⊕ operator).
template <typename Scalar>
BasicEmbedding<Scalar> concat(const BasicEmbedding<Scalar>& u,
                              const BasicEmbedding<Scalar>& v) {
  DenseVector<Scalar> out(u.dim() + v.dim());
  out << u.values(), v.values();
  return BasicEmbedding<Scalar>(std::move(out));
}

/// The extended embedding v ⊕ v used to score images against composed queries.
template <typename Scalar>
BasicEmbedding<Scalar> extend(const BasicEmbedding<Scalar>& v) {
  return concat(v, v);
}

template <typename Scalar>
BasicEmbedding<Scalar> scaled(const BasicEmbedding<Scalar>& v, Scalar alpha) {
  return BasicEmbedding<Scalar>(v.values() * alpha);
}

}  // namespace gaudi
