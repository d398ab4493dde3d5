#pragma once

// Circulant products and cyclic shifts on one-period vectors.
//
// H_v is never materialised: H_v w is the cyclic convolution
//   (H_v w)_t = sum_j v_{(t - j) mod n} w_j,
// and Q^k is the back shift (Q^k w)_t = w_{(t - k) mod n}.

#include <Eigen/Core>

#include <type_traits>

#include "relayosc/errors.hpp"

namespace relayosc {

template <typename DerivedV, typename DerivedW>
auto circulant_apply(const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = std::common_type_t<typename DerivedV::Scalar, typename DerivedW::Scalar>;
  if (v.size() != w.size()) throw InvalidInput("circulant operands differ in length");
  const Eigen::Index n = v.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    Scalar acc(0);
    for (Eigen::Index j = 0; j <= t; ++j) acc += Scalar(v(t - j)) * Scalar(w(j));
    for (Eigen::Index j = t + 1; j < n; ++j) acc += Scalar(v(t - j + n)) * Scalar(w(j));
    out(t) = acc;
  }
  return out;
}

inline Eigen::Index wrap_index(long long k, Eigen::Index n) {
  const long long r = k % static_cast<long long>(n);
  return static_cast<Eigen::Index>(r < 0 ? r + n : r);
}

/// Q_n^k w. Any integer k is accepted; Q_n^n is the identity.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> cyclic_shift(
    const Eigen::MatrixBase<Derived>& w, long long k) {
  const Eigen::Index n = w.size();
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n);
  if (n == 0) return out;
  const Eigen::Index s = wrap_index(k, n);
  out.tail(n - s) = w.head(n - s);
  out.head(s) = w.tail(s);
  return out;
}

}  // namespace relayosc
