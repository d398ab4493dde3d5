#pragma once

// Sign-variation counts on finite vectors.
//
// All functions accept any Eigen column expression, integer or floating. Sign
// patterns are carried as VectorXi with entries in {-1, 0, +1}; amplitudes as
// VectorXd. Indices are 0-based throughout: entry i here is entry i+1 in the
// usual 1-based notation.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "relayosc/errors.hpp"

namespace relayosc {

using Index = Eigen::Index;
using RealVector = Eigen::VectorXd;
using SignVector = Eigen::VectorXi;

enum class VariationKind { Minus, Plus };

struct SignCounts {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;

  Index total() const { return positive + negative + zero; }
  bool balanced() const { return positive == negative; }
  friend bool operator==(const SignCounts&, const SignCounts&) = default;
};

namespace detail {

template <typename Scalar>
int sign_of(Scalar x) {
  return (Scalar(0) < x) - (x < Scalar(0));
}

template <typename Scalar>
int sign_of(Scalar x, Scalar zero_tol) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    if (std::abs(x) <= zero_tol) return 0;
  } else {
    if (x <= zero_tol && -x <= zero_tol) return 0;
  }
  return sign_of(x);
}

inline constexpr int kUnreached = std::numeric_limits<int>::min() / 4;

}  // namespace detail

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v) {
  if constexpr (std::is_floating_point_v<typename Derived::Scalar>) {
    if (!v.allFinite()) throw InvalidInput("vector has a non-finite entry");
  }
}

template <typename Derived>
void require_nonempty(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() < 1) throw InvalidInput("vector must have at least one entry");
}

/// Entrywise sign; entries with |x| <= zero_tol map to 0.
template <typename Derived>
SignVector signs(const Eigen::MatrixBase<Derived>& v,
                 typename Derived::Scalar zero_tol = 0) {
  require_finite(v);
  SignVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = detail::sign_of(v(i), zero_tol);
  return out;
}

template <typename Derived>
SignCounts count_signs(const Eigen::MatrixBase<Derived>& v,
                       typename Derived::Scalar zero_tol = 0) {
  if (zero_tol < 0) throw InvalidInput("zero tolerance must be nonnegative");
  require_finite(v);
  SignCounts c;
  for (Index i = 0; i < v.size(); ++i) {
    switch (detail::sign_of(v(i), zero_tol)) {
      case 1: ++c.positive; break;
      case -1: ++c.negative; break;
      default: ++c.zero; break;
    }
  }
  return c;
}

/// Suggested zero tolerance for floating data: 1e-9 * max|v|.
template <typename Derived>
double default_zero_tol(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return 0.0;
  return 1e-9 * static_cast<double>(v.cwiseAbs().maxCoeff());
}

/// S⁻(v): zeros deleted, adjacent sign flips counted. The zero vector gives -1.
template <typename Derived>
int sign_changes(const Eigen::MatrixBase<Derived>& v) {
  require_finite(v);
  int changes = -1;
  int last = 0;
  for (Index i = 0; i < v.size(); ++i) {
    const int s = detail::sign_of(v(i));
    if (s == 0) continue;
    if (last == 0)
      changes = 0;
    else if (s != last)
      ++changes;
    last = s;
  }
  return changes;
}

/// S⁺(v): the largest S⁻ obtainable by replacing every zero with ±1.
///
/// Evaluated as a two-state scan (best count so far ending in +, ending in -),
/// which is exactly the maximum over all 2^z substitutions.
template <typename Derived>
int sign_changes_max(const Eigen::MatrixBase<Derived>& v) {
  require_nonempty(v);
  require_finite(v);
  using detail::kUnreached;
  int end_pos = kUnreached;
  int end_neg = kUnreached;
  for (Index i = 0; i < v.size(); ++i) {
    const int s = detail::sign_of(v(i));
    if (i == 0) {
      end_pos = s >= 0 ? 0 : kUnreached;
      end_neg = s <= 0 ? 0 : kUnreached;
      continue;
    }
    const int next_pos = s >= 0 ? std::max(end_pos, end_neg + 1) : kUnreached;
    const int next_neg = s <= 0 ? std::max(end_neg, end_pos + 1) : kUnreached;
    end_pos = next_pos;
    end_neg = next_neg;
  }
  return std::max(end_pos, end_neg);
}

namespace detail {

template <typename Derived>
int cyclic_minus(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index n = v.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> wrapped(n + 1);
  int best = -1;
  for (Index i = 0; i < n; ++i) {
    // [v_i, ..., v_{n-1}, v_0, ..., v_i]
    wrapped.head(n - i) = v.tail(n - i);
    wrapped.segment(n - i, i + 1) = v.head(i + 1);
    best = std::max(best, sign_changes(wrapped));
  }
  return best;
}

// Each zero is substituted once, so the entry repeated at both ends of a
// rotation keeps a single value. The closed walk then counts every cyclic
// neighbour pair, which is what the scan below maximises.
template <typename Derived>
int cyclic_plus(const Eigen::MatrixBase<Derived>& v) {
  const Index n = v.size();
  int best = kUnreached;
  for (int start : {1, -1}) {
    const int s0 = sign_of(v(0));
    if (s0 != 0 && s0 != start) continue;
    int end_pos = start == 1 ? 0 : kUnreached;
    int end_neg = start == -1 ? 0 : kUnreached;
    for (Index i = 1; i < n; ++i) {
      const int s = sign_of(v(i));
      const int next_pos = s >= 0 ? std::max(end_pos, end_neg + 1) : kUnreached;
      const int next_neg = s <= 0 ? std::max(end_neg, end_pos + 1) : kUnreached;
      end_pos = next_pos;
      end_neg = next_neg;
    }
    const int closed = start == 1 ? std::max(end_pos, end_neg + 1)
                                  : std::max(end_neg, end_pos + 1);
    best = std::max(best, closed);
  }
  return best;
}

}  // namespace detail

/// Cyclic variation S_c⁻ or S_c⁺: the supremum of the (minus or plus)
/// variation over the n wrapped rotations [v_i, ..., v_{n-1}, v_0, ..., v_i].
template <typename Derived>
int cyclic_variation(const Eigen::MatrixBase<Derived>& v, VariationKind kind) {
  require_nonempty(v);
  require_finite(v);
  return kind == VariationKind::Minus ? detail::cyclic_minus(v) : detail::cyclic_plus(v);
}

/// Cyclic forward difference [v_1 - v_0, ..., v_0 - v_{n-1}].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> cyclic_diff(
    const Eigen::MatrixBase<Derived>& v) {
  require_nonempty(v);
  const Index n = v.size();
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> d(n);
  for (Index i = 0; i < n; ++i) d(i) = v((i + 1) % n) - v(i);
  return d;
}

/// Periodic unimodality in the strong form used for oscillation candidates:
/// S_c⁻(Δ_c u) = 2 and S_c⁺(u) = 2. Entries (and differences) within zero_tol
/// of zero are treated as zeros.
template <typename Derived>
bool satisfies_assumption2(const Eigen::MatrixBase<Derived>& u,
                           typename Derived::Scalar zero_tol = 0) {
  if (u.size() <= 1) throw PreconditionError("periodic unimodality needs period > 1");
  const SignVector diff_signs = signs(cyclic_diff(u), zero_tol);
  if (cyclic_variation(diff_signs, VariationKind::Minus) != 2) return false;
  return cyclic_variation(signs(u, zero_tol), VariationKind::Plus) == 2;
}

/// Sufficient conditions for H_v to keep S_c⁻(Δ_c ·) <= 2: S_c⁻(Δ_c v) <= 2 and
/// (Δ_c v_t)^2 >= Δ_c v_{t-1} Δ_c v_{t+1} for every t (indices mod n). n > 3.
template <typename Derived>
bool check_lemma4_conditions(const Eigen::MatrixBase<Derived>& v) {
  const Index n = v.size();
  if (n <= 3) throw PreconditionError("minor conditions are stated for length > 3");
  require_finite(v);
  const auto d = cyclic_diff(v);
  if (cyclic_variation(d, VariationKind::Minus) > 2) return false;
  for (Index t = 0; t < n; ++t) {
    const auto prev = d((t + n - 1) % n);
    const auto next = d((t + 1) % n);
    if (d(t) * d(t) < prev * next) return false;
  }
  return true;
}

}  // namespace relayosc
