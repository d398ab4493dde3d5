#pragma once

// Delay-plus-kernel description of the linear block G(z) = z^{-delay} G0(z),
// its impulse response g0, and the P-periodic summation of g0.

#include <optional>
#include <variant>
#include <vector>

#include "relayosc/circulant.hpp"
#include "relayosc/variation.hpp"

namespace relayosc {

/// One first-order lag k z / (z - p), impulse response k p^t.
struct LagTerm {
  double gain = 1.0;
  double pole = 0.5;
  friend bool operator==(const LagTerm&, const LagTerm&) = default;
};

struct LagSum {
  std::vector<LagTerm> terms;
  friend bool operator==(const LagSum&, const LagSum&) = default;
};

/// Measured g0 samples. tail_bound bounds the l1 mass beyond the last sample.
struct RawSamples {
  RealVector g0;
  double tail_bound = 0.0;
  friend bool operator==(const RawSamples& a, const RawSamples& b) {
    return a.tail_bound == b.tail_bound && a.g0.size() == b.g0.size() && a.g0 == b.g0;
  }
};

struct SystemSpec {
  int delay = 0;
  std::variant<LagSum, RawSamples> kernel;

  static SystemSpec first_order(double pole, int delay, double gain = 1.0) {
    return SystemSpec{delay, LagSum{{LagTerm{gain, pole}}}};
  }

  bool is_lag_sum() const { return std::holds_alternative<LagSum>(kernel); }
  const LagSum& lags() const { return std::get<LagSum>(kernel); }
  const RawSamples& samples() const { return std::get<RawSamples>(kernel); }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Throws InvalidSpec unless 0 < p_i < 1, k_i != 0 (finite), and raw samples
/// are finite with a finite nonnegative tail bound.
void validate(const SystemSpec& spec);

struct ImpulseResponse {
  RealVector samples;
  bool exact = false;
  double truncation_error = 0.0;  ///< l1 mass of g0 beyond the returned samples
};

/// g0(0 .. horizon-1).
ImpulseResponse impulse_samples(const SystemSpec& spec, Index horizon);

/// g(0 .. horizon-1) including the delay prefix, g(t) = g0(t - delay).
RealVector delayed_impulse_samples(const SystemSpec& spec, Index horizon);

/// Sum over t of g0(t); closed form for lag sums.
double kernel_mass(const SystemSpec& spec);

struct PeriodicProfile {
  RealVector gbar;
  Index period() const { return gbar.size(); }
};

inline constexpr double kDefaultSummationTol = 1e-12;

/// One period of gbar(t) = sum_i g0(t + i P). Lag sums use the exact
/// geometric closed form; raw samples throw TruncationError if tail_bound > tol.
PeriodicProfile periodic_summation(const SystemSpec& spec, Index period,
                                   double tol = kDefaultSummationTol);

inline constexpr Index kDefaultCheckHorizon = 4096;

struct ConditionResult {
  bool ok = true;
  std::optional<Index> first_violation;
};

struct Assumption1Report {
  std::optional<Index> support_start;  ///< first t with g0(t) != 0
  ConditionResult connected_support;
  ConditionResult positive;
  ConditionResult strictly_decreasing;
  ConditionResult summable;
  bool infinite_support = true;
  Index checked_horizon = 0;

  /// All conditions, including infinite support.
  bool passed() const {
    return support_start.has_value() && connected_support.ok && positive.ok &&
           strictly_decreasing.ok && summable.ok && infinite_support;
  }
  /// Everything except infinite support (what an FIR kernel can satisfy).
  bool passed_ignoring_support_length() const {
    return support_start.has_value() && connected_support.ok && positive.ok &&
           strictly_decreasing.ok && summable.ok;
  }
};

/// Checks connected support, positivity, strict decrease (by more than
/// strict_tol) and summability of g0 over the horizon. Violations are
/// reported, never thrown.
Assumption1Report validate_assumption1(const SystemSpec& spec,
                                       Index horizon = kDefaultCheckHorizon,
                                       double strict_tol = 0.0);

/// Δg0(t) >= Δg0(t-1) on the support, within a few ulps of rounding.
bool is_convex_on_support(const SystemSpec& spec, Index horizon = kDefaultCheckHorizon);

}  // namespace relayosc
