#pragma once

// Time-domain recursion of the closed loop u(t) = -(g0 * sign(u))(t - delay).

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "relayosc/lti.hpp"

namespace relayosc {

struct Trajectory {
  RealVector u;
  SignVector r;  ///< r(t) = sign(u(t)), sign(0) = 0
};

/// Explicit simulator for delay >= 1.
///
/// The relay prefix r(-L..-1) is the free initial condition; before -L it is
/// extended periodically with period L, so lag states start at their exact
/// infinite-past value. Lag-sum kernels run the first-order recursions
/// x_i(s) = p_i x_i(s-1) + k_i r(s); raw kernels convolve directly.
class RelaySimulator {
 public:
  RelaySimulator(const SystemSpec& spec, const SignVector& initial_relay);

  /// Advances one sample and returns u(t) for the current t.
  double step();
  Index time() const { return t_; }

 private:
  int relay_at(Index s) const;  // t_ - window width <= s < t_

  SystemSpec spec_;
  // Ring buffer of the last relay symbols: delay + 1 for lag sums, delay + N
  // for N raw samples.
  std::vector<int> window_;
  RealVector lag_states_;  // x_i(t_ - delay - 1)
  Index t_ = 0;
};

/// T samples from the given relay prefix (length >= delay). Throws
/// NotApplicableError for delay 0, where the loop is algebraic.
Trajectory simulate(const SystemSpec& spec, const SignVector& initial_relay, Index steps);

struct DetectedCycle {
  Index period = 0;
  Index transient = 0;
};

/// Smallest P <= max_period, with the earliest onset T0, such that r is
/// exactly P-periodic from T0 to the end, |u(t+P) - u(t)| <= tol there, and
/// the window after T0 spans at least three periods.
std::optional<DetectedCycle> detect_period(const Trajectory& traj, Index max_period, double tol);

/// 1e-8 * ||gbar0^P||_1 for P = max_period.
double default_cycle_tol(const SystemSpec& spec, Index max_period);

/// One period of u starting at the detected onset.
RealVector steady_slice(const Trajectory& traj, const DetectedCycle& cycle);

struct BasinOptions {
  std::optional<Index> max_period;  ///< default steps / 4
  std::optional<double> tol;        ///< default default_cycle_tol
  unsigned jobs = 1;
};

struct BasinHistogram {
  std::map<Index, int> periods;
  int undetected = 0;
  friend bool operator==(const BasinHistogram&, const BasinHistogram&) = default;
};

/// Relay prefix of length delay, uniform over {-1, +1}, for trial `trial`
/// under `seed`. Independent of how trials are scheduled.
SignVector basin_trial_prefix(const SystemSpec& spec, std::uint64_t seed, int trial);

BasinHistogram basin_probe(const SystemSpec& spec, int trials, std::uint64_t seed, Index steps,
                           const BasinOptions& options = {});

}  // namespace relayosc
