#include "relayosc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "relayosc/detail/parallel.hpp"

namespace relayosc {

RelaySimulator::RelaySimulator(const SystemSpec& spec, const SignVector& initial_relay)
    : spec_(spec) {
  validate(spec_);
  if (spec_.delay < 1)
    throw NotApplicableError(
        "delay 0 makes the relay loop algebraic (no explicit recursion); "
        "a delay-free monotone kernel admits no unimodal self-oscillation");
  const Index prefix_len = initial_relay.size();
  if (prefix_len < spec_.delay) throw InvalidInput("relay prefix must cover at least the delay");
  for (Index i = 0; i < prefix_len; ++i)
    if (initial_relay(i) < -1 || initial_relay(i) > 1)
      throw InvalidInput("relay prefix entries must be in {-1, 0, 1}");

  // r(s) for s < 0 from the periodically extended prefix r(-L .. -1).
  auto past = [&](Index s) { return initial_relay(wrap_index(s, prefix_len)); };

  const Index reach = spec_.is_lag_sum() ? 1 : spec_.samples().g0.size();
  window_.assign(static_cast<std::size_t>(spec_.delay + reach), 0);
  const auto width = static_cast<Index>(window_.size());
  for (Index s = -width; s < 0; ++s) window_[wrap_index(s, width)] = past(s);

  if (!spec_.is_lag_sum()) return;
  const auto& terms = spec_.lags().terms;
  lag_states_ = RealVector::Zero(static_cast<Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [gain, pole] = terms[i];
    // x(-1) = k sum_j p^j r(-1-j) / (1 - p^L); the past is L-periodic so
    // x(-1-L) = x(-1), then step forward to x(-delay-1).
    double x = 0.0;
    double power = 1.0;
    for (Index j = 0; j < prefix_len; ++j) {
      x += power * past(-1 - j);
      power *= pole;
    }
    x = gain * x / (1.0 - power);
    for (Index s = -prefix_len; s <= -spec_.delay - 1; ++s) x = pole * x + gain * past(s);
    lag_states_(static_cast<Index>(i)) = x;
  }
}

int RelaySimulator::relay_at(Index s) const {
  return window_[wrap_index(s, static_cast<Index>(window_.size()))];
}

double RelaySimulator::step() {
  const Index s = t_ - spec_.delay;
  double u = 0.0;
  if (spec_.is_lag_sum()) {
    const auto& terms = spec_.lags().terms;
    const int r = relay_at(s);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      double& x = lag_states_(static_cast<Index>(i));
      x = terms[i].pole * x + terms[i].gain * r;
      u -= x;
    }
  } else {
    const RealVector& g0 = spec_.samples().g0;
    for (Index j = 0; j < g0.size(); ++j) u -= g0(j) * relay_at(s - j);
  }
  window_[wrap_index(t_, static_cast<Index>(window_.size()))] = detail::sign_of(u);
  ++t_;
  return u;
}

Trajectory simulate(const SystemSpec& spec, const SignVector& initial_relay, Index steps) {
  if (steps < 1) throw InvalidInput("simulation needs at least one step");
  RelaySimulator sim(spec, initial_relay);
  Trajectory traj{RealVector(steps), SignVector(steps)};
  for (Index t = 0; t < steps; ++t) {
    traj.u(t) = sim.step();
    traj.r(t) = detail::sign_of(traj.u(t));
  }
  return traj;
}

std::optional<DetectedCycle> detect_period(const Trajectory& traj, Index max_period, double tol) {
  if (traj.u.size() != traj.r.size()) throw InvalidInput("trajectory u and r differ in length");
  const Index n = traj.u.size();
  for (Index period = 1; period <= max_period && 3 * period <= n; ++period) {
    Index onset = n - period;
    while (onset > 0 && traj.r(onset - 1) == traj.r(onset - 1 + period) &&
           std::abs(traj.u(onset - 1 + period) - traj.u(onset - 1)) <= tol)
      --onset;
    if (n - onset >= 3 * period) return DetectedCycle{period, onset};
  }
  return std::nullopt;
}

double default_cycle_tol(const SystemSpec& spec, Index max_period) {
  double summation_tol = kDefaultSummationTol;
  if (!spec.is_lag_sum()) summation_tol = std::max(summation_tol, spec.samples().tail_bound);
  return 1e-8 * periodic_summation(spec, max_period, summation_tol).gbar.lpNorm<1>();
}

RealVector steady_slice(const Trajectory& traj, const DetectedCycle& cycle) {
  return traj.u.segment(cycle.transient, cycle.period);
}

SignVector basin_trial_prefix(const SystemSpec& spec, std::uint64_t seed, int trial) {
  if (spec.delay < 1) throw NotApplicableError("random relay prefixes need delay >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution coin(0.5);
  SignVector prefix(spec.delay);
  for (Index i = 0; i < prefix.size(); ++i) prefix(i) = coin(rng) ? 1 : -1;
  return prefix;
}

BasinHistogram basin_probe(const SystemSpec& spec, int trials, std::uint64_t seed, Index steps,
                           const BasinOptions& options) {
  if (trials < 1) throw InvalidInput("basin probe needs at least one trial");
  if (steps < 1) throw InvalidInput("simulation needs at least one step");
  const Index max_period = options.max_period.value_or(std::max<Index>(1, steps / 4));
  const double tol = options.tol.value_or(default_cycle_tol(spec, max_period));

  std::vector<std::optional<Index>> outcome(static_cast<std::size_t>(trials));
  detail::parallel_for(outcome.size(), options.jobs, [&](std::size_t i) {
    const Trajectory traj = simulate(spec, basin_trial_prefix(spec, seed, static_cast<int>(i)), steps);
    if (auto cycle = detect_period(traj, max_period, tol)) outcome[i] = cycle->period;
  });

  BasinHistogram hist;
  for (const auto& o : outcome) {
    if (o)
      ++hist.periods[*o];
    else
      ++hist.undetected;
  }
  return hist;
}

}  // namespace relayosc
