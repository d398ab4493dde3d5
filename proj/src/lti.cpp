#include "relayosc/lti.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace relayosc {
namespace {

// Below this magnitude lag samples are no longer reliably representable
// relative to each other (subnormals, then zero).
constexpr double kUnderflowFloor = 1e-250;

void require_horizon(Index horizon) {
  if (horizon < 1) throw InvalidInput("horizon must be at least 1");
}

double lag_value(const LagSum& lags, Index t) {
  double acc = 0.0;
  for (const auto& term : lags.terms) acc += term.gain * std::pow(term.pole, static_cast<double>(t));
  return acc;
}

// Samples of g0 restricted to where every lag term is still a normal double.
RealVector checkable_samples(const SystemSpec& spec, Index horizon) {
  if (!spec.is_lag_sum()) {
    const auto& raw = spec.samples().g0;
    return raw.head(std::min(horizon, raw.size()));
  }
  const auto& lags = spec.lags();
  Index usable = horizon;
  for (Index t = 0; t < horizon; ++t) {
    bool representable = true;
    for (const auto& term : lags.terms) {
      if (std::abs(term.gain) * std::pow(term.pole, static_cast<double>(t)) < kUnderflowFloor) {
        representable = false;
        break;
      }
    }
    if (!representable) {
      usable = t;
      break;
    }
  }
  RealVector g(usable);
  for (Index t = 0; t < usable; ++t) g(t) = lag_value(lags, t);
  return g;
}

// True unless the lag terms cancel identically (equal poles, gains summing to 0).
bool lag_sum_nonvanishing(const LagSum& lags) {
  std::map<double, double> by_pole;
  for (const auto& term : lags.terms) by_pole[term.pole] += term.gain;
  for (const auto& [pole, gain] : by_pole)
    if (gain != 0.0) return true;
  return false;
}

}  // namespace

void validate(const SystemSpec& spec) {
  if (spec.delay < 0) throw InvalidSpec("delay must be nonnegative");
  if (spec.is_lag_sum()) {
    const auto& lags = spec.lags();
    if (lags.terms.empty()) throw InvalidSpec("lag sum needs at least one term");
    for (const auto& term : lags.terms) {
      if (!(term.pole > 0.0 && term.pole < 1.0))
        throw InvalidSpec("lag pole " + std::to_string(term.pole) + " outside (0, 1)");
      if (!std::isfinite(term.gain) || term.gain == 0.0)
        throw InvalidSpec("lag gain must be finite and nonzero");
    }
  } else {
    const auto& raw = spec.samples();
    if (raw.g0.size() == 0) throw InvalidSpec("raw kernel needs at least one sample");
    if (!raw.g0.allFinite()) throw InvalidSpec("raw kernel has a non-finite sample");
    if (!std::isfinite(raw.tail_bound) || raw.tail_bound < 0.0)
      throw InvalidSpec("tail bound must be finite and nonnegative");
  }
}

ImpulseResponse impulse_samples(const SystemSpec& spec, Index horizon) {
  validate(spec);
  require_horizon(horizon);
  ImpulseResponse out;
  out.samples = RealVector::Zero(horizon);
  if (spec.is_lag_sum()) {
    const auto& lags = spec.lags();
    for (Index t = 0; t < horizon; ++t) out.samples(t) = lag_value(lags, t);
    out.exact = true;
    for (const auto& term : lags.terms) {
      out.truncation_error += std::abs(term.gain) *
                              std::pow(term.pole, static_cast<double>(horizon)) /
                              (1.0 - term.pole);
    }
    return out;
  }
  const auto& raw = spec.samples();
  const Index kept = std::min(horizon, raw.g0.size());
  out.samples.head(kept) = raw.g0.head(kept);
  out.truncation_error = raw.g0.tail(raw.g0.size() - kept).cwiseAbs().sum() + raw.tail_bound;
  return out;
}

RealVector delayed_impulse_samples(const SystemSpec& spec, Index horizon) {
  require_horizon(horizon);
  RealVector g = RealVector::Zero(horizon);
  if (spec.delay < horizon) {
    g.tail(horizon - spec.delay) = impulse_samples(spec, horizon - spec.delay).samples;
  } else {
    validate(spec);
  }
  return g;
}

double kernel_mass(const SystemSpec& spec) {
  validate(spec);
  if (!spec.is_lag_sum()) return spec.samples().g0.sum();
  double mass = 0.0;
  for (const auto& term : spec.lags().terms) mass += term.gain / (1.0 - term.pole);
  return mass;
}

PeriodicProfile periodic_summation(const SystemSpec& spec, Index period, double tol) {
  validate(spec);
  if (period < 1) throw InvalidInput("period must be at least 1");
  if (!(tol > 0.0)) throw InvalidInput("summation tolerance must be positive");
  PeriodicProfile profile{RealVector::Zero(period)};
  if (spec.is_lag_sum()) {
    for (const auto& term : spec.lags().terms) {
      const double fold = 1.0 - std::pow(term.pole, static_cast<double>(period));
      double power = 1.0;
      for (Index t = 0; t < period; ++t) {
        profile.gbar(t) += term.gain * power / fold;
        power *= term.pole;
      }
    }
    return profile;
  }
  const auto& raw = spec.samples();
  if (raw.tail_bound > tol) {
    throw TruncationError("raw kernel tail bound " + std::to_string(raw.tail_bound) +
                          " exceeds summation tolerance " + std::to_string(tol));
  }
  for (Index t = 0; t < raw.g0.size(); ++t) profile.gbar(t % period) += raw.g0(t);
  return profile;
}

Assumption1Report validate_assumption1(const SystemSpec& spec, Index horizon, double strict_tol) {
  validate(spec);
  require_horizon(horizon);
  Assumption1Report report;
  const RealVector g = checkable_samples(spec, horizon);
  report.checked_horizon = g.size();

  Index start = 0;
  while (start < g.size() && g(start) == 0.0) ++start;
  if (start == g.size()) {
    report.infinite_support = false;
    return report;
  }
  report.support_start = start;

  Index last = g.size() - 1;
  while (g(last) == 0.0) --last;
  for (Index t = start; t <= last; ++t) {
    if (g(t) == 0.0) {
      report.connected_support = {false, t};
      break;
    }
  }
  for (Index t = start; t <= last; ++t) {
    if (g(t) < 0.0) {
      report.positive = {false, t};
      break;
    }
  }
  const double margin = std::max(0.0, strict_tol);
  for (Index t = start; t < last; ++t) {
    if (!(g(t) - g(t + 1) > margin)) {
      report.strictly_decreasing = {false, t};
      break;
    }
  }

  if (spec.is_lag_sum()) {
    report.infinite_support = lag_sum_nonvanishing(spec.lags());
  } else {
    const auto& raw = spec.samples();
    report.infinite_support = last == raw.g0.size() - 1 && raw.tail_bound > 0.0;
    report.summable.ok = std::isfinite(raw.tail_bound);
  }
  return report;
}

bool is_convex_on_support(const SystemSpec& spec, Index horizon) {
  validate(spec);
  require_horizon(horizon);
  const RealVector g = checkable_samples(spec, horizon);
  Index start = 0;
  while (start < g.size() && g(start) == 0.0) ++start;
  if (start == g.size()) return true;
  Index last = g.size() - 1;
  while (g(last) == 0.0) --last;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Index t = start + 1; t < last; ++t) {
    const double second = (g(t + 1) - g(t)) - (g(t) - g(t - 1));
    const double slack = 8.0 * eps * (std::abs(g(t - 1)) + std::abs(g(t)) + std::abs(g(t + 1)));
    if (second < -slack) return false;
  }
  return true;
}

}  // namespace relayosc
