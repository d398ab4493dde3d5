#include "relayosc/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relayosc/detail/parallel.hpp"

namespace relayosc {
namespace {

bool lexicographically_less(const SignVector& a, const SignVector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

void require_sign_entries(const SignVector& pattern) {
  for (Index i = 0; i < pattern.size(); ++i)
    if (pattern(i) < -1 || pattern(i) > 1) throw InvalidInput("pattern entries must be in {-1, 0, 1}");
}

bool parity_matches(PatternForm form, Index period) {
  const bool even = period % 2 == 0;
  switch (form) {
    case PatternForm::ZeroPaired:
    case PatternForm::Square: return even;
    default: return !even;
  }
}

// Period bounds if they apply to this spec; nullopt otherwise.
std::optional<PeriodBounds> applicable_bounds(const SystemSpec& spec) {
  if (spec.delay < 1) return std::nullopt;
  try {
    return period_bounds(spec);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

char form_letter(PatternForm form) {
  switch (form) {
    case PatternForm::ZeroPaired: return 'a';
    case PatternForm::TrailingZero: return 'b';
    case PatternForm::MiddleZero: return 'c';
    case PatternForm::Square: return 'd';
  }
  return '?';
}

SignVector make_pattern(PatternForm form, Index period) {
  if (period <= 1) throw PreconditionError("patterns need period > 1");
  if (!parity_matches(form, period))
    throw InvalidInput(std::string("form ") + form_letter(form) + " does not exist for period " +
                       std::to_string(period));
  SignVector s(period);
  switch (form) {
    case PatternForm::Square: {
      const Index h = period / 2;
      s << SignVector::Ones(h), -SignVector::Ones(h);
      break;
    }
    case PatternForm::ZeroPaired: {
      const Index h = period / 2 - 1;
      s << SignVector::Ones(h), 0, -SignVector::Ones(h), 0;
      break;
    }
    case PatternForm::TrailingZero: {
      const Index h = (period - 1) / 2;
      s << SignVector::Ones(h), -SignVector::Ones(h), 0;
      break;
    }
    case PatternForm::MiddleZero: {
      const Index h = (period - 1) / 2;
      s << SignVector::Ones(h), 0, -SignVector::Ones(h);
      break;
    }
  }
  return s;
}

std::vector<SignVector> candidate_patterns(Index period) {
  if (period <= 1) throw PreconditionError("candidate patterns need period > 1");
  std::vector<SignVector> out;
  if (period % 2 == 0) {
    out.push_back(make_pattern(PatternForm::Square, period));
    // At P = 2 the zero-paired form is all zeros, a constant signal.
    if (period > 2) out.push_back(make_pattern(PatternForm::ZeroPaired, period));
  } else {
    out.push_back(make_pattern(PatternForm::TrailingZero, period));
    out.push_back(make_pattern(PatternForm::MiddleZero, period));
  }
  return out;
}

std::optional<PatternForm> classify_form(const SignVector& pattern) {
  const Index period = pattern.size();
  if (period <= 1) return std::nullopt;
  for (PatternForm form : {PatternForm::ZeroPaired, PatternForm::TrailingZero,
                           PatternForm::MiddleZero, PatternForm::Square}) {
    if (!parity_matches(form, period)) continue;
    if (form == PatternForm::ZeroPaired && period == 2) continue;
    if (make_pattern(form, period) == pattern) return form;
  }
  return std::nullopt;
}

std::optional<CanonicalRotation> canonicalize(const SignVector& pattern) {
  const Index period = pattern.size();
  if (period <= 1) return std::nullopt;
  for (const SignVector& canonical : candidate_patterns(period)) {
    for (Index shift = 0; shift < period; ++shift) {
      if (cyclic_shift(canonical, shift) == pattern)
        return CanonicalRotation{canonical, shift, *classify_form(canonical)};
    }
  }
  return std::nullopt;
}

RealVector loop_gain(const PeriodicProfile& profile, int delay, const SignVector& pattern) {
  if (pattern.size() != profile.period())
    throw InvalidInput("pattern length differs from the profile period");
  require_sign_entries(pattern);
  return -cyclic_shift(circulant_apply(profile.gbar, pattern.cast<double>()), delay);
}

RealVector loop_gain(const SystemSpec& spec, const SignVector& pattern) {
  return loop_gain(periodic_summation(spec, pattern.size()), spec.delay, pattern);
}

double fixed_point_residual(const PeriodicProfile& profile, int delay, const RealVector& u,
                            double zero_tol) {
  if (u.size() != profile.period()) throw InvalidInput("signal length differs from the profile period");
  const RealVector relay = signs(u, zero_tol).cast<double>();
  const RealVector defect = u + cyclic_shift(circulant_apply(relay, profile.gbar), delay);
  return defect.lpNorm<Eigen::Infinity>();
}

std::optional<OscillationReport> check_fixed_point(const PeriodicProfile& profile, int delay,
                                                   const SignVector& pattern,
                                                   const FixedPointOptions& options) {
  if (pattern.size() <= 1) throw PreconditionError("fixed-point check needs period > 1");
  const double zero_tol = options.zero_tol.value_or(default_fixed_point_tol(profile));
  const double fp_tol = options.fp_tol.value_or(default_fixed_point_tol(profile));

  RealVector u = loop_gain(profile, delay, pattern);
  if (signs(u, zero_tol) != pattern) return std::nullopt;
  if (!satisfies_assumption2(u, zero_tol)) return std::nullopt;
  const double residual = fixed_point_residual(profile, delay, u, zero_tol);
  if (residual > fp_tol) return std::nullopt;

  OscillationReport report;
  report.period = pattern.size();
  report.delay = delay;
  report.pattern = pattern;
  report.amplitudes = std::move(u);
  report.flags.assumption2 = true;
  report.flags.balanced = count_signs(pattern).balanced();
  report.residual = residual;
  return report;
}

std::optional<OscillationReport> check_fixed_point(const SystemSpec& spec,
                                                   const SignVector& pattern,
                                                   const FixedPointOptions& options) {
  if (pattern.size() <= 1) throw PreconditionError("fixed-point check needs period > 1");
  return check_fixed_point(periodic_summation(spec, pattern.size()), spec.delay, pattern, options);
}

std::vector<OscillationReport> search_oscillations(const SystemSpec& spec, Index min_period,
                                                   Index max_period,
                                                   const SearchOptions& options) {
  if (min_period <= 1 || min_period > max_period)
    throw PreconditionError("search needs 1 < min_period <= max_period");
  validate(spec);
  const std::optional<PeriodBounds> bounds = applicable_bounds(spec);

  const auto count = static_cast<std::size_t>(max_period - min_period + 1);
  std::vector<std::vector<OscillationReport>> per_period(count);
  detail::parallel_for(count, options.jobs, [&](std::size_t i) {
    const Index period = min_period + static_cast<Index>(i);
    const bool bounded = bounds && period >= spec.delay;
    if (bounded && options.prune_to_bounds && !bounds->contains(period)) return;
    const PeriodicProfile profile = periodic_summation(spec, period);
    for (const SignVector& pattern : candidate_patterns(period)) {
      auto report = check_fixed_point(profile, spec.delay, pattern, options.fixed_point);
      if (!report) continue;
      if (bounded) report->flags.within_bounds = bounds->contains(period);
      per_period[i].push_back(std::move(*report));
    }
    std::sort(per_period[i].begin(), per_period[i].end(),
              [](const auto& a, const auto& b) { return lexicographically_less(a.pattern, b.pattern); });
  });

  std::vector<OscillationReport> out;
  for (auto& reports : per_period)
    for (auto& r : reports) out.push_back(std::move(r));
  return out;
}

int dominance_time(const SystemSpec& spec) {
  validate(spec);
  constexpr int kMaxTime = 1'000'000;
  if (spec.is_lag_sum()) {
    const auto& terms = spec.lags().terms;
    for (int t = 1; t <= kMaxTime; ++t) {
      // head - tail = sum_i k_i (1 - 2 p_i^t) / (1 - p_i)
      double excess = 0.0;
      bool settled = true;
      for (const auto& term : terms) {
        const double power = std::pow(term.pole, static_cast<double>(t));
        if (power != 0.0) settled = false;
        excess += term.gain * (1.0 - 2.0 * power) / (1.0 - term.pole);
      }
      if (excess > 0.0) return t;
      if (settled) break;
    }
    throw UndecidableError("partial sums never exceed the tail");
  }

  const auto& raw = spec.samples();
  const RealVector& g = raw.g0;
  double head = 0.0;
  double known_tail = g.sum();
  for (Index t = 1; t <= g.size(); ++t) {
    head += g(t - 1);
    known_tail -= g(t - 1);
    if (head - known_tail - raw.tail_bound > 0.0) return static_cast<int>(t);
    if (head - known_tail + raw.tail_bound > 0.0)
      throw UndecidableError("tail bound too loose to decide the crossover at t = " +
                             std::to_string(t));
  }
  throw UndecidableError("partial sums do not exceed the tail within the stored samples");
}

PeriodBounds period_bounds(const SystemSpec& spec, bool allow_finite_support) {
  validate(spec);
  if (spec.delay < 1) throw NotApplicableError("period bounds need delay >= 1; use the absence check");
  const Assumption1Report a1 = validate_assumption1(spec);
  const bool ok = allow_finite_support ? a1.passed_ignoring_support_length() : a1.passed();
  if (!ok) throw PreconditionError("kernel violates the monotone-decreasing support assumption");
  if (*a1.support_start != 0) throw PreconditionError("delay-free kernel must have g0(0) > 0");

  PeriodBounds b;
  b.delay = spec.delay;
  b.dominance = dominance_time(spec);
  b.lower = 2 * spec.delay;
  b.upper = 2 * (spec.delay + b.dominance);
  if (spec.delay > 1 && is_convex_on_support(spec)) b.upper_convex = 4 * spec.delay + 2;
  return b;
}

bool exists_period_twice_delay(const SystemSpec& spec) {
  if (spec.delay < 1) throw PreconditionError("needs delay >= 1");
  const Index period = 2 * static_cast<Index>(spec.delay);
  const PeriodicProfile profile = periodic_summation(spec, period);
  const SignVector square = make_pattern(PatternForm::Square, period);
  return circulant_apply(profile.gbar, square.cast<double>())(0) > 0.0;
}

std::vector<int> derived_periods(int delay) {
  if (delay < 1) throw PreconditionError("needs delay >= 1");
  std::vector<int> out;
  for (int odd = 1; odd <= 2 * delay; odd += 2)
    if ((2 * delay) % odd == 0) out.push_back(2 * delay / odd);
  return out;
}

bool absence_guaranteed(const SystemSpec& spec) {
  if (spec.delay != 0) return false;
  const Assumption1Report a1 = validate_assumption1(spec);
  return a1.passed() && *a1.support_start == 0;
}

std::vector<FixedPoint> brute_force_fixed_points(const SystemSpec& spec, Index period,
                                                 std::optional<double> zero_tol) {
  if (period < 1) throw InvalidInput("period must be at least 1");
  if (period > kOracleMaxPeriod)
    throw EnumerationLimitError("oracle enumerates 3^P patterns; P = " + std::to_string(period) +
                                " exceeds " + std::to_string(kOracleMaxPeriod));
  const PeriodicProfile profile = periodic_summation(spec, period);
  const double tol = zero_tol.value_or(default_fixed_point_tol(profile));
  const RealVector& gbar = profile.gbar;
  const Index shift = wrap_index(spec.delay, period);

  std::vector<FixedPoint> found;
  SignVector s = -SignVector::Ones(period);
  RealVector u(period);
  for (;;) {
    if (!s.isZero()) {
      bool matches = true;
      for (Index t = 0; t < period && matches; ++t) {
        // u_t = -(H_gbar s)_{t - delay}
        const Index row = wrap_index(t - shift, period);
        double acc = 0.0;
        for (Index j = 0; j < period; ++j) acc += gbar(wrap_index(row - j, period)) * s(j);
        u(t) = -acc;
        matches = detail::sign_of(u(t), tol) == s(t);
      }
      if (matches) found.push_back({s, u});
    }
    // Odometer over {-1, 0, 1}^P, last entry fastest.
    Index i = period - 1;
    while (i >= 0 && s(i) == 1) {
      s(i) = -1;
      --i;
    }
    if (i < 0) break;
    ++s(i);
  }
  return found;
}

SweepResult sweep_existence(const SystemSpec& spec, int min_delay, int max_delay,
                            Index min_period, Index max_period, const SearchOptions& options) {
  if (min_delay < 0 || min_delay > max_delay) throw InvalidInput("delay range must be nonempty");
  if (min_period <= 1 || min_period > max_period)
    throw InvalidInput("period range must satisfy 1 < min <= max");
  validate(spec);

  std::vector<PeriodicProfile> profiles;
  for (Index p = min_period; p <= max_period; ++p) profiles.push_back(periodic_summation(spec, p));

  const auto n_delays = static_cast<std::size_t>(max_delay - min_delay + 1);
  std::vector<std::vector<SweepRow>> rows(n_delays);
  std::vector<SweepSummary> summary(n_delays);
  detail::parallel_for(n_delays, options.jobs, [&](std::size_t i) {
    SystemSpec delayed = spec;
    delayed.delay = min_delay + static_cast<int>(i);
    summary[i].delay = delayed.delay;
    summary[i].bounds = applicable_bounds(delayed);
    for (const auto& profile : profiles) {
      const Index period = profile.period();
      std::vector<SignVector> patterns = candidate_patterns(period);
      std::vector<SweepRow> cell;
      for (const auto& pattern : patterns) {
        const bool exists =
            check_fixed_point(profile, delayed.delay, pattern, options.fixed_point).has_value();
        cell.push_back({delayed.delay, period, *classify_form(pattern), exists});
        if (exists && period >= delayed.delay)
          summary[i].max_period = std::max(summary[i].max_period.value_or(0), period);
      }
      std::sort(cell.begin(), cell.end(),
                [](const auto& a, const auto& b) { return form_letter(a.form) < form_letter(b.form); });
      rows[i].insert(rows[i].end(), cell.begin(), cell.end());
    }
  });

  SweepResult result;
  for (auto& r : rows) result.rows.insert(result.rows.end(), r.begin(), r.end());
  result.summary = std::move(summary);
  return result;
}

}  // namespace relayosc
