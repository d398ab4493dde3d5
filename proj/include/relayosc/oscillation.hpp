#pragma once

// Periodic fixed points of the relay loop u = -Q^{delay} H_gbar sign(u):
// verification, canonical-pattern search, exhaustive oracle, and the
// period bounds / existence tests for delayed monotone kernels.

#include <optional>
#include <vector>

#include "relayosc/lti.hpp"

namespace relayosc {

/// The four unrotated sign forms of a balanced periodically unimodal signal.
enum class PatternForm {
  ZeroPaired,    ///< [1..1, 0, -1..-1, 0]   even P   (a)
  TrailingZero,  ///< [1..1, -1..-1, 0]      odd P    (b)
  MiddleZero,    ///< [1..1, 0, -1..-1]      odd P    (c)
  Square,        ///< [1..1, -1..-1]         even P   (d)
};

char form_letter(PatternForm form);

SignVector make_pattern(PatternForm form, Index period);

/// Canonical balanced patterns for period P > 1: even P gives the square
/// wave and (when P > 2) the zero-paired form; odd P gives the trailing- and
/// middle-zero forms. Rotations are not listed.
std::vector<SignVector> candidate_patterns(Index period);

/// Which form an unrotated canonical pattern is, if any.
std::optional<PatternForm> classify_form(const SignVector& pattern);

struct CanonicalRotation {
  SignVector canonical;  ///< pattern == cyclic_shift(canonical, shift)
  Index shift = 0;
  PatternForm form = PatternForm::Square;
};

/// Smallest shift mapping a canonical pattern onto `pattern`, if the pattern
/// is a rotation of one.
std::optional<CanonicalRotation> canonicalize(const SignVector& pattern);

/// One period of the closed-loop response to a relay pattern:
/// -Q^{delay} H_gbar pattern.
RealVector loop_gain(const PeriodicProfile& profile, int delay, const SignVector& pattern);
RealVector loop_gain(const SystemSpec& spec, const SignVector& pattern);

/// max_t |u_t + (Q^{delay} H_{sign(u)} gbar)_t|, i.e. the fixed-point defect
/// evaluated through the commuted product.
double fixed_point_residual(const PeriodicProfile& profile, int delay, const RealVector& u,
                            double zero_tol);

struct FixedPointOptions {
  std::optional<double> zero_tol;  ///< default 1e-9 * ||gbar||_1
  std::optional<double> fp_tol;    ///< default 1e-9 * ||gbar||_1
};

inline double default_fixed_point_tol(const PeriodicProfile& profile) {
  return 1e-9 * profile.gbar.lpNorm<1>();
}

struct OscillationFlags {
  bool assumption2 = false;
  bool balanced = false;                ///< P_p == P_n
  std::optional<bool> within_bounds;    ///< set by search when bounds apply
};

struct OscillationReport {
  Index period = 0;
  int delay = 0;
  SignVector pattern;
  RealVector amplitudes;
  OscillationFlags flags;
  double residual = 0.0;
};

/// Report iff sign(loop_gain(pattern)) == pattern entrywise (zeros within
/// zero_tol), the result is periodically unimodal, and the residual is
/// within fp_tol. Any pattern is accepted, not only canonical ones.
std::optional<OscillationReport> check_fixed_point(const SystemSpec& spec,
                                                   const SignVector& pattern,
                                                   const FixedPointOptions& options = {});
std::optional<OscillationReport> check_fixed_point(const PeriodicProfile& profile, int delay,
                                                   const SignVector& pattern,
                                                   const FixedPointOptions& options = {});

struct SearchOptions {
  FixedPointOptions fixed_point;
  bool prune_to_bounds = false;
  unsigned jobs = 1;
};

/// Checks every candidate pattern for P in [min_period, max_period]. Results
/// are ordered by period, then lexicographically by pattern. When the period
/// bounds apply (Assumption 1 holds, delay >= 1) reports with P >= delay carry
/// within_bounds; out-of-bound periods are still checked unless pruning is on.
std::vector<OscillationReport> search_oscillations(const SystemSpec& spec, Index min_period,
                                                   Index max_period,
                                                   const SearchOptions& options = {});

/// Smallest t >= 1 with sum_{k<t} g0(k) > sum_{k>=t} g0(k).
int dominance_time(const SystemSpec& spec);

struct PeriodBounds {
  int delay = 0;
  int dominance = 0;
  int lower = 0;                     ///< 2 delay
  int upper = 0;                     ///< 2 (delay + dominance)
  std::optional<int> upper_convex;   ///< 4 delay + 2, convex g0 and delay > 1

  int effective_upper() const { return upper_convex ? std::min(upper, *upper_convex) : upper; }
  bool contains(Index period) const { return period >= lower && period <= effective_upper(); }
};

/// Throws NotApplicableError for delay 0 and PreconditionError if g0 fails
/// Assumption 1 or has g0(0) <= 0 (finite support tolerated with the flag).
PeriodBounds period_bounds(const SystemSpec& spec, bool allow_finite_support = false);

/// Whether the square wave of period 2 delay is a fixed point, decided by the
/// sign of (H_gbar [1..1, -1..-1])(0).
bool exists_period_twice_delay(const SystemSpec& spec);

/// {2 delay / (2n + 1) : integer}, descending.
std::vector<int> derived_periods(int delay);

/// g(0) > 0 (no delay, g0(0) > 0) and Assumption 1 holds.
bool absence_guaranteed(const SystemSpec& spec);

struct FixedPoint {
  SignVector pattern;
  RealVector amplitudes;
};

inline constexpr Index kOracleMaxPeriod = 14;

/// Every nonzero s in {-1,0,1}^P with sign(loop_gain(s)) == s, in
/// lexicographic order of s (-1 < 0 < 1). No unimodality filter is applied.
std::vector<FixedPoint> brute_force_fixed_points(const SystemSpec& spec, Index period,
                                                 std::optional<double> zero_tol = {});

struct SweepRow {
  int delay = 0;
  Index period = 0;
  PatternForm form = PatternForm::Square;
  bool exists = false;
};

struct SweepSummary {
  int delay = 0;
  std::optional<Index> max_period;  ///< largest existing P with P >= delay
  std::optional<PeriodBounds> bounds;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
};

/// Runs the canonical-pattern check over a grid of delays and periods with the
/// kernel of `spec` (its own delay is ignored). Rows are sorted by delay,
/// period, form.
SweepResult sweep_existence(const SystemSpec& spec, int min_delay, int max_delay,
                            Index min_period, Index max_period, const SearchOptions& options = {});

}  // namespace relayosc
