#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "relayosc/oscillation.hpp"

using namespace relayosc;

namespace {

SignVector ivec(std::initializer_list<int> xs) {
  SignVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (int x : xs) v(i++) = x;
  return v;
}

RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::vector<Index> periods_of(const std::vector<OscillationReport>& reports) {
  std::vector<Index> out;
  for (const auto& r : reports)
    if (out.empty() || out.back() != r.period) out.push_back(r.period);
  return out;
}

SystemSpec random_lag_sum(std::mt19937_64& rng, int delay, int max_terms = 3) {
  std::uniform_real_distribution<double> pole(0.05, 0.95), gain(0.1, 2.0);
  std::uniform_int_distribution<int> terms(1, max_terms);
  LagSum sum;
  const int n = terms(rng);
  for (int i = 0; i < n; ++i) sum.terms.push_back({gain(rng), pole(rng)});
  return SystemSpec{delay, sum};
}

// Assumption-2 oracle fixed points, reduced to canonical patterns.
std::set<std::vector<int>> oracle_canonical_set(const SystemSpec& spec, Index period) {
  const PeriodicProfile profile = periodic_summation(spec, period);
  const double tol = default_fixed_point_tol(profile);
  std::set<std::vector<int>> out;
  for (const auto& fp : brute_force_fixed_points(spec, period)) {
    if (!satisfies_assumption2(fp.amplitudes, tol)) continue;
    const auto canon = canonicalize(fp.pattern);
    REQUIRE(canon.has_value());
    out.insert(std::vector<int>(canon->canonical.data(), canon->canonical.data() + period));
  }
  return out;
}

std::set<std::vector<int>> search_set(const SystemSpec& spec, Index period) {
  std::set<std::vector<int>> out;
  for (const auto& r : search_oscillations(spec, period, period))
    out.insert(std::vector<int>(r.pattern.data(), r.pattern.data() + period));
  return out;
}

}  // namespace

TEST_CASE("patterns") {
  CHECK(candidate_patterns(2) == std::vector<SignVector>{ivec({1, -1})});
  CHECK(candidate_patterns(4) == std::vector<SignVector>{ivec({1, 1, -1, -1}), ivec({1, 0, -1, 0})});
  CHECK(candidate_patterns(5) == std::vector<SignVector>{ivec({1, 1, -1, -1, 0}), ivec({1, 1, 0, -1, -1})});
  CHECK(candidate_patterns(3) == std::vector<SignVector>{ivec({1, -1, 0}), ivec({1, 0, -1})});
  CHECK_THROWS_AS(candidate_patterns(1), PreconditionError);
  CHECK_THROWS_AS(make_pattern(PatternForm::Square, 5), InvalidInput);

  for (Index P = 2; P <= 20; ++P)
    for (const auto& s : candidate_patterns(P)) {
      REQUIRE(count_signs(s).balanced());
      REQUIRE(classify_form(s).has_value());
      REQUIRE(cyclic_variation(s, VariationKind::Plus) == 2);
    }
  CHECK_FALSE(classify_form(ivec({1, -1, 1, -1})).has_value());
  CHECK(form_letter(PatternForm::ZeroPaired) == 'a');
  CHECK(form_letter(PatternForm::Square) == 'd');
}

TEST_CASE("canonicalize") {
  const auto c = canonicalize(ivec({-1, 1, 1, -1}));
  REQUIRE(c.has_value());
  CHECK(c->canonical == ivec({1, 1, -1, -1}));
  CHECK(c->form == PatternForm::Square);
  CHECK(cyclic_shift(c->canonical, c->shift) == ivec({-1, 1, 1, -1}));
  CHECK(canonicalize(ivec({0, 1, 0, -1}))->form == PatternForm::ZeroPaired);
  CHECK_FALSE(canonicalize(ivec({1, 1, 1, -1})).has_value());
}

TEST_CASE("loop_gain") {
  for (double a : {0.1, 0.5, 0.9}) {
    const RealVector u = loop_gain(SystemSpec::first_order(a, 1), ivec({1, -1}));
    CHECK(u(0) == doctest::Approx(1 / (1 + a)).epsilon(1e-14));
    CHECK(u(1) == doctest::Approx(-1 / (1 + a)).epsilon(1e-14));
  }
  const SystemSpec spec = SystemSpec::first_order(0.3, 2);
  CHECK(loop_gain(spec, SignVector::Zero(5)) == RealVector::Zero(5));
  const SignVector s = ivec({1, 0, -1, 1, 1});
  CHECK(loop_gain(spec, SignVector(-s)).isApprox(-loop_gain(spec, s)));
  CHECK_THROWS_AS(loop_gain(periodic_summation(spec, 4), 2, s), InvalidInput);
  CHECK_THROWS_AS(loop_gain(spec, ivec({2, -1})), InvalidInput);
}

TEST_CASE("check_fixed_point examples") {
  const SystemSpec ex1 = SystemSpec::first_order(0.1, 9);
  const auto r18 = check_fixed_point(ex1, make_pattern(PatternForm::Square, 18));
  REQUIRE(r18.has_value());
  CHECK(r18->period == 18);
  CHECK(r18->flags.assumption2);
  CHECK(r18->flags.balanced);
  CHECK(r18->residual <= 1e-9 * periodic_summation(ex1, 18).gbar.lpNorm<1>());

  const auto r2 = check_fixed_point(SystemSpec::first_order(0.1, 1), ivec({1, -1}));
  REQUIRE(r2.has_value());
  CHECK(r2->amplitudes(0) == doctest::Approx(1 / 1.1).epsilon(1e-14));
  CHECK(r2->amplitudes(1) == doctest::Approx(-1 / 1.1).epsilon(1e-14));

  // Rotations of a fixed point are fixed points; non-unimodal patterns never are.
  CHECK(check_fixed_point(ex1, cyclic_shift(make_pattern(PatternForm::Square, 18), 5)).has_value());
  CHECK_FALSE(check_fixed_point(ex1, ivec({1, -1, 1, -1, 1, -1})).has_value());

  const SystemSpec no_delay = SystemSpec::first_order(0.1, 0);
  for (Index P = 2; P <= 12; ++P)
    for (const auto& s : candidate_patterns(P)) REQUIRE_FALSE(check_fixed_point(no_delay, s).has_value());

  CHECK_THROWS_AS(check_fixed_point(ex1, ivec({1})), PreconditionError);
}

TEST_CASE("search_oscillations") {
  const SystemSpec ex1 = SystemSpec::first_order(0.1, 9);
  const auto reports = search_oscillations(ex1, 2, 20);
  CHECK(periods_of(reports) == std::vector<Index>{2, 6, 18});
  for (const auto& r : reports) {
    CHECK(r.flags.assumption2);
    CHECK(r.flags.balanced);
    CHECK(r.pattern == make_pattern(PatternForm::Square, r.period));
    CHECK(r.residual <= 1e-9 * periodic_summation(ex1, r.period).gbar.lpNorm<1>());
  }
  // Periods below the delay carry no bound verdict; 18 is inside [18, 20].
  CHECK_FALSE(reports.front().flags.within_bounds.has_value());
  CHECK(reports.back().flags.within_bounds == true);

  CHECK(periods_of(search_oscillations(SystemSpec::first_order(0.1, 4), 4, 12)) == std::vector<Index>{8});
  CHECK(search_oscillations(SystemSpec::first_order(0.1, 0), 2, 16).empty());
  CHECK(search_oscillations(SystemSpec{0, LagSum{{{1.0, 0.3}, {2.0, 0.5}}}}, 2, 16).empty());

  SearchOptions pruned;
  pruned.prune_to_bounds = true;
  CHECK(periods_of(search_oscillations(ex1, 2, 40, pruned)) == std::vector<Index>{2, 6, 18});

  CHECK_THROWS_AS(search_oscillations(ex1, 1, 4), PreconditionError);
  CHECK_THROWS_AS(search_oscillations(ex1, 5, 4), PreconditionError);
}

TEST_CASE("search is independent of worker count") {
  const SystemSpec spec = SystemSpec::first_order(0.9, 5);
  SearchOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = search_oscillations(spec, 2, 40, serial);
  const auto b = search_oscillations(spec, 2, 40, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pattern == b[i].pattern);
    CHECK(a[i].amplitudes == b[i].amplitudes);
  }
}

TEST_CASE("dominance_time") {
  CHECK(dominance_time(SystemSpec::first_order(0.1, 0)) == 1);
  CHECK(dominance_time(SystemSpec::first_order(0.9, 0)) == 7);
  CHECK(dominance_time(SystemSpec::first_order(0.5, 0)) == 2);
  // 1, 0.5, 0.25 + tail 0.1: head 1 > tail 0.85 at t = 1.
  CHECK(dominance_time(SystemSpec{0, RawSamples{vec({1, 0.5, 0.25}), 0.1}}) == 1);
  // head 1 vs stored tail 0.9 plus an unknown tail up to 0.5: undecidable.
  CHECK_THROWS_AS(dominance_time(SystemSpec{0, RawSamples{vec({1, 0.5, 0.4}), 0.5}}), UndecidableError);
}

TEST_CASE("period_bounds") {
  const auto b9 = period_bounds(SystemSpec::first_order(0.9, 8));
  CHECK(b9.lower == 16);
  CHECK(b9.upper == 30);
  CHECK(b9.upper_convex == 34);
  CHECK(b9.effective_upper() == 30);

  const auto b1 = period_bounds(SystemSpec::first_order(0.1, 5));
  CHECK(b1.lower == 10);
  CHECK(b1.effective_upper() == 12);

  for (double a : {0.1, 0.5, 0.9}) {
    const auto b = period_bounds(SystemSpec::first_order(a, 1));
    CHECK(b.lower == 2);
    CHECK_FALSE(b.upper_convex.has_value());
  }

  CHECK_THROWS_AS(period_bounds(SystemSpec::first_order(0.5, 0)), NotApplicableError);
  const SystemSpec fir{3, RawSamples{vec({1, 0.5, 0.25}), 0.0}};
  CHECK_THROWS_AS(period_bounds(fir), PreconditionError);
  CHECK(period_bounds(fir, true).lower == 6);
  CHECK_THROWS_AS(period_bounds(SystemSpec{2, RawSamples{vec({0, 1, 0.5}), 0.0}}, true), PreconditionError);
}

TEST_CASE("exists_period_twice_delay") {
  for (int d = 1; d <= 12; ++d) CHECK(exists_period_twice_delay(SystemSpec::first_order(0.1, d)));
  for (double a : {0.05, 0.5, 0.9, 0.99}) CHECK(exists_period_twice_delay(SystemSpec::first_order(a, 1)));
  CHECK_FALSE(exists_period_twice_delay(SystemSpec::first_order(0.9, 9)));

  // Independent evaluation: 1 - sum_{i=1}^{9} a^i + sum_{i=10}^{17} a^i.
  double value = 1.0;
  for (int i = 1; i <= 17; ++i) value += (i <= 9 ? -1.0 : 1.0) * std::pow(0.9, i);
  CHECK(value == doctest::Approx(-2.53).epsilon(0.01));
}

TEST_CASE("derived_periods") {
  CHECK(derived_periods(9) == std::vector<int>{18, 6, 2});
  CHECK(derived_periods(12) == std::vector<int>{24, 8});
  CHECK(derived_periods(4) == std::vector<int>{8});
  for (int d = 1; d <= 60; ++d)
    for (int p : derived_periods(d)) {
      REQUIRE(p % 2 == 0);
      REQUIRE((2 * d) % p == 0);
      REQUIRE(((2 * d) / p) % 2 == 1);
    }
  CHECK_THROWS_AS(derived_periods(0), PreconditionError);
}

TEST_CASE("absence_guaranteed") {
  CHECK(absence_guaranteed(SystemSpec{0, LagSum{{{1.0, 0.3}, {2.0, 0.5}}}}));
  CHECK(absence_guaranteed(SystemSpec::first_order(0.3, 0)));
  CHECK_FALSE(absence_guaranteed(SystemSpec::first_order(0.3, 1)));
  CHECK_FALSE(absence_guaranteed(SystemSpec{0, LagSum{{{2.0, 0.5}, {-1.0, 0.9}}}}));

  const SystemSpec spec{0, LagSum{{{1.0, 0.3}, {2.0, 0.5}}}};
  for (Index P = 2; P <= 10; ++P) {
    const double tol = default_fixed_point_tol(periodic_summation(spec, P));
    for (const auto& fp : brute_force_fixed_points(spec, P)) REQUIRE_FALSE(satisfies_assumption2(fp.amplitudes, tol));
  }
}

TEST_CASE("brute_force_fixed_points") {
  const auto two = brute_force_fixed_points(SystemSpec::first_order(0.1, 1), 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].pattern == ivec({-1, 1}));
  CHECK(two[1].pattern == ivec({1, -1}));
  CHECK(two[1].amplitudes(0) == doctest::Approx(1 / 1.1).epsilon(1e-14));

  // P = 6 with delay 9: the square wave orbit plus the alternating orbit.
  const SystemSpec ex1 = SystemSpec::first_order(0.1, 9);
  const auto six = brute_force_fixed_points(ex1, 6);
  const double tol = default_fixed_point_tol(periodic_summation(ex1, 6));
  int unimodal = 0;
  for (const auto& fp : six) {
    if (!satisfies_assumption2(fp.amplitudes, tol)) continue;
    ++unimodal;
    CHECK(canonicalize(fp.pattern)->canonical == make_pattern(PatternForm::Square, 6));
  }
  CHECK(unimodal == 6);
  CHECK(six.size() == 8);

  for (std::size_t i = 1; i < six.size(); ++i)
    CHECK(std::lexicographical_compare(six[i - 1].pattern.data(), six[i - 1].pattern.data() + 6,
                                       six[i].pattern.data(), six[i].pattern.data() + 6));

  CHECK_THROWS_AS(brute_force_fixed_points(ex1, kOracleMaxPeriod + 1), EnumerationLimitError);
}

TEST_CASE("oracle fixed points are closed under rotation and negation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const SystemSpec spec = random_lag_sum(rng, 1 + trial % 5);
    const Index P = 4 + trial % 5;
    const auto fps = brute_force_fixed_points(spec, P);
    std::set<std::vector<int>> patterns;
    for (const auto& fp : fps) patterns.insert(std::vector<int>(fp.pattern.data(), fp.pattern.data() + P));
    for (const auto& fp : fps) {
      const SignVector neg = -fp.pattern;
      REQUIRE(patterns.count(std::vector<int>(neg.data(), neg.data() + P)) == 1);
      for (Index k = 1; k < P; ++k) {
        const SignVector rot = cyclic_shift(fp.pattern, k);
        REQUIRE(patterns.count(std::vector<int>(rot.data(), rot.data() + P)) == 1);
        const RealVector u = loop_gain(spec, rot);
        REQUIRE((u - cyclic_shift(fp.amplitudes, k)).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("unimodal fixed points are balanced and respect the period bounds") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const int delay = 1 + trial % 5;
    const SystemSpec spec = random_lag_sum(rng, delay);
    const PeriodBounds bounds = period_bounds(spec);
    for (Index P = 2; P <= 12; ++P) {
      const double tol = default_fixed_point_tol(periodic_summation(spec, P));
      for (const auto& fp : brute_force_fixed_points(spec, P)) {
        if (!satisfies_assumption2(fp.amplitudes, tol)) continue;
        REQUIRE(count_signs(fp.pattern).balanced());
        if (P >= delay) {
          REQUIRE(P >= bounds.lower);
          REQUIRE(P <= bounds.effective_upper());
        }
      }
    }
  }
}

TEST_CASE("canonical search agrees with the exhaustive oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const SystemSpec spec = random_lag_sum(rng, 1 + trial % 4);
    for (Index P = 2; P <= 8; ++P) REQUIRE(search_set(spec, P) == oracle_canonical_set(spec, P));
  }
}

TEST_CASE("loop gain of a unimodal balanced signal stays unimodal") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> delay(0, 6);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const SystemSpec spec = random_lag_sum(rng, delay(rng));
    const Index P = 2 + trial % 15;
    const auto candidates = candidate_patterns(P);
    SignVector s = candidates[static_cast<std::size_t>(trial) % candidates.size()];
    s = cyclic_shift(s, trial % P);
    const RealVector o = loop_gain(spec, s);
    const double tol = 1e-12 * std::max(1.0, o.cwiseAbs().maxCoeff());
    REQUIRE(cyclic_variation(signs(cyclic_diff(o), tol), VariationKind::Minus) <= 2);
    REQUIRE(cyclic_variation(signs(o, tol), VariationKind::Plus) <= 2);
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("no fixed point between delay and twice the delay") {
  for (double a : {0.1, 0.5, 0.9})
    for (int d = 2; d <= 6; ++d) {
      const SystemSpec spec = SystemSpec::first_order(a, d);
      for (Index P = d; P < 2 * d; ++P) {
        if (P < 2) continue;
        const double tol = default_fixed_point_tol(periodic_summation(spec, P));
        for (const auto& fp : brute_force_fixed_points(spec, P))
          REQUIRE_FALSE(satisfies_assumption2(fp.amplitudes, tol));
      }
    }
}

TEST_CASE("square waves at the derived periods") {
  for (int d = 1; d <= 12; ++d) {
    const SystemSpec spec = SystemSpec::first_order(0.1, d);
    REQUIRE(exists_period_twice_delay(spec));
    for (int p : derived_periods(d)) REQUIRE(check_fixed_point(spec, make_pattern(PatternForm::Square, p)).has_value());
  }
}

TEST_CASE("sweep_existence") {
  const SweepResult sweep = sweep_existence(SystemSpec::first_order(0.1, 0), 1, 12, 2, 24);
  std::set<std::pair<int, Index>> existing;
  for (const auto& row : sweep.rows)
    if (row.exists) existing.insert({row.delay, row.period});
  std::set<std::pair<int, Index>> expected{{3, 2}, {5, 2}, {6, 4}, {7, 2}, {9, 2}, {9, 6}, {10, 4}, {11, 2}, {12, 8}};
  for (int d = 1; d <= 12; ++d) expected.insert({d, 2 * d});
  CHECK(existing == expected);

  // One row per (delay, period, form); two forms per period.
  CHECK(sweep.rows.size() == 12u * 23u * 2u - 12u);
  CHECK(std::is_sorted(sweep.rows.begin(), sweep.rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tuple(x.delay, x.period, form_letter(x.form)) < std::tuple(y.delay, y.period, form_letter(y.form));
  }));
  for (const auto& s : sweep.summary) CHECK(s.max_period == Index(2 * s.delay));

  SearchOptions parallel;
  parallel.jobs = 3;
  const SweepResult again = sweep_existence(SystemSpec::first_order(0.1, 0), 1, 12, 2, 24, parallel);
  REQUIRE(again.rows.size() == sweep.rows.size());
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    CHECK(again.rows[i].exists == sweep.rows[i].exists);
    CHECK(again.rows[i].form == sweep.rows[i].form);
  }

  CHECK_THROWS_AS(sweep_existence(SystemSpec::first_order(0.1, 0), 3, 2, 2, 4), InvalidInput);
  CHECK_THROWS_AS(sweep_existence(SystemSpec::first_order(0.1, 0), 1, 2, 1, 4), InvalidInput);
}
