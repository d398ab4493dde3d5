// relayosc: analyze relay feedback loops for unimodal periodic oscillations.
//
// Exit codes: 0 success, 1 analysis failure, 2 usage / input error or refusal.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "relayosc/io.hpp"

namespace {

using namespace relayosc;
using nlohmann::json;

struct Range {
  long long lo = 0;
  long long hi = 0;
};

Range parse_range(const std::string& text, const char* flag) {
  const auto dots = text.find("..");
  Range r;
  auto parse = [&](std::string_view s, long long& out) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size() && !s.empty();
  };
  if (dots == std::string::npos ||
      !parse(std::string_view(text).substr(0, dots), r.lo) ||
      !parse(std::string_view(text).substr(dots + 2), r.hi))
    throw InvalidInput(std::string(flag) + " expects a..b, got \"" + text + "\"");
  if (r.lo > r.hi) throw InvalidInput(std::string(flag) + " range is empty");
  return r;
}

SignVector parse_prefix(const std::string& text) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    int v = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size() || v < -1 || v > 1)
      throw InvalidInput("--prefix expects comma-separated entries in {-1,0,1}");
    values.push_back(v);
  }
  SignVector out(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Index>(i)) = values[i];
  return out;
}

struct Common {
  std::string spec_path;
  std::string out_path;
  unsigned jobs = 1;
  std::optional<double> zero_tol;
  std::optional<double> fp_tol;

  FixedPointOptions fixed_point() const { return {zero_tol, fp_tol}; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "System spec JSON file")->required();
  cmd->add_option("--out", c.out_path, "Output file (default: standard output)");
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--zero-tol", c.zero_tol, "Zero tolerance for signs")->check(CLI::PositiveNumber);
  cmd->add_option("--fp-tol", c.fp_tol, "Fixed-point residual tolerance")->check(CLI::PositiveNumber);
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.out_path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + c.out_path);
  out << text;
}

json tolerance_json(const std::optional<double>& value) {
  return value ? json(*value) : json("1e-9 * ||gbar||_1");
}

json fixed_point_json(const FixedPoint& fp, double zero_tol) {
  const auto counts = count_signs(fp.pattern);
  json j;
  j["pattern"] = json::array();
  for (Index i = 0; i < fp.pattern.size(); ++i) j["pattern"].push_back(fp.pattern(i));
  j["u"] = json::array();
  for (Index i = 0; i < fp.amplitudes.size(); ++i) j["u"].push_back(fp.amplitudes(i));
  j["assumption2"] = fp.pattern.size() > 1 && satisfies_assumption2(fp.amplitudes, zero_tol);
  j["balanced"] = counts.balanced();
  return j;
}

int cmd_analyze(const Common& c) {
  const SystemSpec spec = read_spec_file(c.spec_path);
  const Assumption1Report a1 = validate_assumption1(spec);

  json doc;
  doc["spec"] = spec_to_json(spec);
  doc["assumption1"] = assumption1_to_json(a1);
  doc["convex"] = a1.passed_ignoring_support_length() ? json(is_convex_on_support(spec)) : json(nullptr);
  doc["absence_guaranteed"] = absence_guaranteed(spec);
  try {
    doc["P_s"] = dominance_time(spec);
  } catch (const Error& e) {
    doc["P_s"] = nullptr;
    doc["P_s_error"] = e.what();
  }
  try {
    doc["bounds"] = bounds_to_json(period_bounds(spec));
  } catch (const Error& e) {
    doc["bounds"] = nullptr;
    doc["bounds_error"] = e.what();
  }
  doc["exists_2Pd"] = spec.delay >= 1 ? json(exists_period_twice_delay(spec)) : json(nullptr);
  doc["derived_periods"] = spec.delay >= 1 ? json(derived_periods(spec.delay)) : json::array();
  doc["tolerances"] = {{"zero_tol", tolerance_json(c.zero_tol)},
                       {"fp_tol", tolerance_json(c.fp_tol)},
                       {"summation_tol", kDefaultSummationTol},
                       {"check_horizon", kDefaultCheckHorizon}};
  emit(c, doc.dump(2) + "\n");
  return 0;
}

int cmd_search(const Common& c, const std::string& p_range, bool prune) {
  const SystemSpec spec = read_spec_file(c.spec_path);
  const Range p = parse_range(p_range, "--p-range");
  if (p.lo < 2) throw InvalidInput("--p-range must start at 2 or above");
  SearchOptions opts{c.fixed_point(), prune, c.jobs};
  json doc = json::array();
  for (const auto& report : search_oscillations(spec, p.lo, p.hi, opts)) doc.push_back(report_to_json(report));
  emit(c, doc.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Common& c, const std::string& pd_range, const std::string& p_range) {
  const SystemSpec spec = read_spec_file(c.spec_path);
  const Range pd = parse_range(pd_range, "--pd-range");
  const Range p = parse_range(p_range, "--p-range");
  if (pd.lo < 0) throw InvalidInput("--pd-range must be nonnegative");
  if (p.lo < 2) throw InvalidInput("--p-range must start at 2 or above");
  SearchOptions opts{c.fixed_point(), false, c.jobs};
  const SweepResult sweep =
      sweep_existence(spec, static_cast<int>(pd.lo), static_cast<int>(pd.hi), p.lo, p.hi, opts);

  std::ostringstream rows;
  write_sweep_csv(rows, sweep);
  emit(c, rows.str());
  std::ostringstream summary;
  write_sweep_summary_csv(summary, sweep);
  if (c.out_path.empty()) {
    std::cerr << summary.str();
  } else {
    std::ofstream out(c.out_path + ".max.csv", std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + c.out_path + ".max.csv");
    out << summary.str();
  }
  return 0;
}

int cmd_simulate(const Common& c, Index steps, const std::string& prefix_text, int trials,
                 std::uint64_t seed, std::optional<Index> max_period) {
  const SystemSpec spec = read_spec_file(c.spec_path);
  if (steps < 1) throw InvalidInput("--steps must be at least 1");
  if (spec.delay < 1)
    throw NotApplicableError(
        "delay 0: the loop is algebraic and cannot be simulated explicitly; for a delay-free "
        "kernel meeting the monotonicity assumption no unimodal oscillation exists");

  BasinOptions basin{max_period, std::nullopt, c.jobs};
  if (trials > 0) {
    emit(c, basin_to_json(basin_probe(spec, trials, seed, steps, basin)).dump(2) + "\n");
    return 0;
  }

  const SignVector prefix = prefix_text.empty() ? SignVector::Ones(spec.delay) : parse_prefix(prefix_text);
  const Trajectory traj = simulate(spec, prefix, steps);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  emit(c, csv.str());

  const Index pmax = max_period.value_or(std::max<Index>(1, steps / 4));
  std::ostream& report = c.out_path.empty() ? std::cerr : std::cout;
  if (auto cycle = detect_period(traj, pmax, default_cycle_tol(spec, pmax)))
    report << "period " << cycle->period << " transient " << cycle->transient << "\n";
  else
    report << "no period detected up to " << pmax << "\n";
  return 0;
}

int cmd_oracle(const Common& c, Index period) {
  const SystemSpec spec = read_spec_file(c.spec_path);
  if (period < 1) throw InvalidInput("--p must be at least 1");
  if (period > kOracleMaxPeriod)
    throw EnumerationLimitError("refusing to enumerate 3^" + std::to_string(period) +
                                " patterns; the oracle is limited to P <= " +
                                std::to_string(kOracleMaxPeriod));
  const PeriodicProfile profile = periodic_summation(spec, period);
  const double zero_tol = c.zero_tol.value_or(default_fixed_point_tol(profile));
  json doc = json::array();
  for (const auto& fp : brute_force_fixed_points(spec, period, c.zero_tol))
    doc.push_back(fixed_point_json(fp, zero_tol));
  emit(c, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic oscillation analysis for discrete-time relay feedback loops"};
  app.require_subcommand(1);

  Common common;
  std::string pd_range, p_range, prefix;
  bool prune = false;
  Index steps = 500;
  int trials = 0;
  std::uint64_t seed = 0;
  std::optional<Index> max_period;
  Index oracle_period = 0;

  auto* analyze = app.add_subcommand("analyze", "Assumption checks, bounds and existence tests");
  add_common(analyze, common);

  auto* search = app.add_subcommand("search", "Canonical-pattern fixed-point search");
  add_common(search, common);
  search->add_option("--p-range", p_range, "Periods a..b")->required();
  search->add_flag("--prune", prune, "Skip periods outside the bounds");

  auto* sweep = app.add_subcommand("sweep", "Existence grid over delays and periods (CSV)");
  add_common(sweep, common);
  sweep->add_option("--pd-range", pd_range, "Delays a..b")->required();
  sweep->add_option("--p-range", p_range, "Periods a..b")->required();

  auto* sim = app.add_subcommand("simulate", "Time-domain simulation and period detection");
  add_common(sim, common);
  sim->add_option("--steps", steps, "Number of samples T");
  sim->add_option("--prefix", prefix, "Relay prefix r(-L..-1), e.g. 1,1,-1 (default all ones)");
  sim->add_option("--trials", trials, "Run a basin probe with this many random prefixes");
  sim->add_option("--seed", seed, "Seed for the basin probe");
  sim->add_option("--max-period", max_period, "Longest period to detect (default T/4)");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive fixed-point enumeration for one period");
  add_common(oracle, common);
  oracle->add_option("--p", oracle_period, "Period P (at most 14)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(common);
    if (*search) return cmd_search(common, p_range, prune);
    if (*sweep) return cmd_sweep(common, pd_range, p_range);
    if (*sim) return cmd_simulate(common, steps, prefix, trials, seed, max_period);
    if (*oracle) return cmd_oracle(common, oracle_period);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotApplicableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EnumerationLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
