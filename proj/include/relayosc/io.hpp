#pragma once

// Spec files, JSON reports and CSV exports.
//
// Spec documents:
//   {"delay": 9, "lags": [{"k": 1.0, "p": 0.1}]}
//   {"delay": 2, "samples": [1.0, 0.5, 0.25], "tail_bound": 0.25}
// dump_spec writes a canonical form; parse_spec(dump_spec(s)) == s bit for bit.

#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"
#include "relayosc/oscillation.hpp"
#include "relayosc/simulator.hpp"

namespace relayosc {

nlohmann::json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const nlohmann::json& doc);

SystemSpec parse_spec(std::string_view text);
std::string dump_spec(const SystemSpec& spec);
SystemSpec read_spec_file(const std::string& path);

/// Shortest decimal that reads back to the same double.
std::string format_real(double x);

nlohmann::json report_to_json(const OscillationReport& report);
nlohmann::json assumption1_to_json(const Assumption1Report& report);
nlohmann::json bounds_to_json(const PeriodBounds& bounds);
nlohmann::json basin_to_json(const BasinHistogram& hist);

/// Header `P_d,P,exists,form`, one row per evaluated (delay, period, form).
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
/// Header `P_d,max_P,lower,upper`; empty fields where undefined.
void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep);
/// Header `t,u,r`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace relayosc
