#include "relayosc/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace relayosc {
namespace {

using nlohmann::json;

const json& require_field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw FormatError(std::string("spec is missing \"") + key + "\"");
  return *it;
}

double require_number(const json& value, const char* what) {
  if (!value.is_number()) throw FormatError(std::string(what) + " must be a number");
  return value.get<double>();
}

json real_array(const RealVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json sign_array(const SignVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

std::string format_real(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

json spec_to_json(const SystemSpec& spec) {
  json doc;
  doc["delay"] = spec.delay;
  if (spec.is_lag_sum()) {
    json lags = json::array();
    for (const auto& term : spec.lags().terms) lags.push_back({{"k", term.gain}, {"p", term.pole}});
    doc["lags"] = std::move(lags);
  } else {
    doc["samples"] = real_array(spec.samples().g0);
    doc["tail_bound"] = spec.samples().tail_bound;
  }
  return doc;
}

SystemSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("spec must be a JSON object");
  const json& delay = require_field(doc, "delay");
  if (!delay.is_number_integer()) throw FormatError("\"delay\" must be an integer");

  SystemSpec spec;
  spec.delay = delay.get<int>();
  const bool has_lags = doc.contains("lags");
  const bool has_samples = doc.contains("samples");
  if (has_lags == has_samples) throw FormatError("spec needs exactly one of \"lags\" or \"samples\"");

  if (has_lags) {
    const json& lags = doc.at("lags");
    if (!lags.is_array()) throw FormatError("\"lags\" must be an array");
    LagSum sum;
    for (const json& term : lags) {
      if (!term.is_object()) throw FormatError("each lag must be an object {\"k\", \"p\"}");
      sum.terms.push_back({require_number(require_field(term, "k"), "lag gain \"k\""),
                           require_number(require_field(term, "p"), "lag pole \"p\"")});
    }
    spec.kernel = std::move(sum);
  } else {
    const json& samples = doc.at("samples");
    if (!samples.is_array()) throw FormatError("\"samples\" must be an array");
    RawSamples raw;
    raw.g0.resize(static_cast<Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
      raw.g0(static_cast<Index>(i)) = require_number(samples[i], "sample");
    if (doc.contains("tail_bound")) raw.tail_bound = require_number(doc.at("tail_bound"), "\"tail_bound\"");
    spec.kernel = std::move(raw);
  }
  try {
    validate(spec);
  } catch (const InvalidSpec& e) {
    throw FormatError(e.what());
  }
  return spec;
}

SystemSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
  return spec_from_json(doc);
}

std::string dump_spec(const SystemSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

SystemSpec read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open spec file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

json report_to_json(const OscillationReport& report) {
  json flags = {{"assumption2", report.flags.assumption2}, {"balanced", report.flags.balanced}};
  flags["within_bounds"] = report.flags.within_bounds ? json(*report.flags.within_bounds) : json(nullptr);
  json doc;
  doc["P"] = report.period;
  doc["P_d"] = report.delay;
  doc["pattern"] = sign_array(report.pattern);
  doc["u"] = real_array(report.amplitudes);
  doc["residual"] = report.residual;
  doc["flags"] = std::move(flags);
  if (auto form = classify_form(report.pattern)) doc["form"] = std::string(1, form_letter(*form));
  return doc;
}

json assumption1_to_json(const Assumption1Report& report) {
  auto condition = [](const ConditionResult& c) {
    json j = {{"ok", c.ok}};
    j["first_violation"] = c.first_violation ? json(*c.first_violation) : json(nullptr);
    return j;
  };
  json doc;
  doc["passed"] = report.passed();
  doc["support_start"] = report.support_start ? json(*report.support_start) : json(nullptr);
  doc["connected_support"] = condition(report.connected_support);
  doc["positive"] = condition(report.positive);
  doc["strictly_decreasing"] = condition(report.strictly_decreasing);
  doc["summable"] = condition(report.summable);
  doc["infinite_support"] = report.infinite_support;
  doc["checked_horizon"] = report.checked_horizon;
  return doc;
}

json bounds_to_json(const PeriodBounds& bounds) {
  json doc = {{"P_d", bounds.delay},
              {"P_s", bounds.dominance},
              {"lower", bounds.lower},
              {"upper", bounds.upper},
              {"effective_upper", bounds.effective_upper()}};
  doc["upper_convex"] = bounds.upper_convex ? json(*bounds.upper_convex) : json(nullptr);
  return doc;
}

json basin_to_json(const BasinHistogram& hist) {
  json doc = json::object();
  for (const auto& [period, count] : hist.periods) doc[std::to_string(period)] = count;
  doc["undetected"] = hist.undetected;
  return doc;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "P_d,P,exists,form\n";
  for (const auto& row : sweep.rows)
    out << row.delay << ',' << row.period << ',' << (row.exists ? 1 : 0) << ',' << form_letter(row.form)
        << '\n';
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep) {
  out << "P_d,max_P,lower,upper\n";
  for (const auto& s : sweep.summary) {
    out << s.delay << ',';
    if (s.max_period) out << *s.max_period;
    out << ',';
    if (s.bounds) out << s.bounds->lower << ',' << s.bounds->effective_upper();
    else out << ',';
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,u,r\n";
  for (Index t = 0; t < traj.u.size(); ++t)
    out << t << ',' << format_real(traj.u(t)) << ',' << traj.r(t) << '\n';
}

}  // namespace relayosc
