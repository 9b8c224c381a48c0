#pragma once

#include "safeadapt/sim.hpp"

#include <iosfwd>
#include <string>

namespace safeadapt {

// Scenario files are JSON objects keyed by the Scenario field names; missing
// keys keep their defaults.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
// Accepts "default_p1", "default_p2" or a path to a JSON file.
Scenario load_scenario(const std::string& name_or_path);

// Header: t, x_0..x_3, x_m_0.., u_*, r_star_*, r_s_*, h_x, h_xm, hr_x,
// delta_ebsb, beta_ebsf, theta_hat_*, lambda_hat_*, V, theta_lo_*, theta_hi_*,
// lambda_lo_*, lambda_hi_*, jitter.
std::string trace_csv_header(const Trace& trace);
void write_trace_csv(std::ostream& os, const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);
// Restores rows only; dimensions are inferred from the header.
Trace read_trace_csv(std::istream& is);
Trace read_trace_csv_file(const std::string& path);

// Writes to path.tmp and renames.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace safeadapt
