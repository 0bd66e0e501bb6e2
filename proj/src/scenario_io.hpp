#pragma once

#include <string>

#include "protocol.hpp"

namespace qpma {

// Parses the flat key-value scenario format (one `key = value` per line, `#`
// comments, comma-separated lists). Throws ParseError with the offending line
// number for malformed text and ValidationError for invariant breaches; the
// returned scenario is validated.
Scenario parse_scenario_text(const std::string& text);

Scenario parse_scenario_file(const std::string& path);

// The bundled three-party worked example: universe {a,b,c,d}, sets {a,c},
// {a,b,c}, {c}, leader 1.
Scenario example_scenario();

std::string render_scenario(const Scenario& scenario);

// Deterministic report text: fixed field order, fixed float precision,
// byte-stable for a given scenario and seed.
std::string render_report(const AggregationReport& report);

} // namespace qpma
