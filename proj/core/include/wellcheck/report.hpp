#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wellcheck/analysis.hpp"

namespace wellcheck {

/// Deterministic serialization: object keys sorted, floats printed with
/// %.12g, non-finite numbers as null, two-space indentation.
std::string canonical_json(const nlohmann::json& doc);

nlohmann::json instance_to_json(const Instance& instance);
nlohmann::json location_to_json(const Complex1D& complex, const Location& x);
Location location_from_json(const Complex1D& complex, const nlohmann::json& node);

/// Vertex values keyed by vertex id plus interior knots keyed by edge index.
nlohmann::json field_to_json(const ScalarField& field);
ScalarField field_from_json(const ComplexPtr& complex, const nlohmann::json& node);

nlohmann::json decision_to_json(const Complex1D& complex, const AvoidabilityDecision& decision);
AvoidabilityDecision decision_from_json(const ComplexPtr& complex, const nlohmann::json& node);

/// Pieces as {"r_lo", "r_hi", value_key, "lo_closed", "hi_closed"}.
nlohmann::json step_function_json(const StepFunction& fn, const std::string& value_key);
/// Columns r_lo,r_hi,value,lo_closed,hi_closed; r_hi of the tail is "inf".
std::string step_function_csv(const StepFunction& fn);

nlohmann::json well_diagram_json(const WellDiagram& diagram, bool with_upper);
nlohmann::json swl_json(const SWLReport& report, bool all_pairs);
nlohmann::json analysis_json(const Analysis& analysis);

/// Rebuilds the analysis from the report's instance and re-checks every
/// emitted witness, certificate and SWL violation. Returns the failures.
std::vector<std::string> reverify_report(const nlohmann::json& report);

}  // namespace wellcheck
