#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wellcheck/complex.hpp"
#include "wellcheck/family.hpp"

namespace wellcheck {

struct RadiiSpec {
  enum class Mode { Auto, Explicit };
  Mode mode = Mode::Auto;
  std::vector<double> values;
};

/// A validated problem instance: complex X, field f, targets A, family, radii.
struct Instance {
  ComplexPtr complex;
  ScalarField field;
  TargetSet targets;
  PerturbationFamily family;
  RadiiSpec radii;
};

/// Parses and validates an instance document. Throws InvalidInput with a JSON
/// pointer to the offending element.
Instance build_complex(const nlohmann::json& doc);
Instance load_instance(const std::string& path);

/// Result of target refinement. `origin[i]` records, for each vertex of the
/// refined complex, the original edge and parameter it was inserted at
/// (or the original vertex index when it existed before).
struct Refinement {
  struct Origin {
    bool original = true;
    std::size_t index = 0;  // vertex index if original, else edge index
    double t = 0.0;
  };
  ComplexPtr complex;
  ScalarField field;
  std::vector<Origin> origin;
  /// For every original edge, the refined edge indices in order from u to v.
  std::vector<std::vector<std::size_t>> edge_chain;

  /// Re-expresses a field living on the unrefined complex on the refined one.
  ScalarField transfer(const ScalarField& g) const;
};

/// Splits edges at every interior point where f hits a target or where the
/// nearest target switches, so that the distance to the targets is linear on
/// every refined edge. Original vertex values are preserved.
Refinement refine_for_targets(const ScalarField& f, const TargetSet& targets);

/// True when no edge of f has an interior target crossing or nearest-target switch.
bool is_refined(const ScalarField& f, const TargetSet& targets);

/// Refines an instance end to end (field, sampled perturbations).
Instance refine_instance(const Instance& instance);

}  // namespace wellcheck
