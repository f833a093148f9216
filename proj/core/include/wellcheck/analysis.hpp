#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wellcheck/instance.hpp"
#include "wellcheck/merge_tree.hpp"
#include "wellcheck/well_groups.hpp"

namespace wellcheck {

struct AnalyzeOptions {
  std::optional<FamilyKind> family;  // replaces the instance's family (full or shift only)
  std::optional<RadiiSpec> radii;    // replaces the instance's radii
  bool all_pairs = false;
  bool oracle_crosscheck = false;
  double lattice_resolution = 0.05;
};

/// Outcome of comparing one analytic verdict with brute-force enumeration.
struct OracleCheck {
  double r = 0.0;
  int component = 0;
  Verdict verdict = Verdict::Unknown;
  enum class Outcome { Consistent, LatticeMissed, Skipped } outcome = Outcome::Skipped;
};

struct FiberOracle {
  double r = 0.0;
  int rank = 0;
  int subspace_rank = 0;
  std::size_t hit_sets = 0;
};

std::string_view to_string(OracleCheck::Outcome outcome);

struct Analysis {
  Instance input;    // as analysed (overrides applied)
  Instance refined;  // refined for the targets
  MergeTree tree;
  StepFunction betti0;
  WellDiagram diagram;
  SWLReport swl;
  bool all_pairs = false;
  std::vector<OracleCheck> oracle;
  std::vector<FiberOracle> subspace;
};

/// Well field used to filter the complex: distance to A for the full and
/// sampled families, the definitional shift radius for shifts.
WellField well_field_for(const ScalarField& f, const TargetSet& targets, const PerturbationFamily& family);

Analysis analyze(const Instance& instance, const AnalyzeOptions& options = {});

/// Components of the fiber whose region meets g^{-1}(A), as fiber positions.
/// Values within 1e-9 of a target count as meeting it.
std::vector<std::size_t> hit_components(const ScalarField& g, const TargetSet& targets, const WellGroupFiber& fiber);

}  // namespace wellcheck
