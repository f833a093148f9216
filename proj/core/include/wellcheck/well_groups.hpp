#pragma once

#include <cstddef>
#include <vector>

#include "wellcheck/instance.hpp"
#include "wellcheck/merge_tree.hpp"
#include "wellcheck/perturbation.hpp"

namespace wellcheck {

/// One sublevel component at radius r together with its avoidability decision.
struct ComponentVerdict {
  Component component;
  AvoidabilityDecision decision;

  int id() const { return component.id; }
  Verdict verdict() const { return decision.verdict; }
};

/// The well group at a single radius, in the component basis: U(r) is spanned
/// by the components no r-perturbation can avoid.
struct WellGroupFiber {
  double r = 0.0;
  std::vector<ComponentVerdict> components;
  int rank = 0;        // number of Unavoidable components
  int rank_upper = 0;  // rank plus Unknown components
  /// Whether the forward map from the previous sample radius is injective.
  bool injective_from_previous = true;

  const ComponentVerdict* find(int id) const;
};

WellGroupFiber well_group_rank(const MergeTree& tree, const ScalarField& f, const TargetSet& targets, double r,
                               const PerturbationFamily& family);

/// Rank of the intersection of span{e_i : i in S} over all given subsets,
/// computed by exact elimination over the two-element field. Indices are
/// 0-based and must lie in [0, m).
int subspace_oracle(std::size_t m, const std::vector<std::vector<std::size_t>>& subsets);

struct WellDiagram {
  StepFunction rank;
  StepFunction rank_upper;
  /// Breakpoints of the step functions (breaks[0] == 0).
  std::vector<double> grid;
  /// Fibers at every sample radius: each breakpoint, each midpoint between
  /// consecutive breakpoints, and one point past the last breakpoint.
  std::vector<WellGroupFiber> fibers;

  const WellGroupFiber& fiber_at(double r) const;
};

/// Candidate radii where the rank can change: well-field vertex values, merge
/// values, |f(v) - a|, and for shifts the radii where a hitting interval
/// endpoint meets +-r or another endpoint.
std::vector<double> critical_radii(const MergeTree& tree, const ScalarField& f, const TargetSet& targets,
                                   const PerturbationFamily& family);

WellDiagram well_diagram(const MergeTree& tree, const ScalarField& f, const TargetSet& targets,
                         const PerturbationFamily& family, const RadiiSpec& radii);

struct SWLPair {
  double r = 0.0;
  double s = 0.0;
  bool injective = true;
  bool holds = true;
};

struct SWLViolation {
  double r = 0.0;
  double s = 0.0;
  int component = 0;  // the Unavoidable s-component
  /// Components at r mapping into it, none of which is Unavoidable.
  std::vector<int> preimages;
  /// Unavoidable components at r (the basis of U(r)).
  std::vector<int> unavoidable_at_r;
};

struct SWLReport {
  std::vector<SWLPair> pairs;
  std::vector<SWLViolation> violations;
  bool admissible = true;
  std::size_t component_count_at_0 = 0;
  bool tame = true;
};

/// Checks U(s) in f_r^s(U(r)) for consecutive fiber pairs (all pairs when
/// `all_pairs`). In the component basis this means every Unavoidable
/// s-component receives an Unavoidable r-component.
SWLReport swl_check(const WellDiagram& diagram, const MergeTree& tree, bool all_pairs = false);

/// Re-derives a reported violation from the stored fibers and the tree.
bool reverify_violation(const SWLViolation& violation, const WellDiagram& diagram, const MergeTree& tree);

/// X = [-3, 3] split at -2, 0, 2; f the inclusion; A = {-2, 2}; shifts only.
Instance counterexample_instance();

}  // namespace wellcheck
