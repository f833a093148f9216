#include "wellcheck/well_groups.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>

#include "wellcheck/errors.hpp"

namespace wellcheck {

const ComponentVerdict* WellGroupFiber::find(int id) const {
  for (const auto& c : components)
    if (c.id() == id) return &c;
  return nullptr;
}

WellGroupFiber well_group_rank(const MergeTree& tree, const ScalarField& f, const TargetSet& targets, double r,
                               const PerturbationFamily& family) {
  WellGroupFiber fiber;
  fiber.r = r;
  for (auto& comp : tree.components_at(r)) {
    AvoidabilityDecision decision = avoidable(comp, f, targets, r, family);
    if (decision.verdict == Verdict::Unavoidable) ++fiber.rank;
    if (decision.verdict != Verdict::Avoidable) ++fiber.rank_upper;
    fiber.components.push_back({std::move(comp), std::move(decision)});
  }
  return fiber;
}

// Zassenhaus: stacking rows (u | u) for a basis of U and (w | 0) for a basis
// of W, the echelon rows with a vanishing left half span U n W on the right.
int subspace_oracle(std::size_t m, const std::vector<std::vector<std::size_t>>& subsets) {
  if (m > 20) throw PreconditionError("subspace_oracle: at most 20 components supported");
  if (subsets.size() > 100) throw PreconditionError("subspace_oracle: at most 100 subsets supported");
  using Row = std::uint64_t;
  const Row right_mask = (Row{1} << m) - 1;

  auto echelon = [](std::vector<Row> rows) {
    std::vector<Row> out;
    for (Row row : rows) {
      for (Row pivot : out)
        if (row & std::bit_floor(pivot)) row ^= pivot;
      if (!row) continue;
      // Keep `out` reduced against the new pivot and sorted by leading bit.
      const Row lead = std::bit_floor(row);
      for (Row& other : out)
        if (other & lead) other ^= row;
      out.push_back(row);
      std::sort(out.begin(), out.end(), std::greater<>());
    }
    return out;
  };

  std::vector<Row> basis;
  for (std::size_t i = 0; i < m; ++i) basis.push_back(Row{1} << i);
  for (const auto& subset : subsets) {
    std::vector<Row> rows;
    for (Row u : basis) rows.push_back((u << m) | u);
    for (std::size_t i : subset) {
      if (i >= m) throw PreconditionError("subspace_oracle: index out of range");
      rows.push_back(Row{1} << (i + m));
    }
    std::vector<Row> next;
    for (Row row : echelon(std::move(rows)))
      if ((row >> m) == 0) next.push_back(row & right_mask);
    basis = std::move(next);
  }
  return static_cast<int>(basis.size());
}

// ---------------------------------------------------------------------------

const WellGroupFiber& WellDiagram::fiber_at(double r) const {
  for (const auto& fiber : fibers)
    if (fiber.r == r) return fiber;
  throw PreconditionError("well diagram has no fiber at the requested radius");
}

std::vector<double> critical_radii(const MergeTree& tree, const ScalarField& f, const TargetSet& targets,
                                   const PerturbationFamily& family) {
  std::vector<double> out{0.0};
  for (double w : tree.well().values.values()) out.push_back(w);
  for (const auto& m : tree.merges()) out.push_back(m.value);
  for (double y : f.values())
    for (double a : targets.values()) out.push_back(std::abs(y - a));

  if (family.kind() == FamilyKind::Shift) {
    // Hitting-interval endpoints move as (a* - a) +- r along partial edges and
    // are fixed at f(v) - a at vertices.
    std::vector<double> fixed;
    for (double y : f.values())
      for (double a : targets.values()) fixed.push_back(a - y);
    std::vector<double> moving;
    for (double a : targets.values())
      for (double b : targets.values()) moving.push_back(a - b);
    for (double y : moving) out.push_back(std::abs(y) / 2.0);
    for (double x : fixed)
      for (double y : moving) out.push_back(std::abs(x - y));
    for (double y : moving)
      for (double z : moving) out.push_back(std::abs(y - z) / 2.0);
  }

  std::erase_if(out, [](double v) { return !std::isfinite(v) || v < 0.0; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

WellDiagram well_diagram(const MergeTree& tree, const ScalarField& f, const TargetSet& targets,
                         const PerturbationFamily& family, const RadiiSpec& radii) {
  for (double r : radii.values)
    if (!std::isfinite(r) || r < 0.0) throw InvalidInput("radii must be finite and nonnegative");

  WellDiagram diagram;
  if (radii.mode == RadiiSpec::Mode::Auto) {
    if (family.kind() == FamilyKind::SampledParametric)
      throw InvalidInput("no definitional well field; supply radii explicitly");
    diagram.grid = critical_radii(tree, f, targets, family);
  } else {
    if (radii.values.empty()) throw InvalidInput("explicit radii mode needs at least one radius");
    diagram.grid.push_back(0.0);
  }
  diagram.grid.insert(diagram.grid.end(), radii.values.begin(), radii.values.end());
  std::sort(diagram.grid.begin(), diagram.grid.end());
  diagram.grid.erase(std::unique(diagram.grid.begin(), diagram.grid.end()), diagram.grid.end());

  const auto& grid = diagram.grid;
  std::vector<double> samples;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    samples.push_back(grid[i]);
    samples.push_back(i + 1 < grid.size() ? 0.5 * (grid[i] + grid[i + 1]) : grid[i] + 1.0);
  }

  for (double r : samples) {
    WellGroupFiber fiber = well_group_rank(tree, f, targets, r, family);
    if (!diagram.fibers.empty()) fiber.injective_from_previous = tree.forward_map(diagram.fibers.back().r, r).injective;
    diagram.fibers.push_back(std::move(fiber));
  }

  diagram.rank.breaks = grid;
  diagram.rank_upper.breaks = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& at = diagram.fibers[2 * i];
    const auto& after = diagram.fibers[2 * i + 1];
    diagram.rank.at.push_back(at.rank);
    diagram.rank.after.push_back(after.rank);
    diagram.rank_upper.at.push_back(at.rank_upper);
    diagram.rank_upper.after.push_back(after.rank_upper);
  }
  return diagram;
}

// ---------------------------------------------------------------------------

namespace {

struct PairOutcome {
  SWLPair pair;
  std::vector<SWLViolation> violations;
};

PairOutcome check_pair(const WellGroupFiber& lower, const WellGroupFiber& upper, const MergeTree& tree) {
  const ForwardMap map = tree.forward_map(lower.r, upper.r);
  PairOutcome out;
  out.pair = {lower.r, upper.r, map.injective, true};

  std::vector<int> unavoidable_at_r;
  for (const auto& c : lower.components) {
    if (!map.image.count(c.id())) throw PreconditionError("swl_check: fiber component unknown to the merge tree");
    if (c.verdict() == Verdict::Unavoidable) unavoidable_at_r.push_back(c.id());
  }
  for (const auto& d : upper.components) {
    if (d.verdict() != Verdict::Unavoidable) continue;
    std::vector<int> preimages;
    bool covered = false;
    bool undecided = false;
    for (const auto& c : lower.components) {
      if (map.image.at(c.id()) != d.id()) continue;
      preimages.push_back(c.id());
      covered = covered || c.verdict() == Verdict::Unavoidable;
      undecided = undecided || c.verdict() == Verdict::Unknown;
    }
    if (covered || undecided) continue;
    out.pair.holds = false;
    out.violations.push_back({lower.r, upper.r, d.id(), std::move(preimages), unavoidable_at_r});
  }
  return out;
}

}  // namespace

SWLReport swl_check(const WellDiagram& diagram, const MergeTree& tree, bool all_pairs) {
  SWLReport report;
  const auto& fibers = diagram.fibers;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const std::size_t stop = all_pairs ? fibers.size() : std::min(fibers.size(), i + 2);
    for (std::size_t j = i + 1; j < stop; ++j) {
      auto outcome = check_pair(fibers[i], fibers[j], tree);
      report.pairs.push_back(outcome.pair);
      for (auto& v : outcome.violations) report.violations.push_back(std::move(v));
    }
  }
  report.component_count_at_0 = tree.components_at(0.0).size();
  report.admissible = true;  // finite complex: finitely many components
  report.tame = true;
  return report;
}

bool reverify_violation(const SWLViolation& violation, const WellDiagram& diagram, const MergeTree& tree) {
  if (!(violation.r <= violation.s)) return false;
  const WellGroupFiber& lower = diagram.fiber_at(violation.r);
  const WellGroupFiber& upper = diagram.fiber_at(violation.s);
  const ComponentVerdict* d = upper.find(violation.component);
  if (!d || d->verdict() != Verdict::Unavoidable) return false;
  if (!verify_decision(d->decision, d->component, tree.well().source, tree.well().targets, upper.r)) return false;
  const ForwardMap map = tree.forward_map(violation.r, violation.s);
  std::vector<int> preimages;
  for (const auto& c : lower.components) {
    if (map.image.at(c.id()) != violation.component) continue;
    if (c.verdict() != Verdict::Avoidable) return false;
    if (!verify_decision(c.decision, c.component, tree.well().source, tree.well().targets, lower.r)) return false;
    preimages.push_back(c.id());
  }
  return preimages == violation.preimages;
}

Instance counterexample_instance() {
  auto complex = std::make_shared<const Complex1D>(
      "shift-counterexample",
      std::vector<Vertex>{{0, -3.0}, {1, -2.0}, {2, 0.0}, {3, 2.0}, {4, 3.0}},
      std::vector<Edge>{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 2.0}, {3, 4, 1.0}});
  ScalarField f(complex, {-3.0, -2.0, 0.0, 2.0, 3.0});
  return Instance{complex, std::move(f), TargetSet({-2.0, 2.0}), PerturbationFamily::shift(), RadiiSpec{}};
}

}  // namespace wellcheck
