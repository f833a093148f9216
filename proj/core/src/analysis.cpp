#include "wellcheck/analysis.hpp"

#include <algorithm>

#include "wellcheck/errors.hpp"

namespace wellcheck {

namespace {
// An r-perturbation may touch a target exactly at a component's boundary tip;
// rounding there must not turn the touch into a miss.
constexpr double kHitTol = 1e-9;
}  // namespace

std::string_view to_string(OracleCheck::Outcome outcome) {
  switch (outcome) {
    case OracleCheck::Outcome::Consistent: return "consistent";
    case OracleCheck::Outcome::LatticeMissed: return "lattice-missed";
    case OracleCheck::Outcome::Skipped: return "skipped";
  }
  return "skipped";
}

WellField well_field_for(const ScalarField& f, const TargetSet& targets, const PerturbationFamily& family) {
  if (family.kind() == FamilyKind::Shift) return well_field_family(f, targets, family);
  WellField w = well_field_prime(f, targets);
  w.family = family.kind();
  return w;
}

std::vector<std::size_t> hit_components(const ScalarField& g, const TargetSet& targets, const WellGroupFiber& fiber) {
  std::vector<std::size_t> hit;
  for (std::size_t i = 0; i < fiber.components.size(); ++i)
    if (!zeros_on(g, targets, fiber.components[i].component.region, kHitTol).empty()) hit.push_back(i);
  return hit;
}

namespace {

// Compares each analytic verdict with an enumerated family of perturbations.
void crosscheck(Analysis& out, double resolution) {
  const ScalarField& f = out.refined.field;
  const TargetSet& targets = out.refined.targets;
  const FamilyKind kind = out.refined.family.kind();
  LatticeOptions lattice;
  lattice.resolution = resolution;
  lattice.budget = default_lattice_budget();

  for (const auto& fiber : out.diagram.fibers) {
    std::vector<std::vector<std::size_t>> hit_sets{hit_components(f, targets, fiber)};
    std::vector<PerturbedField> scan;
    if (kind == FamilyKind::Shift) scan = shift_candidates(f, fiber.r, resolution);
    for (const auto& g : scan) hit_sets.push_back(hit_components(g.field, targets, fiber));

    for (std::size_t i = 0; i < fiber.components.size(); ++i) {
      const auto& cv = fiber.components[i];
      if (cv.decision.witness) hit_sets.push_back(hit_components(cv.decision.witness->field, targets, fiber));
      OracleCheck check{fiber.r, cv.id(), cv.verdict(), OracleCheck::Outcome::Skipped};
      if (kind == FamilyKind::FullSupNorm && targets.size() == 1) {
        std::optional<PerturbedField> found;
        try {
          found = lattice_search(f, targets, fiber.r, cv.component, lattice);
        } catch (const PreconditionError&) {
          out.oracle.push_back(check);
          continue;
        } catch (const BudgetExceeded&) {
          out.oracle.push_back(check);
          continue;
        }
        if (found && cv.verdict() == Verdict::Unavoidable)
          throw VerificationFailure("lattice search avoided a component certified unavoidable");
        if (found) hit_sets.push_back(hit_components(found->field, targets, fiber));
        check.outcome = found || cv.verdict() == Verdict::Unavoidable ? OracleCheck::Outcome::Consistent
                                                                     : OracleCheck::Outcome::LatticeMissed;
      } else if (kind == FamilyKind::Shift) {
        bool avoided = false;
        for (const auto& g : scan)
          if (zeros_on(g.field, targets, cv.component.region).empty()) avoided = true;
        if (avoided && cv.verdict() == Verdict::Unavoidable)
          throw VerificationFailure("a scanned shift avoided a component certified unavoidable");
        check.outcome = avoided || cv.verdict() == Verdict::Unavoidable ? OracleCheck::Outcome::Consistent
                                                                       : OracleCheck::Outcome::LatticeMissed;
      }
      out.oracle.push_back(check);
    }

    std::sort(hit_sets.begin(), hit_sets.end());
    hit_sets.erase(std::unique(hit_sets.begin(), hit_sets.end()), hit_sets.end());
    if (kind != FamilyKind::SampledParametric && fiber.components.size() <= 20 && hit_sets.size() <= 100) {
      const int rank = subspace_oracle(fiber.components.size(), hit_sets);
      if (rank != fiber.rank)
        throw VerificationFailure("component-basis rank disagrees with the subspace intersection");
      out.subspace.push_back({fiber.r, fiber.rank, rank, hit_sets.size()});
    }
  }
}

}  // namespace

Analysis analyze(const Instance& instance, const AnalyzeOptions& options) {
  Instance input = instance;
  if (options.family) {
    if (*options.family == FamilyKind::FullSupNorm) input.family = PerturbationFamily::full();
    else if (*options.family == FamilyKind::Shift) input.family = PerturbationFamily::shift();
    else throw InvalidInput("a sampled family can only come from the instance file");
  }
  if (options.radii) input.radii = *options.radii;
  if (!(options.lattice_resolution > 0.0)) throw InvalidInput("lattice resolution must be positive");

  Instance refined = refine_instance(input);
  MergeTree tree(well_field_for(refined.field, refined.targets, refined.family));
  StepFunction betti0 = tree.betti0_curve();
  WellDiagram diagram = well_diagram(tree, refined.field, refined.targets, refined.family, refined.radii);
  SWLReport swl = swl_check(diagram, tree, options.all_pairs);

  Analysis out{std::move(input), std::move(refined), std::move(tree), std::move(betti0),
               std::move(diagram), std::move(swl), options.all_pairs, {}, {}};
  if (options.oracle_crosscheck) crosscheck(out, options.lattice_resolution);
  return out;
}

}  // namespace wellcheck
