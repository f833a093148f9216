#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wellcheck/complex.hpp"
#include "wellcheck/family.hpp"
#include "wellcheck/merge_tree.hpp"
#include "wellcheck/well_function.hpp"

namespace wellcheck {

enum class Provenance { Identity, Shift, Clamp, Blend, Lattice, User, PointWitness };

std::string_view to_string(Provenance p);

/// A perturbation g of f with its certified sup-distance.
struct PerturbedField {
  ScalarField field;
  double distance = 0.0;
  Provenance provenance = Provenance::User;
  double shift = 0.0;  // the translation t when provenance == Shift
};

/// Wraps g with its exact sup-distance to f.
PerturbedField certify(const ScalarField& g, const ScalarField& f, Provenance provenance, double shift = 0.0);

/// Solutions of g(x) = a (a in targets) inside the region, solved per linear
/// piece. With tol > 0 every point where |g - a| <= tol also counts.
std::vector<Location> zeros_on(const ScalarField& g, const TargetSet& targets, const Region& region,
                               double tol = 0.0);
inline std::vector<Location> zeros_on(const PerturbedField& g, const TargetSet& targets, const Region& region,
                                      double tol = 0.0) {
  return zeros_on(g.field, targets, region, tol);
}

// ---------------------------------------------------------------------------
// Blending two perturbations along a weight that separates two closed sets.

/// PL weights: 1 on C, 0 on C', d(x,C') / (d(x,C) + d(x,C')) at the nodes in
/// between, where d is path length in the complex.
struct BlendWeights {
  ScalarField phi;
};

BlendWeights urysohn(const Complex1D& complex, const Region& near, const Region& far);
BlendWeights urysohn(const ComplexPtr& complex, const Region& near, const Region& far);

/// h = phi*g + (1-phi)*g' evaluated at the union of all nodes and extended
/// linearly. Requires g zero-free on C and g' zero-free on C' (w.r.t. target)
/// and C, C' disjoint; verifies that h is a max(d(g), d(g'))-perturbation that
/// agrees with g on C, with g' on C', and has no zero on C u C'.
PerturbedField blend(const ScalarField& f, const PerturbedField& g, const PerturbedField& g_prime,
                     const Region& near, const Region& far, double target);

// ---------------------------------------------------------------------------
// Avoidability of a sublevel component.

enum class Verdict { Avoidable, Unavoidable, Unknown };

std::string_view to_string(Verdict v);

/// Any r-perturbation g has g(high) >= a and g(low) <= a, so g - a changes
/// sign along a path inside the component.
struct BandCertificate {
  double target = 0.0;
  double r = 0.0;
  Extremum high;  // value is f(high) - target
  Extremum low;   // value is f(low) - target
};

/// For shifts f + t: the component is hit iff t lies in one of these closed
/// intervals; their union covers [-r, r].
struct ShiftCoverCertificate {
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    double target = 0.0;
  };
  double r = 0.0;
  std::vector<Piece> pieces;
};

using Certificate = std::variant<std::monostate, BandCertificate, ShiftCoverCertificate>;

struct AvoidabilityDecision {
  Verdict verdict = Verdict::Unknown;
  std::optional<PerturbedField> witness;
  Certificate certificate;
};

AvoidabilityDecision avoidable(const Component& comp, const ScalarField& f, const TargetSet& targets, double r,
                               const PerturbationFamily& family);

/// Re-checks a decision: witnesses must be within r (+1e-9) and zero-free on
/// the component; certificates must satisfy their defining inequalities.
bool verify_decision(const AvoidabilityDecision& decision, const Component& comp, const ScalarField& f,
                     const TargetSet& targets, double r, std::string* why = nullptr);

/// Clamp witnesses for a single target under the sup norm.
PerturbedField clamp_above(const ScalarField& f, double target, double r, double delta);
PerturbedField clamp_below(const ScalarField& f, double target, double r, double delta);

// ---------------------------------------------------------------------------
// Brute-force oracle.

struct LatticeOptions {
  double resolution = 0.05;
  std::size_t max_free_vertices = 10;
  std::uint64_t budget = 10'000'000;  // support checks plus branch nodes
  /// A candidate counts as avoiding only if |g - a| > tol on the component.
  double tol = 1e-9;
};

/// Candidate budget, honouring the WELLCHECK_BUDGET environment variable.
std::uint64_t default_lattice_budget();

/// Searches g = f + offsets with vertex offsets on the lattice
/// {-r, -r + res, ..., r} over the vertices that influence g on the component
/// (members and the far ends of partial edges); all other vertices keep
/// offset 0. A zero-free g keeps the connected component inside one gap of
/// the targets, so each gap is tried in ascending order as a constraint
/// problem: every touched edge ties the offsets of its two ends through the
/// nodes of f inside the component. Arc consistency is maintained while
/// branching, which only removes levels with no partner on some edge, so a
/// failed search means no lattice point avoids the component. The budget
/// counts support checks and branch nodes.
std::optional<PerturbedField> lattice_search(const ScalarField& f, const TargetSet& targets, double r,
                                             const Component& comp, const LatticeOptions& options = {});

/// Translations f + t for t on the lattice {-r, -r + res, ..., r}.
std::vector<PerturbedField> shift_candidates(const ScalarField& f, double r, double resolution);

// ---------------------------------------------------------------------------
// r-minimizing perturbation by iterated blending.

struct MinimizingEntry {
  int component = 0;
  Verdict verdict = Verdict::Unknown;
  bool hit = false;  // h has a zero on the component
};

struct MinimizingResult {
  PerturbedField h;
  std::vector<MinimizingEntry> ledger;
};

MinimizingResult minimizing_perturbation(const ScalarField& f, double target, double r,
                                         const PerturbationFamily& family, const MergeTree& tree);

}  // namespace wellcheck
