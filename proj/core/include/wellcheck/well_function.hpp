#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "wellcheck/complex.hpp"
#include "wellcheck/family.hpp"

namespace wellcheck {

enum class WellKind { Primed, DoublePrimed, Definitional };

std::string_view to_string(WellKind kind);

/// Nonnegative PL field measuring how far f must move to reach the targets,
/// together with the field and targets it was computed from.
struct WellField {
  ScalarField values;
  ScalarField source;
  TargetSet targets;
  WellKind kind = WellKind::Primed;
  FamilyKind family = FamilyKind::FullSupNorm;

  double at(std::size_t vertex) const { return values.value(vertex); }
};

struct RealInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const RealInterval&) const = default;
};

/// Sorted disjoint closed intervals on the real line.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  /// Sorts and merges overlapping (or touching) intervals.
  explicit IntervalUnion(std::vector<RealInterval> intervals);

  std::span<const RealInterval> intervals() const { return intervals_; }
  bool contains(double y) const;
  bool covers(RealInterval range) const;
  /// Uncovered open gaps inside [range.lo, range.hi] (endpoints of the gaps
  /// are boundary points of the union or of the range).
  std::vector<RealInterval> gaps_within(RealInterval range) const;

 private:
  std::vector<RealInterval> intervals_;
};

/// Closed thickening A_r: union of [a - r, a + r].
IntervalUnion thicken(const TargetSet& targets, double r);

/// Distance to the nearest target, per vertex. Expects a refined field.
WellField well_field_prime(const ScalarField& f, const TargetSet& targets);

/// Smallest r with f(v) in thicken(targets, r), found by bisection to `tol`.
WellField well_field_second(const ScalarField& f, const TargetSet& targets, double tol = 1e-9);

/// Well function defined through the perturbation family itself.
WellField well_field_family(const ScalarField& f, const TargetSet& targets, const PerturbationFamily& family);

/// Closed sublevel set {w <= r} of a well field on a refined complex.
using SubcomplexSelection = Region;
SubcomplexSelection sublevel(const WellField& w, double r);

/// Preimage f^{-1}(I) of an interval union under a field that is linear per edge.
Region preimage(const ScalarField& f, const IntervalUnion& set);

// ---------------------------------------------------------------------------
// Constructions from the proof that the sublevel sets agree.

/// Point in R^n.
class EuclideanPoint {
 public:
  EuclideanPoint() = default;
  explicit EuclideanPoint(std::vector<double> coords);
  EuclideanPoint(std::initializer_list<double> coords) : EuclideanPoint(std::vector<double>(coords)) {}

  std::size_t dimension() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
};

double distance(const EuclideanPoint& p, const EuclideanPoint& q);

/// Continuous map that collapses the ball B_{r+eps}(a) to a, is the identity
/// outside B_{r+2eps}(a), and rescales radially (linearly in the radius) in
/// between. Moves no point by more than r + 2 eps.
EuclideanPoint contraction_map(const EuclideanPoint& a, double r, double eps, const EuclideanPoint& y);

/// h = contraction∘f centred at `a` with r = |f(x) - a|, so h(x) = a and
/// sup|h - f| <= |f(x) - a| + 2 eps. The result carries knots wherever f
/// crosses a kink of the contraction.
ScalarField witness_point_perturbation(const ScalarField& f, const Location& x, double a, double eps);

/// Composes a PL field with a PL map R -> R whose kinks are at `kinks`,
/// inserting knots at every interior crossing of a kink value.
template <class Fn>
ScalarField compose_pl(const ScalarField& f, std::span<const double> kinks, Fn&& fn);

}  // namespace wellcheck

#include "wellcheck/detail/compose_pl.hpp"
