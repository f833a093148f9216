#include "wellcheck/well_function.hpp"

#include <algorithm>
#include <cmath>

#include "wellcheck/errors.hpp"
#include "wellcheck/instance.hpp"

namespace wellcheck {

std::string_view to_string(WellKind kind) {
  switch (kind) {
    case WellKind::Primed: return "primed";
    case WellKind::DoublePrimed: return "double-primed";
    case WellKind::Definitional: return "family-definitional";
  }
  return "unknown";
}

IntervalUnion::IntervalUnion(std::vector<RealInterval> intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (iv.lo > iv.hi) throw PreconditionError("interval with lo > hi");
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

bool IntervalUnion::contains(double y) const {
  return std::any_of(intervals_.begin(), intervals_.end(), [y](const auto& iv) { return iv.lo <= y && y <= iv.hi; });
}

std::vector<RealInterval> IntervalUnion::gaps_within(RealInterval range) const {
  if (range.lo == range.hi) return contains(range.lo) ? std::vector<RealInterval>{} : std::vector{range};
  std::vector<RealInterval> gaps;
  double cursor = range.lo;
  for (const auto& iv : intervals_) {
    if (iv.hi < cursor) continue;
    if (iv.lo > range.hi) break;
    if (iv.lo > cursor) gaps.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  if (cursor < range.hi) gaps.push_back({cursor, range.hi});
  return gaps;
}

bool IntervalUnion::covers(RealInterval range) const {
  for (const auto& iv : intervals_)
    if (iv.lo <= range.lo && range.hi <= iv.hi) return true;
  return false;
}

IntervalUnion thicken(const TargetSet& targets, double r) {
  if (!(r >= 0.0)) throw PreconditionError("thicken: radius must be nonnegative");
  std::vector<RealInterval> ivs;
  for (double a : targets.values()) ivs.push_back({a - r, a + r});
  return IntervalUnion(std::move(ivs));
}

// ---------------------------------------------------------------------------

WellField well_field_prime(const ScalarField& f, const TargetSet& targets) {
  std::vector<double> w(f.values().size());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = targets.distance(f.value(v));
  return WellField{ScalarField(f.complex_ptr(), std::move(w)), f, targets, WellKind::Primed,
                   FamilyKind::FullSupNorm};
}

namespace {

double bisect_thickening(double y, const TargetSet& targets, double tol) {
  if (thicken(targets, 0.0).contains(y)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!thicken(targets, hi).contains(y)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 64 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (thicken(targets, mid).contains(y)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

WellField well_field_second(const ScalarField& f, const TargetSet& targets, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("well_field_second: tolerance must be positive");
  std::vector<double> w(f.values().size());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = bisect_thickening(f.value(v), targets, tol);
  return WellField{ScalarField(f.complex_ptr(), std::move(w)), f, targets, WellKind::DoublePrimed,
                   FamilyKind::FullSupNorm};
}

WellField well_field_family(const ScalarField& f, const TargetSet& targets, const PerturbationFamily& family) {
  switch (family.kind()) {
    case FamilyKind::FullSupNorm: {
      // The three well functions coincide for the full sup-norm family.
      WellField w = well_field_prime(f, targets);
      w.family = FamilyKind::FullSupNorm;
      return w;
    }
    case FamilyKind::Shift: {
      // inf |t| subject to f(v) + t in A.
      std::vector<double> w(f.values().size());
      for (std::size_t v = 0; v < w.size(); ++v) {
        double best = std::abs(targets[0] - f.value(v));
        for (double a : targets.values()) best = std::min(best, std::abs(a - f.value(v)));
        w[v] = best;
      }
      return WellField{ScalarField(f.complex_ptr(), std::move(w)), f, targets, WellKind::Definitional,
                       FamilyKind::Shift};
    }
    case FamilyKind::SampledParametric:
      break;
  }
  throw InvalidInput("no definitional well field; supply radii explicitly");
}

// Every well field here is the distance from f to A, so {w <= r} is the
// preimage of the thickening. Boundary points are located in the value
// domain of f, which keeps them bit-identical to preimage().
SubcomplexSelection sublevel(const WellField& w, double r) {
  if (!(r >= 0.0)) throw PreconditionError("sublevel: radius must be nonnegative");
  if (!w.values.linear_per_edge()) throw PreconditionError("sublevel: well field must be linear per edge");
  if (w.source.complex_ptr() != w.values.complex_ptr())
    throw PreconditionError("sublevel: well field and source live on different complexes");
  return preimage(w.source, thicken(w.targets, r));
}

Region preimage(const ScalarField& f, const IntervalUnion& set) {
  if (!f.linear_per_edge()) throw PreconditionError("preimage: field must be linear per edge");
  const Complex1D& c = f.complex();
  Region out(c);
  for (std::size_t v = 0; v < c.vertex_count(); ++v)
    if (set.contains(f.value(v))) out.add_vertex(v);
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const double fu = f.value(c.edge(e).u);
    const double fv = f.value(c.edge(e).v);
    for (const auto& iv : set.intervals()) {
      if (fu == fv) {
        if (iv.lo <= fu && fu <= iv.hi) out.add_full_edge(c, e);
        continue;
      }
      double t0 = (iv.lo - fu) / (fv - fu);
      double t1 = (iv.hi - fu) / (fv - fu);
      if (t0 > t1) std::swap(t0, t1);
      t0 = std::max(t0, 0.0);
      t1 = std::min(t1, 1.0);
      if (t0 <= t1) out.add_interval(c, e, {t0, t1});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

EuclideanPoint::EuclideanPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw PreconditionError("points need dimension >= 1");
  for (double x : coords_)
    if (!std::isfinite(x)) throw PreconditionError("point coordinates must be finite");
}

double distance(const EuclideanPoint& p, const EuclideanPoint& q) {
  if (p.dimension() != q.dimension()) throw PreconditionError("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.dimension(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(s);
}

EuclideanPoint contraction_map(const EuclideanPoint& a, double r, double eps, const EuclideanPoint& y) {
  if (!(eps > 0.0)) throw PreconditionError("contraction_map: eps must be positive");
  if (!(r >= 0.0)) throw PreconditionError("contraction_map: r must be nonnegative");
  const double inner = r + eps;
  const double outer = r + 2.0 * eps;
  const double rho = distance(y, a);
  if (rho <= inner) return a;
  if (rho >= outer) return y;
  const double scale = (rho - inner) * outer / eps / rho;
  std::vector<double> out(a.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + scale * (y[i] - a[i]);
  return EuclideanPoint(std::move(out));
}

ScalarField witness_point_perturbation(const ScalarField& f, const Location& x, double a, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("witness_point_perturbation: eps must be positive");
  const double r = std::abs(eval_field(f, x) - a);
  const double inner = r + eps;
  const double outer = r + 2.0 * eps;
  const double kinks[] = {a - outer, a - inner, a + inner, a + outer};
  // Compare against the kink values themselves: recomputing |y - a| at a kink
  // can overshoot `inner` by an ulp, which the 1/eps slope would amplify.
  auto phi = [&](double y) {
    if (y >= kinks[1] && y <= kinks[2]) return a;
    if (y <= kinks[0] || y >= kinks[3]) return y;
    if (y < a) return a + (y - kinks[1]) * (kinks[0] - a) / (kinks[0] - kinks[1]);
    return a + (y - kinks[2]) * (kinks[3] - a) / (kinks[3] - kinks[2]);
  };
  return compose_pl(f, kinks, phi);
}

}  // namespace wellcheck
