#include "wellcheck/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <queue>

#include "wellcheck/errors.hpp"

namespace wellcheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCheckTol = 1e-9;

Location normalize(const Complex1D& c, std::size_t e, double t) {
  if (t <= 0.0) return Location::at_vertex(c.edge(e).u);
  if (t >= 1.0) return Location::at_vertex(c.edge(e).v);
  return Location::on_edge(e, t);
}

ScalarField shifted(const ScalarField& f, double t) {
  std::vector<double> values(f.values().begin(), f.values().end());
  for (double& v : values) v += t;
  std::vector<std::vector<Knot>> knots(f.complex().edge_count());
  for (std::size_t e = 0; e < knots.size(); ++e)
    for (const auto& k : f.knots(e)) knots[e].push_back({k.t, k.value + t});
  return ScalarField(f.complex_ptr(), std::move(values), std::move(knots));
}

/// Node parameters of a field on an edge restricted to [lo, hi], plus lo and hi.
std::vector<double> nodes_within(const ScalarField& g, std::size_t e, double lo, double hi) {
  std::vector<double> ts{lo};
  for (const auto& k : g.knots(e))
    if (k.t > lo && k.t < hi) ts.push_back(k.t);
  if (hi > lo) ts.push_back(hi);
  return ts;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Identity: return "identity";
    case Provenance::Shift: return "shift";
    case Provenance::Clamp: return "clamp";
    case Provenance::Blend: return "blend";
    case Provenance::Lattice: return "lattice";
    case Provenance::User: return "user";
    case Provenance::PointWitness: return "point-witness";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Avoidable: return "avoidable";
    case Verdict::Unavoidable: return "unavoidable";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

PerturbedField certify(const ScalarField& g, const ScalarField& f, Provenance provenance, double shift) {
  return PerturbedField{g, sup_distance(g, f), provenance, shift};
}

std::vector<Location> zeros_on(const ScalarField& g, const TargetSet& targets, const Region& region, double tol) {
  const Complex1D& c = g.complex();
  if (region.vertex_count() != c.vertex_count() || region.edge_count() != c.edge_count())
    throw PreconditionError("zeros_on: region belongs to a different complex");
  std::vector<Location> out;
  auto push = [&](const Location& x) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    if (!region.has_vertex(v)) continue;
    for (double a : targets.values())
      if (std::abs(g.value(v) - a) <= tol) push(Location::at_vertex(v));
  }
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    for (const auto& iv : region.intervals(e)) {
      const auto ts = nodes_within(g, e, iv.lo, iv.hi);
      std::vector<double> vals;
      for (double t : ts) vals.push_back(g.eval_edge(e, t));
      for (double a : targets.values()) {
        for (std::size_t i = 0; i < ts.size(); ++i)
          if (std::abs(vals[i] - a) <= tol) push(normalize(c, e, ts[i]));
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
          const double d0 = vals[i] - a;
          const double d1 = vals[i + 1] - a;
          if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
            const double t = ts[i] + d0 / (d0 - d1) * (ts[i + 1] - ts[i]);
            push(normalize(c, e, t));
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Urysohn weights and blending

namespace {

struct NodeGraph {
  // Vertices keep their indices; interior nodes are appended.
  std::vector<std::vector<double>> edge_ts;          // per edge, sorted t incl. 0 and 1
  std::vector<std::vector<std::size_t>> edge_nodes;  // node ids matching edge_ts
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::size_t node_count = 0;
};

NodeGraph build_graph(const Complex1D& c, const std::vector<std::vector<double>>& interior) {
  NodeGraph g;
  g.node_count = c.vertex_count();
  g.edge_ts.resize(c.edge_count());
  g.edge_nodes.resize(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    auto& ts = g.edge_ts[e];
    ts.push_back(0.0);
    for (double t : interior[e])
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    auto& ids = g.edge_nodes[e];
    ids.push_back(c.edge(e).u);
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) ids.push_back(g.node_count++);
    ids.push_back(c.edge(e).v);
  }
  g.adj.resize(g.node_count);
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const auto& ts = g.edge_ts[e];
    const auto& ids = g.edge_nodes[e];
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      const double len = (ts[i + 1] - ts[i]) * c.edge(e).length;
      g.adj[ids[i]].emplace_back(ids[i + 1], len);
      g.adj[ids[i + 1]].emplace_back(ids[i], len);
    }
  }
  return g;
}

std::vector<char> membership(const Complex1D& c, const NodeGraph& g, const Region& set) {
  std::vector<char> in(g.node_count, 0);
  for (std::size_t v = 0; v < c.vertex_count(); ++v) in[v] = set.has_vertex(v);
  for (std::size_t e = 0; e < c.edge_count(); ++e)
    for (std::size_t i = 1; i + 1 < g.edge_ts[e].size(); ++i)
      in[g.edge_nodes[e][i]] = set.contains(Location::on_edge(e, g.edge_ts[e][i]));
  return in;
}

std::vector<double> path_distance(const NodeGraph& g, const std::vector<char>& sources) {
  std::vector<double> dist(g.node_count, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (std::size_t i = 0; i < g.node_count; ++i)
    if (sources[i]) {
      dist[i] = 0.0;
      queue.emplace(0.0, i);
    }
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (auto [v, len] : g.adj[u])
      if (d + len < dist[v]) {
        dist[v] = d + len;
        queue.emplace(dist[v], v);
      }
  }
  return dist;
}

}  // namespace

BlendWeights urysohn(const ComplexPtr& complex, const Region& near, const Region& far) {
  const Complex1D& c = *complex;
  if (near.intersects(far)) throw PreconditionError("urysohn: C and C' intersect (need disjoint closed sets)");

  std::vector<std::vector<double>> interior(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    for (const auto& iv : near.intervals(e)) interior[e].insert(interior[e].end(), {iv.lo, iv.hi});
    for (const auto& iv : far.intervals(e)) interior[e].insert(interior[e].end(), {iv.lo, iv.hi});
  }
  const NodeGraph graph = build_graph(c, interior);
  const auto d_near = path_distance(graph, membership(c, graph, near));
  const auto d_far = path_distance(graph, membership(c, graph, far));

  auto weight = [&](std::size_t node) {
    const double dn = d_near[node];
    const double df = d_far[node];
    if (dn == 0.0) return 1.0;
    if (df == 0.0) return 0.0;
    if (std::isinf(df)) return 1.0;  // C' unreachable (or empty)
    if (std::isinf(dn)) return 0.0;
    return df / (dn + df);
  };

  std::vector<double> values(c.vertex_count());
  for (std::size_t v = 0; v < values.size(); ++v) values[v] = weight(v);
  std::vector<std::vector<Knot>> knots(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e)
    for (std::size_t i = 1; i + 1 < graph.edge_ts[e].size(); ++i)
      knots[e].push_back({graph.edge_ts[e][i], weight(graph.edge_nodes[e][i])});
  return BlendWeights{ScalarField(complex, std::move(values), std::move(knots))};
}

BlendWeights urysohn(const Complex1D& complex, const Region& near, const Region& far) {
  return urysohn(std::make_shared<const Complex1D>(complex), near, far);
}

PerturbedField blend(const ScalarField& f, const PerturbedField& g, const PerturbedField& g_prime,
                     const Region& near, const Region& far, double target) {
  const TargetSet a({target});
  if (!zeros_on(g.field, a, near).empty()) throw PreconditionError("blend: g has a zero on C");
  if (!zeros_on(g_prime.field, a, far).empty()) throw PreconditionError("blend: g' has a zero on C'");
  const double r = std::max(g.distance, g_prime.distance);

  const ComplexPtr& complex = f.complex_ptr();
  const Complex1D& c = *complex;
  const ScalarField phi = urysohn(complex, near, far).phi;

  std::vector<double> values(c.vertex_count());
  for (std::size_t v = 0; v < values.size(); ++v)
    values[v] = phi.value(v) * g.field.value(v) + (1.0 - phi.value(v)) * g_prime.field.value(v);
  std::vector<std::vector<Knot>> knots(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    std::vector<double> ts;
    for (const auto* field : {&phi, &g.field, &g_prime.field})
      for (const auto& k : field->knots(e)) ts.push_back(k.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) {
      const double w = phi.eval_edge(e, t);
      knots[e].push_back({t, w * g.field.eval_edge(e, t) + (1.0 - w) * g_prime.field.eval_edge(e, t)});
    }
  }
  PerturbedField h = certify(ScalarField(complex, std::move(values), std::move(knots)), f, Provenance::Blend);

  if (h.distance > r + kCheckTol)
    throw VerificationFailure("blend: result exceeds the perturbation radius");
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    if (near.has_vertex(v) && h.field.value(v) != g.field.value(v))
      throw VerificationFailure("blend: result differs from g on C");
    if (far.has_vertex(v) && h.field.value(v) != g_prime.field.value(v))
      throw VerificationFailure("blend: result differs from g' on C'");
  }
  if (!zeros_on(h.field, a, near.united(c, far)).empty())
    throw VerificationFailure("blend: result has a zero on C u C'");
  return h;
}

// ---------------------------------------------------------------------------
// Avoidability

PerturbedField clamp_above(const ScalarField& f, double target, double r, double delta) {
  // g = min(f + r, max(f, a + delta)): within [f, f + r], and above a wherever
  // f > a - r + delta.
  const double kinks[] = {target + delta - r, target + delta};
  auto g = compose_pl(f, kinks, [&](double y) {
    const double d = y - target;
    return target + std::min(d + r, std::max(d, delta));
  });
  return certify(g, f, Provenance::Clamp);
}

PerturbedField clamp_below(const ScalarField& f, double target, double r, double delta) {
  const double kinks[] = {target - delta, target - delta + r};
  auto g = compose_pl(f, kinks, [&](double y) {
    const double d = y - target;
    return target + std::max(d - r, std::min(d, -delta));
  });
  return certify(g, f, Provenance::Clamp);
}

namespace {

AvoidabilityDecision checked(AvoidabilityDecision d, const Component& comp, const ScalarField& f,
                             const TargetSet& targets, double r) {
  std::string why;
  if (!verify_decision(d, comp, f, targets, r, &why))
    throw VerificationFailure("avoidability decision for component " + std::to_string(comp.id) +
                              " failed verification: " + why);
  return d;
}

AvoidabilityDecision band_rule(const Component& comp, const ScalarField& f, const TargetSet& targets, double r) {
  if (targets.size() != 1)
    throw InvalidInput("analytic rule implemented for singleton targets only; use SampledParametric or Shift");
  const double a = targets[0];
  const Extremum& high = comp.max_offset[0];
  const Extremum& low = comp.min_offset[0];
  AvoidabilityDecision d;
  if (high.value >= r && low.value <= -r) {
    d.verdict = Verdict::Unavoidable;
    d.certificate = BandCertificate{a, r, high, low};
    return d;
  }
  d.verdict = Verdict::Avoidable;
  if (low.value > -r) {
    d.witness = clamp_above(f, a, r, 0.5 * (low.value + r));
  } else {
    d.witness = clamp_below(f, a, r, 0.5 * (r - high.value));
  }
  return d;
}

AvoidabilityDecision shift_rule(const Component& comp, const ScalarField& f, const TargetSet& targets, double r) {
  ShiftCoverCertificate cover{r, {}};
  std::vector<RealInterval> hit;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double lo = -comp.max_offset[j].value;
    const double hi = -comp.min_offset[j].value;
    cover.pieces.push_back({lo, hi, targets[j]});
    hit.push_back({lo, hi});
  }
  const IntervalUnion hits(std::move(hit));
  const auto gaps = hits.gaps_within({-r, r});
  AvoidabilityDecision d;
  if (gaps.empty()) {
    d.verdict = Verdict::Unavoidable;
    d.certificate = std::move(cover);
    return d;
  }
  // Pick the uncovered shift farthest from every hitting interval.
  auto margin = [&](double t) {
    double m = kInf;
    for (const auto& iv : hits.intervals()) m = std::min(m, std::max(iv.lo - t, t - iv.hi));
    return m;
  };
  std::vector<double> candidates;
  if (!hits.contains(r)) candidates.push_back(r);
  if (!hits.contains(-r)) candidates.push_back(-r);
  for (const auto& gap : gaps) candidates.push_back(0.5 * (gap.lo + gap.hi));
  double best = candidates.front();
  for (double t : candidates)
    if (margin(t) > margin(best)) best = t;
  d.verdict = Verdict::Avoidable;
  d.witness = certify(shifted(f, best), f, Provenance::Shift, best);
  return d;
}

AvoidabilityDecision sampled_rule(const Component& comp, const ScalarField& f, const TargetSet& targets, double r,
                                  const PerturbationFamily& family) {
  AvoidabilityDecision d;
  if (zeros_on(f, targets, comp.region).empty()) {
    d.verdict = Verdict::Avoidable;
    d.witness = certify(f, f, Provenance::Identity);
    return d;
  }
  for (const auto& s : family.samples()) {
    if (s.distance > r) continue;
    if (zeros_on(s.field, targets, comp.region).empty()) {
      d.verdict = Verdict::Avoidable;
      d.witness = certify(s.field, f, Provenance::User);
      return d;
    }
  }
  d.verdict = Verdict::Unknown;
  return d;
}

}  // namespace

AvoidabilityDecision avoidable(const Component& comp, const ScalarField& f, const TargetSet& targets, double r,
                               const PerturbationFamily& family) {
  if (!(r >= 0.0)) throw PreconditionError("avoidable: radius must be nonnegative");
  if (comp.min_offset.size() != targets.size())
    throw PreconditionError("avoidable: component statistics do not match the target set");
  switch (family.kind()) {
    case FamilyKind::FullSupNorm: return checked(band_rule(comp, f, targets, r), comp, f, targets, r);
    case FamilyKind::Shift: return checked(shift_rule(comp, f, targets, r), comp, f, targets, r);
    case FamilyKind::SampledParametric:
      return checked(sampled_rule(comp, f, targets, r, family), comp, f, targets, r);
  }
  throw PreconditionError("avoidable: unknown family");
}

bool verify_decision(const AvoidabilityDecision& decision, const Component& comp, const ScalarField& f,
                     const TargetSet& targets, double r, std::string* why) {
  auto reject = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  switch (decision.verdict) {
    case Verdict::Unknown:
      return true;
    case Verdict::Avoidable: {
      if (!decision.witness) return reject("avoidable verdict without a witness");
      const double dist = sup_distance(decision.witness->field, f);
      if (dist > r + kCheckTol) return reject("witness is farther than r from f");
      if (!zeros_on(decision.witness->field, targets, comp.region).empty())
        return reject("witness hits a target on the component");
      return true;
    }
    case Verdict::Unavoidable:
      break;
  }
  if (const auto* band = std::get_if<BandCertificate>(&decision.certificate)) {
    const double hi = eval_field(f, band->high.where) - band->target;
    const double lo = eval_field(f, band->low.where) - band->target;
    if (hi < r - kCheckTol) return reject("high point is below a + r");
    if (lo > -r + kCheckTol) return reject("low point is above a - r");
    if (!comp.region.contains(band->high.where, 1e-12) || !comp.region.contains(band->low.where, 1e-12))
      return reject("certificate points are outside the component");
    return true;
  }
  if (const auto* cover = std::get_if<ShiftCoverCertificate>(&decision.certificate)) {
    std::vector<RealInterval> ivs;
    for (const auto& p : cover->pieces) {
      const double max_f = comp.max_f.value;
      const double min_f = comp.min_f.value;
      if (p.lo < p.target - max_f - kCheckTol || p.hi > p.target - min_f + kCheckTol)
        return reject("cover interval is not implied by the component's range of f");
      ivs.push_back({p.lo - kCheckTol, p.hi + kCheckTol});
    }
    const double fmax = eval_field(f, comp.max_f.where);
    const double fmin = eval_field(f, comp.min_f.where);
    if (std::abs(fmax - comp.max_f.value) > kCheckTol || std::abs(fmin - comp.min_f.value) > kCheckTol)
      return reject("component extrema do not match f");
    if (IntervalUnion(std::move(ivs)).gaps_within({-r, r}).empty()) return true;
    return reject("cover intervals leave a gap in [-r, r]");
  }
  return reject("unavoidable verdict without a certificate");
}

// ---------------------------------------------------------------------------
// Lattice oracle

std::uint64_t default_lattice_budget() {
  if (const char* env = std::getenv("WELLCHECK_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 10'000'000;
}

std::optional<PerturbedField> lattice_search(const ScalarField& f, const TargetSet& targets, double r,
                                             const Component& comp, const LatticeOptions& options) {
  if (!(options.resolution > 0.0)) throw PreconditionError("lattice_search: resolution must be positive");
  if (!(r >= 0.0)) throw PreconditionError("lattice_search: radius must be nonnegative");
  const Complex1D& c = f.complex();

  // Free vertices: members first, then the far ends of edges the component touches.
  std::vector<std::size_t> free(comp.members.begin(), comp.members.end());
  std::vector<std::size_t> touched;
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    if (comp.region.intervals(e).empty()) continue;
    touched.push_back(e);
    for (std::size_t v : {c.edge(e).u, c.edge(e).v})
      if (std::find(free.begin(), free.end(), v) == free.end()) free.push_back(v);
  }
  if (free.size() > options.max_free_vertices)
    throw PreconditionError("lattice_search: " + std::to_string(free.size()) +
                            " free vertices exceed the limit of " + std::to_string(options.max_free_vertices));

  std::vector<double> levels;
  for (std::size_t i = 0;; ++i) {
    const double x = -r + static_cast<double>(i) * options.resolution;
    if (x >= r - 1e-12) break;
    levels.push_back(x);
  }
  levels.push_back(r);
  const std::size_t n_levels = levels.size();

  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> position(c.vertex_count(), kUnassigned);
  for (std::size_t i = 0; i < free.size(); ++i) position[free[i]] = i;

  // Each touched edge constrains the offsets (x, y) of its ends through the
  // nodes of f inside the component: g(t) = f(t) + (1 - t) x + t y.
  struct Constraint {
    std::size_t a, b;  // positions of edge.u and edge.v in `free`
    std::vector<double> t, fv;
  };
  std::vector<Constraint> constraints;
  std::vector<std::vector<std::size_t>> constraints_at(free.size());
  for (std::size_t e : touched) {
    Constraint con{position[c.edge(e).u], position[c.edge(e).v], {}, {}};
    for (const auto& iv : comp.region.intervals(e))
      for (double t : nodes_within(f, e, iv.lo, iv.hi)) {
        con.t.push_back(t);
        con.fv.push_back(f.eval_edge(e, t));
      }
    constraints_at[con.a].push_back(constraints.size());
    constraints_at[con.b].push_back(constraints.size());
    constraints.push_back(std::move(con));
  }

  double lo = 0.0;
  double hi = 0.0;
  auto in_gap = [&](double y) { return y > lo + options.tol && y < hi - options.tol; };
  auto satisfied = [&](const Constraint& con, double x, double y) {
    for (std::size_t k = 0; k < con.t.size(); ++k)
      if (!in_gap(con.fv[k] + x + con.t[k] * (y - x))) return false;
    return true;
  };

  using Domain = std::vector<char>;
  using Domains = std::vector<Domain>;

  // Does level index i at the `self` end of `con` have a partner at the other end?
  // The linear bounds narrow the scan; every candidate is then checked directly.
  std::uint64_t visited = 0;
  auto charge = [&] {
    if (++visited > options.budget)
      throw BudgetExceeded("lattice_search: candidate budget of " + std::to_string(options.budget) + " exhausted");
  };

  auto supported = [&](const Constraint& con, bool self_is_a, std::size_t i, const Domain& other) {
    charge();
    const double x = levels[i];
    double ylo = -kInf;
    double yhi = kInf;
    for (std::size_t k = 0; k < con.t.size(); ++k) {
      const double w_other = self_is_a ? con.t[k] : 1.0 - con.t[k];
      const double base = con.fv[k] + (1.0 - w_other) * x;
      if (w_other <= 0.0) {
        if (!in_gap(base)) return false;
        continue;
      }
      ylo = std::max(ylo, (lo + options.tol - base) / w_other);
      yhi = std::min(yhi, (hi - options.tol - base) / w_other);
    }
    const double slack = 1e-9 * (1.0 + std::abs(ylo) + std::abs(yhi)) + options.resolution * 1e-6;
    const double first = std::isfinite(ylo) ? std::ceil((ylo - slack + r) / options.resolution) : 0.0;
    const double last = std::isfinite(yhi) ? std::floor((yhi + slack + r) / options.resolution) : n_levels;
    const std::size_t j0 = first <= 0.0 ? 0 : static_cast<std::size_t>(std::min<double>(first, n_levels));
    const std::size_t j1 = last < 0.0 ? 0 : static_cast<std::size_t>(std::min<double>(last + 2.0, n_levels));
    for (std::size_t j = j0; j < j1; ++j) {
      if (!other[j]) continue;
      if (self_is_a ? satisfied(con, x, levels[j]) : satisfied(con, levels[j], x)) return true;
    }
    // The top level r is not on the arithmetic grid when 2r/res is fractional.
    if (j1 < n_levels && other[n_levels - 1]) {
      const double y = levels[n_levels - 1];
      if (self_is_a ? satisfied(con, x, y) : satisfied(con, y, x)) return true;
    }
    return false;
  };

  // Arc consistency from a set of changed positions; false on a wiped-out domain.
  auto propagate = [&](Domains& dom, std::vector<std::size_t> queue) {
    while (!queue.empty()) {
      const std::size_t changed = queue.back();
      queue.pop_back();
      for (std::size_t ci : constraints_at[changed]) {
        const Constraint& con = constraints[ci];
        for (const bool self_is_a : {true, false}) {
          const std::size_t self = self_is_a ? con.a : con.b;
          const std::size_t other = self_is_a ? con.b : con.a;
          if (self == changed && other != changed) continue;
          bool removed = false;
          bool any = false;
          for (std::size_t i = 0; i < n_levels; ++i) {
            if (!dom[self][i]) continue;
            if (supported(con, self_is_a, i, dom[other])) {
              any = true;
            } else {
              dom[self][i] = 0;
              removed = true;
            }
          }
          if (!any) return false;
          if (removed) queue.push_back(self);
        }
      }
    }
    return true;
  };

  std::vector<std::size_t> chosen(free.size(), 0);

  std::function<bool(Domains&)> descend = [&](Domains& dom) -> bool {
    // Branch on the undecided vertex with the fewest remaining levels.
    std::size_t pick = kUnassigned;
    std::size_t best = n_levels + 1;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const auto size = static_cast<std::size_t>(std::count(dom[i].begin(), dom[i].end(), 1));
      if (size > 1 && size < best) {
        best = size;
        pick = i;
      }
    }
    if (pick == kUnassigned) {
      for (std::size_t i = 0; i < free.size(); ++i)
        chosen[i] = static_cast<std::size_t>(std::find(dom[i].begin(), dom[i].end(), 1) - dom[i].begin());
      return true;
    }
    for (std::size_t level = 0; level < n_levels; ++level) {
      if (!dom[pick][level]) continue;
      charge();
      Domains next = dom;
      std::fill(next[pick].begin(), next[pick].end(), 0);
      next[pick][level] = 1;
      if (propagate(next, {pick}) && descend(next)) return true;
    }
    return false;
  };

  // A zero-free g maps the connected component into a single gap of the
  // targets, so the search runs once per gap with values confined to it.
  std::vector<double> cuts{-kInf};
  for (double a : targets.values()) cuts.push_back(a);
  cuts.push_back(kInf);
  bool found = false;
  for (std::size_t g = 0; g + 1 < cuts.size() && !found; ++g) {
    lo = cuts[g];
    hi = cuts[g + 1];
    Domains dom(free.size(), Domain(n_levels, 1));
    bool alive = true;
    for (std::size_t i = 0; i < free.size() && alive; ++i) {
      const std::size_t v = free[i];
      if (comp.region.has_vertex(v))
        for (std::size_t l = 0; l < n_levels; ++l) dom[i][l] = in_gap(f.value(v) + levels[l]);
      alive = std::find(dom[i].begin(), dom[i].end(), 1) != dom[i].end();
    }
    if (!alive) continue;
    std::vector<std::size_t> all(free.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (!propagate(dom, all)) continue;
    found = descend(dom);
  }
  if (!found) return std::nullopt;

  std::vector<double> offset(c.vertex_count(), 0.0);
  for (std::size_t i = 0; i < free.size(); ++i) offset[free[i]] = levels[chosen[i]];
  std::vector<double> values(c.vertex_count());
  for (std::size_t v = 0; v < values.size(); ++v) values[v] = f.value(v) + offset[v];
  std::vector<std::vector<Knot>> knots(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const Edge& edge = c.edge(e);
    for (const auto& k : f.knots(e))
      knots[e].push_back({k.t, k.value + offset[edge.u] + k.t * (offset[edge.v] - offset[edge.u])});
  }
  return certify(ScalarField(f.complex_ptr(), std::move(values), std::move(knots)), f, Provenance::Lattice);
}

std::vector<PerturbedField> shift_candidates(const ScalarField& f, double r, double resolution) {
  if (!(resolution > 0.0)) throw PreconditionError("shift_candidates: resolution must be positive");
  if (!(r >= 0.0)) throw PreconditionError("shift_candidates: radius must be nonnegative");
  std::vector<PerturbedField> out;
  for (std::size_t i = 0;; ++i) {
    const double t = -r + static_cast<double>(i) * resolution;
    if (t >= r - 1e-12) break;
    out.push_back(PerturbedField{shifted(f, t), std::abs(t), Provenance::Shift, t});
  }
  out.push_back(PerturbedField{shifted(f, r), r, Provenance::Shift, r});
  return out;
}

// ---------------------------------------------------------------------------
// Minimizing perturbation

MinimizingResult minimizing_perturbation(const ScalarField& f, double target, double r,
                                         const PerturbationFamily& family, const MergeTree& tree) {
  if (family.kind() != FamilyKind::FullSupNorm)
    throw PreconditionError("minimizing_perturbation: requires the full sup-norm family");
  const TargetSet& tree_targets = tree.well().targets;
  if (tree_targets.size() != 1 || tree_targets[0] != target)
    throw PreconditionError("minimizing_perturbation: requires the singleton target the tree was built for");
  if (f.complex_ptr() != tree.well().source.complex_ptr())
    throw PreconditionError("minimizing_perturbation: field and tree live on different complexes");

  // Work at target 0 with f translated by -a.
  const ScalarField d = shifted(f, -target);
  const TargetSet zero({0.0});
  const auto comps = tree.components_at(r);

  std::vector<AvoidabilityDecision> decisions;
  for (const auto& comp : comps) decisions.push_back(avoidable(comp, d, zero, r, family));

  std::optional<PerturbedField> h;
  Region covered(f.complex());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (decisions[i].verdict != Verdict::Avoidable) continue;
    if (!h) {
      h = *decisions[i].witness;
    } else {
      h = blend(d, *h, *decisions[i].witness, covered, comps[i].region, 0.0);
    }
    covered = covered.united(f.complex(), comps[i].region);
  }
  if (!h) h = certify(d, d, Provenance::Identity);

  MinimizingResult result{certify(shifted(h->field, target), f, h->provenance), {}};
  for (std::size_t i = 0; i < comps.size(); ++i) {
    MinimizingEntry entry{comps[i].id, decisions[i].verdict, false};
    if (decisions[i].verdict == Verdict::Avoidable) {
      entry.hit = !zeros_on(h->field, zero, comps[i].region).empty();
      if (entry.hit) throw VerificationFailure("minimizing perturbation hits an avoidable component");
    } else {
      entry.hit = !zeros_on(h->field, zero, comps[i].region, kCheckTol).empty();
      if (!entry.hit) throw VerificationFailure("minimizing perturbation misses an unavoidable component");
    }
    result.ledger.push_back(entry);
  }
  if (result.h.distance > r + kCheckTol) throw VerificationFailure("minimizing perturbation exceeds r");
  return result;
}

}  // namespace wellcheck
