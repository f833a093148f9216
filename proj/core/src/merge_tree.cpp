#include "wellcheck/merge_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "wellcheck/errors.hpp"
#include "wellcheck/instance.hpp"

namespace wellcheck {

namespace {

constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  /// Attaches the root of `child` under the root of `keep`.
  void attach(std::size_t keep, std::size_t child) { parent_[find(child)] = find(keep); }

 private:
  std::vector<std::size_t> parent_;
};

void take_min(Extremum& slot, bool& set, double value, const Location& where) {
  if (!set || value < slot.value) {
    slot = {value, where};
    set = true;
  }
}

void take_max(Extremum& slot, bool& set, double value, const Location& where) {
  if (!set || value > slot.value) {
    slot = {value, where};
    set = true;
  }
}

std::string fmt(double x) {
  if (std::isinf(x)) return "∞";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

MergeTree::MergeTree(WellField well) : well_(std::move(well)) {
  if (!well_.values.linear_per_edge()) throw PreconditionError("merge_tree: unrefined input (well field has knots)");
  if (well_.kind != WellKind::DoublePrimed && !is_refined(well_.source, well_.targets))
    throw PreconditionError("merge_tree: unrefined input (distance to targets is not linear per edge)");

  const Complex1D& c = well_.values.complex();
  const std::size_t n = c.vertex_count();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    if (well_.at(a) != well_.at(b)) return well_.at(a) < well_.at(b);
    return c.vertex(a).id < c.vertex(b).id;
  });

  // Union-find sweep in vertex order. An edge activates when its later
  // endpoint enters, at value max(w(u), w(v)).
  std::vector<std::size_t> rank_in_order(n);
  for (std::size_t i = 0; i < n; ++i) rank_in_order[order_[i]] = i;
  DisjointSet uf(n);
  std::vector<std::size_t> birth_of(n, kAbsent);  // root -> index into births_

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order_[i];
    const double value = well_.at(v);
    std::vector<std::size_t> roots;
    for (std::size_t e : c.incident(v)) {
      const std::size_t u = c.edge(e).u == v ? c.edge(e).v : c.edge(e).u;
      if (rank_in_order[u] >= i) continue;
      const std::size_t root = uf.find(u);
      if (std::find(roots.begin(), roots.end(), root) == roots.end()) roots.push_back(root);
    }
    if (roots.empty()) {
      birth_of[v] = births_.size();
      births_.push_back({value, c.vertex(v).id, v});
      continue;
    }
    // Oldest component survives.
    std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) { return birth_of[a] < birth_of[b]; });
    const std::size_t survivor = roots.front();
    uf.attach(survivor, v);
    for (std::size_t k = 1; k < roots.size(); ++k) {
      merges_.push_back({value, births_[birth_of[survivor]].component, births_[birth_of[roots[k]]].component});
      uf.attach(survivor, roots[k]);
    }
    birth_of[uf.find(v)] = birth_of[survivor];
  }
}

std::vector<std::size_t> MergeTree::roots_at(double r) const {
  const Complex1D& c = well_.values.complex();
  const std::size_t n = c.vertex_count();
  DisjointSet uf(n);
  for (const auto& e : c.edges())
    if (well_.at(e.u) <= r && well_.at(e.v) <= r) uf.attach(e.u, e.v);
  std::vector<std::size_t> roots(n, kAbsent);
  for (std::size_t v = 0; v < n; ++v)
    if (well_.at(v) <= r) roots[v] = uf.find(v);
  return roots;
}

std::vector<Component> MergeTree::components_at(double r) const {
  if (!(r >= 0.0)) throw PreconditionError("components_at: radius must be nonnegative");
  const Complex1D& c = well_.values.complex();
  const ScalarField& f = well_.source;
  const TargetSet& targets = well_.targets;
  const std::size_t nt = targets.size();
  const auto roots = roots_at(r);

  std::map<std::size_t, std::size_t> slot_of_root;
  std::vector<Component> comps;
  struct Flags {
    bool min_f = false, max_f = false;
    std::vector<char> min_off, max_off;
  };
  std::vector<Flags> flags;

  auto update = [&](std::size_t slot, double fx, const Location& where, std::span<const double> offsets) {
    Component& comp = comps[slot];
    Flags& fl = flags[slot];
    take_min(comp.min_f, fl.min_f, fx, where);
    take_max(comp.max_f, fl.max_f, fx, where);
    for (std::size_t j = 0; j < nt; ++j) {
      bool mn = fl.min_off[j] != 0;
      bool mx = fl.max_off[j] != 0;
      take_min(comp.min_offset[j], mn, offsets[j], where);
      take_max(comp.max_offset[j], mx, offsets[j], where);
      fl.min_off[j] = mn;
      fl.max_off[j] = mx;
    }
  };

  std::vector<double> offsets(nt);
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    if (roots[v] == kAbsent) continue;
    auto [it, fresh] = slot_of_root.emplace(roots[v], comps.size());
    if (fresh) {
      Component comp;
      comp.id = c.vertex(v).id;
      comp.r = r;
      comp.min_offset.resize(nt);
      comp.max_offset.resize(nt);
      comp.region = Region(c);
      comps.push_back(std::move(comp));
      flags.push_back({false, false, std::vector<char>(nt, 0), std::vector<char>(nt, 0)});
    }
    Component& comp = comps[it->second];
    comp.id = std::min(comp.id, c.vertex(v).id);
    comp.members.push_back(v);
    comp.region.add_vertex(v);
    for (std::size_t j = 0; j < nt; ++j) offsets[j] = f.value(v) - targets[j];
    update(it->second, f.value(v), Location::at_vertex(v), offsets);
  }

  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const Edge& edge = c.edge(e);
    const double wu = well_.at(edge.u);
    const double wv = well_.at(edge.v);
    if (wu <= r && wv <= r) {
      comps[slot_of_root.at(roots[edge.u])].region.add_full_edge(c, e);
      continue;
    }
    if (wu > r && wv > r) continue;
    // Partial edge: a segment attached to the lower endpoint, ending at the
    // tip where w = r.
    const bool from_u = wu <= r;
    const double t = from_u ? (r - wu) / (wv - wu) : (wu - r) / (wu - wv);
    const std::size_t slot = slot_of_root.at(roots[from_u ? edge.u : edge.v]);
    comps[slot].region.add_interval(c, e, from_u ? ParamInterval{0.0, t} : ParamInterval{t, 1.0});

    double f_tip = 0.0;
    if (well_.kind == WellKind::DoublePrimed) {
      f_tip = f.eval_edge(e, t);
      for (std::size_t j = 0; j < nt; ++j) offsets[j] = f_tip - targets[j];
    } else {
      // On a refined edge the nearest target and the side of it are fixed, so
      // the tip sits exactly at distance r from that target.
      const double mid = 0.5 * (f.value(edge.u) + f.value(edge.v));
      const std::size_t near = targets.nearest_index(mid);
      const double side = mid > targets[near] ? 1.0 : -1.0;
      f_tip = targets[near] + side * r;
      for (std::size_t j = 0; j < nt; ++j)
        offsets[j] = (j == near) ? side * r : (targets[near] - targets[j]) + side * r;
    }
    update(slot, f_tip, Location::on_edge(e, t), offsets);
  }

  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return comps;
}

std::size_t MergeTree::live_count(double r) const {
  std::size_t born = 0;
  std::size_t merged = 0;
  for (const auto& b : births_) born += b.value <= r;
  for (const auto& m : merges_) merged += m.value <= r;
  return born - merged;
}

ForwardMap MergeTree::forward_map(double r, double s) const {
  if (r > s) throw PreconditionError("forward_map: requires r <= s");
  const Complex1D& c = well_.values.complex();
  const auto roots_r = roots_at(r);
  const auto roots_s = roots_at(s);

  std::map<std::size_t, int> id_r;
  std::map<std::size_t, int> id_s;
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    const int id = c.vertex(v).id;
    if (roots_r[v] != kAbsent) {
      auto [it, fresh] = id_r.emplace(roots_r[v], id);
      if (!fresh) it->second = std::min(it->second, id);
    }
    if (roots_s[v] != kAbsent) {
      auto [it, fresh] = id_s.emplace(roots_s[v], id);
      if (!fresh) it->second = std::min(it->second, id);
    }
  }

  ForwardMap out;
  std::set<int> seen;
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    if (roots_r[v] == kAbsent) continue;
    const int from = id_r.at(roots_r[v]);
    if (out.image.count(from)) continue;
    const int to = id_s.at(roots_s[v]);
    out.image.emplace(from, to);
    if (!seen.insert(to).second) out.injective = false;
  }
  return out;
}

std::vector<double> MergeTree::event_values() const {
  std::vector<double> values;
  for (const auto& b : births_) values.push_back(b.value);
  for (const auto& m : merges_) values.push_back(m.value);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

StepFunction MergeTree::betti0_curve() const {
  StepFunction curve;
  curve.breaks.push_back(0.0);
  for (double v : event_values())
    if (v > 0.0) curve.breaks.push_back(v);
  for (double b : curve.breaks) {
    const int count = static_cast<int>(live_count(b));
    curve.at.push_back(count);
    curve.after.push_back(count);
  }
  return curve;
}

MergeTree merge_tree(const WellField& w) { return MergeTree(w); }

// ---------------------------------------------------------------------------

int StepFunction::value_at(double r) const {
  if (!(r >= 0.0) || breaks.empty()) throw PreconditionError("step function is defined on [0, inf)");
  auto it = std::upper_bound(breaks.begin(), breaks.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - breaks.begin()) - 1;
  return breaks[i] == r ? at[i] : after[i];
}

std::vector<StepFunction::Piece> StepFunction::pieces() const {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Piece> atoms;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    atoms.push_back({breaks[i], breaks[i], true, true, at[i]});
    const double next = i + 1 < breaks.size() ? breaks[i + 1] : inf;
    atoms.push_back({breaks[i], next, false, false, after[i]});
  }
  std::vector<Piece> out;
  for (const auto& a : atoms) {
    if (!out.empty() && out.back().value == a.value) {
      out.back().hi = a.hi;
      out.back().hi_closed = a.hi_closed;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::string StepFunction::describe() const {
  std::string s;
  for (const auto& p : pieces()) {
    if (!s.empty()) s += ", ";
    s += p.lo_closed ? "[" : "(";
    s += fmt(p.lo) + "," + fmt(p.hi);
    s += p.hi_closed ? "]" : ")";
    s += ":" + std::to_string(p.value);
  }
  return s;
}

}  // namespace wellcheck
