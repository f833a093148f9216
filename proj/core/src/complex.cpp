#include "wellcheck/complex.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "wellcheck/errors.hpp"

namespace wellcheck {

Complex1D::Complex1D(std::string name, std::vector<Vertex> vertices, std::vector<Edge> edges)
    : name_(std::move(name)), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::unordered_set<int> ids;
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.position)) throw PreconditionError("vertex position must be finite");
    if (!ids.insert(v.id).second) throw PreconditionError("duplicate vertex id " + std::to_string(v.id));
  }
  incident_.resize(vertices_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.u >= vertices_.size() || edge.v >= vertices_.size())
      throw PreconditionError("dangling edge " + std::to_string(e));
    if (edge.u == edge.v) throw PreconditionError("edge " + std::to_string(e) + " is a loop");
    if (!(edge.length > 0.0) || !std::isfinite(edge.length))
      throw PreconditionError("edge " + std::to_string(e) + " needs a positive finite length");
    incident_[edge.u].push_back(e);
    incident_[edge.v].push_back(e);
  }
}

std::optional<std::size_t> Complex1D::index_of(int id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].id == id) return i;
  return std::nullopt;
}

int Complex1D::max_vertex_id() const {
  int m = -1;
  for (const auto& v : vertices_) m = std::max(m, v.id);
  return m;
}

void check_location(const Complex1D& complex, const Location& x) {
  if (x.kind == Location::Kind::Vertex) {
    if (x.index >= complex.vertex_count()) throw PreconditionError("invalid location: no such vertex");
    return;
  }
  if (x.index >= complex.edge_count()) throw PreconditionError("invalid location: no such edge");
  if (!(x.t >= 0.0 && x.t <= 1.0)) throw PreconditionError("invalid location: parameter outside [0,1]");
}

double position_of(const Complex1D& complex, const Location& x) {
  check_location(complex, x);
  if (x.kind == Location::Kind::Vertex) return complex.vertex(x.index).position;
  const Edge& e = complex.edge(x.index);
  const double pu = complex.vertex(e.u).position;
  const double pv = complex.vertex(e.v).position;
  return pu + x.t * (pv - pu);
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(ComplexPtr complex, std::vector<double> values)
    : ScalarField(std::move(complex), std::move(values), {}) {}

ScalarField::ScalarField(ComplexPtr complex, std::vector<double> values,
                         std::vector<std::vector<Knot>> knots)
    : complex_(std::move(complex)), values_(std::move(values)), knots_(std::move(knots)) {
  if (!complex_) throw PreconditionError("field without a complex");
  if (values_.size() != complex_->vertex_count())
    throw PreconditionError("field needs exactly one value per vertex");
  for (double v : values_)
    if (!std::isfinite(v)) throw PreconditionError("field values must be finite");
  if (knots_.empty()) knots_.resize(complex_->edge_count());
  if (knots_.size() != complex_->edge_count()) throw PreconditionError("knot table size mismatch");
  for (const auto& ks : knots_) {
    double prev = 0.0;
    for (const auto& k : ks) {
      if (!(k.t > prev && k.t < 1.0) || !std::isfinite(k.value))
        throw PreconditionError("knots must be finite and strictly increasing inside (0,1)");
      prev = k.t;
    }
  }
}

bool ScalarField::linear_per_edge() const {
  return std::all_of(knots_.begin(), knots_.end(), [](const auto& ks) { return ks.empty(); });
}

std::vector<Knot> ScalarField::edge_profile(std::size_t edge) const {
  const Edge& e = complex_->edge(edge);
  std::vector<Knot> nodes;
  nodes.reserve(knots_[edge].size() + 2);
  nodes.push_back({0.0, values_[e.u]});
  nodes.insert(nodes.end(), knots_[edge].begin(), knots_[edge].end());
  nodes.push_back({1.0, values_[e.v]});
  return nodes;
}

double ScalarField::eval_edge(std::size_t edge, double t) const {
  const Edge& e = complex_->edge(edge);
  const auto& ks = knots_.at(edge);
  if (t <= 0.0) return values_[e.u];
  if (t >= 1.0) return values_[e.v];
  Knot lo{0.0, values_[e.u]};
  Knot hi{1.0, values_[e.v]};
  for (const auto& k : ks) {
    if (k.t <= t) {
      lo = k;
    } else {
      hi = k;
      break;
    }
  }
  if (t == lo.t) return lo.value;
  const double s = (t - lo.t) / (hi.t - lo.t);
  return lo.value + s * (hi.value - lo.value);
}

double eval_field(const ScalarField& f, const Location& x) {
  check_location(f.complex(), x);
  if (x.kind == Location::Kind::Vertex) return f.value(x.index);
  return f.eval_edge(x.index, x.t);
}

std::vector<double> merged_nodes(const ScalarField& g, const ScalarField& h, std::size_t edge) {
  std::vector<double> ts{0.0, 1.0};
  for (const auto& k : g.knots(edge)) ts.push_back(k.t);
  for (const auto& k : h.knots(edge)) ts.push_back(k.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

double sup_distance(const ScalarField& g, const ScalarField& h) {
  if (g.complex_ptr() != h.complex_ptr() && g.values().size() != h.values().size())
    throw PreconditionError("sup_distance: fields live on different complexes");
  double best = 0.0;
  for (std::size_t v = 0; v < g.values().size(); ++v) best = std::max(best, std::abs(g.value(v) - h.value(v)));
  for (std::size_t e = 0; e < g.complex().edge_count(); ++e)
    for (double t : merged_nodes(g, h, e)) best = std::max(best, std::abs(g.eval_edge(e, t) - h.eval_edge(e, t)));
  return best;
}

// ---------------------------------------------------------------------------

TargetSet::TargetSet(std::vector<double> targets) : targets_(std::move(targets)) {
  if (targets_.empty()) throw PreconditionError("target set must be nonempty");
  for (double a : targets_)
    if (!std::isfinite(a)) throw PreconditionError("targets must be finite");
  std::sort(targets_.begin(), targets_.end());
  targets_.erase(std::unique(targets_.begin(), targets_.end()), targets_.end());
}

std::size_t TargetSet::nearest_index(double y) const {
  auto it = std::lower_bound(targets_.begin(), targets_.end(), y);
  if (it == targets_.begin()) return 0;
  if (it == targets_.end()) return targets_.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - targets_.begin());
  const std::size_t lo = hi - 1;
  return (y - targets_[lo] <= targets_[hi] - y) ? lo : hi;
}

double TargetSet::distance(double y) const {
  double best = std::abs(y - targets_.front());
  for (double a : targets_) best = std::min(best, std::abs(y - a));
  return best;
}

// ---------------------------------------------------------------------------

Region::Region(const Complex1D& complex)
    : vertices_(complex.vertex_count(), 0), edges_(complex.edge_count()) {}

void Region::add_interval(const Complex1D& complex, std::size_t e, ParamInterval iv) {
  iv.lo = std::clamp(iv.lo, 0.0, 1.0);
  iv.hi = std::clamp(iv.hi, 0.0, 1.0);
  if (iv.lo > iv.hi) throw PreconditionError("empty parameter interval");
  auto& list = edges_.at(e);
  list.push_back(iv);
  std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  std::vector<ParamInterval> merged;
  for (const auto& cur : list) {
    if (!merged.empty() && cur.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, cur.hi);
    } else {
      merged.push_back(cur);
    }
  }
  list = std::move(merged);
  const Edge& edge = complex.edge(e);
  if (list.front().lo == 0.0) vertices_[edge.u] = 1;
  if (list.back().hi == 1.0) vertices_[edge.v] = 1;
}

bool Region::empty() const {
  return std::none_of(vertices_.begin(), vertices_.end(), [](char c) { return c != 0; }) &&
         std::all_of(edges_.begin(), edges_.end(), [](const auto& l) { return l.empty(); });
}

bool Region::contains(const Location& x, double tol) const {
  if (x.kind == Location::Kind::Vertex) return has_vertex(x.index);
  for (const auto& iv : edges_.at(x.index))
    if (x.t >= iv.lo - tol && x.t <= iv.hi + tol) return true;
  return false;
}

bool Region::intersects(const Region& other) const {
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (vertices_[v] && other.vertices_[v]) return true;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    for (const auto& a : edges_[e])
      for (const auto& b : other.edges_[e])
        if (a.lo <= b.hi && b.lo <= a.hi) return true;
  return false;
}

Region Region::united(const Complex1D& complex, const Region& other) const {
  Region out = *this;
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (other.vertices_[v]) out.vertices_[v] = 1;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    for (const auto& iv : other.edges_[e]) out.add_interval(complex, e, iv);
  return out;
}

std::vector<std::size_t> Region::member_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (vertices_[v]) out.push_back(v);
  return out;
}

}  // namespace wellcheck
