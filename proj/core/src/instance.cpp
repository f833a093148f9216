#include "wellcheck/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "wellcheck/errors.hpp"

namespace wellcheck {

using nlohmann::json;

namespace {

constexpr double kDedupTol = 1e-12;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidInput(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required key");
  return *it;
}

double finite_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  const double x = node.get<double>();
  if (!std::isfinite(x)) fail(path, "value must be finite");
  return x;
}

int integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<int>();
}

std::vector<double> vertex_values(const json& node, const std::string& path,
                                  const std::map<int, std::size_t>& index_of_id) {
  if (!node.is_object()) fail(path, "expected an object keyed by vertex id");
  std::vector<double> values(index_of_id.size(), 0.0);
  std::vector<char> seen(index_of_id.size(), 0);
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key_path = path + "/" + it.key();
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(key_path, "field key is not an integer vertex id");
    }
    auto found = index_of_id.find(id);
    if (found == index_of_id.end()) fail(key_path, "value for unknown vertex id " + it.key());
    values[found->second] = finite_number(it.value(), key_path);
    seen[found->second] = 1;
  }
  for (const auto& [id, idx] : index_of_id)
    if (!seen[idx]) fail(path, "missing value for vertex " + std::to_string(id));
  return values;
}

PerturbationFamily parse_family(const json& node, const std::string& path, const ComplexPtr& complex,
                                const ScalarField& f, const std::map<int, std::size_t>& index_of_id) {
  const json& kind_node = require(node, "kind", path);
  if (!kind_node.is_string()) fail(path + "/kind", "expected a string");
  const std::string kind = kind_node.get<std::string>();
  if (kind == "full") return PerturbationFamily::full();
  if (kind == "shift") return PerturbationFamily::shift();
  if (kind != "sampled") fail(path + "/kind", "unknown family kind '" + kind + "'");

  const json& list = require(node, "perturbations", path);
  if (!list.is_array()) fail(path + "/perturbations", "expected an array");
  std::vector<SampledPerturbation> samples;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = path + "/perturbations/" + std::to_string(i);
    ScalarField g(complex, vertex_values(require(list[i], "field", p), p + "/field", index_of_id));
    const double declared = finite_number(require(list[i], "distance", p), p + "/distance");
    if (declared < 0.0) fail(p + "/distance", "distance must be nonnegative");
    const double actual = sup_distance(g, f);
    if (std::abs(actual - declared) > 1e-9)
      fail(p + "/distance", "declared distance does not match sup|g-f| = " + std::to_string(actual));
    samples.push_back({std::move(g), declared});
  }
  return PerturbationFamily::sampled(std::move(samples));
}

RadiiSpec parse_radii(const json& node, const std::string& path) {
  RadiiSpec spec;
  const json& mode = require(node, "mode", path);
  if (mode == "auto") {
    spec.mode = RadiiSpec::Mode::Auto;
  } else if (mode == "explicit") {
    spec.mode = RadiiSpec::Mode::Explicit;
  } else {
    fail(path + "/mode", "expected \"auto\" or \"explicit\"");
  }
  if (node.contains("values")) {
    const json& values = node["values"];
    if (!values.is_array()) fail(path + "/values", "expected an array");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double r = finite_number(values[i], path + "/values/" + std::to_string(i));
      if (r < 0.0) fail(path + "/values/" + std::to_string(i), "radius must be nonnegative");
      spec.values.push_back(r);
    }
  }
  if (spec.mode == RadiiSpec::Mode::Explicit && spec.values.empty())
    fail(path + "/values", "explicit radii need at least one value");
  return spec;
}

}  // namespace

Instance build_complex(const json& doc) {
  if (!doc.is_object()) fail("", "instance must be a JSON object");
  const json& name = require(doc, "name", "");
  if (!name.is_string()) fail("/name", "expected a string");

  const json& vertices = require(doc, "vertices", "");
  if (!vertices.is_array()) fail("/vertices", "expected an array");
  std::vector<Vertex> verts;
  std::map<int, std::size_t> index_of_id;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string p = "/vertices/" + std::to_string(i);
    Vertex v{integer(require(vertices[i], "id", p), p + "/id"),
             finite_number(require(vertices[i], "position", p), p + "/position")};
    if (!index_of_id.emplace(v.id, verts.size()).second)
      fail(p + "/id", "duplicate vertex ids (" + std::to_string(v.id) + ")");
    verts.push_back(v);
  }
  if (verts.empty()) fail("/vertices", "complex needs at least one vertex");

  const json& edges = require(doc, "edges", "");
  if (!edges.is_array()) fail("/edges", "expected an array");
  std::vector<Edge> edge_list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = "/edges/" + std::to_string(i);
    const int u = integer(require(edges[i], "u", p), p + "/u");
    const int v = integer(require(edges[i], "v", p), p + "/v");
    const double len = finite_number(require(edges[i], "length", p), p + "/length");
    auto iu = index_of_id.find(u);
    if (iu == index_of_id.end()) fail(p + "/u", "dangling edge (no vertex with id " + std::to_string(u) + ")");
    auto iv = index_of_id.find(v);
    if (iv == index_of_id.end()) fail(p + "/v", "dangling edge (no vertex with id " + std::to_string(v) + ")");
    if (u == v) fail(p, "edge endpoints must be distinct");
    if (!(len > 0.0)) fail(p + "/length", "edge length must be positive");
    edge_list.push_back({iu->second, iv->second, len});
  }

  auto complex = std::make_shared<const Complex1D>(name.get<std::string>(), std::move(verts), std::move(edge_list));
  ScalarField field(complex, vertex_values(require(doc, "field", ""), "/field", index_of_id));

  const json& targets = require(doc, "targets", "");
  if (!targets.is_array() || targets.empty()) fail("/targets", "expected a nonempty array");
  std::vector<double> target_values;
  for (std::size_t i = 0; i < targets.size(); ++i)
    target_values.push_back(finite_number(targets[i], "/targets/" + std::to_string(i)));

  PerturbationFamily family = doc.contains("family")
                                  ? parse_family(doc["family"], "/family", complex, field, index_of_id)
                                  : PerturbationFamily::full();
  RadiiSpec radii = doc.contains("radii") ? parse_radii(doc["radii"], "/radii") : RadiiSpec{};
  return Instance{complex, std::move(field), TargetSet(std::move(target_values)), std::move(family),
                  std::move(radii)};
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open instance file");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return build_complex(doc);
}

// ---------------------------------------------------------------------------
// Refinement

namespace {

/// Values at which an edge must be split: each target and each midpoint
/// between consecutive targets (where the nearest target switches).
std::vector<double> split_values(const TargetSet& targets) {
  std::vector<double> out(targets.values().begin(), targets.values().end());
  for (std::size_t i = 0; i + 1 < targets.size(); ++i) out.push_back(0.5 * (targets[i] + targets[i + 1]));
  return out;
}

struct Split {
  double t;
  double value;
};

std::vector<Split> edge_splits(double fu, double fv, const std::vector<double>& values) {
  std::vector<Split> splits;
  for (double c : values) {
    const double du = fu - c;
    const double dv = fv - c;
    if ((du < 0.0 && dv > 0.0) || (du > 0.0 && dv < 0.0)) {
      const double t = (c - fu) / (fv - fu);
      if (t > 0.0 && t < 1.0) splits.push_back({t, c});
    }
  }
  std::stable_sort(splits.begin(), splits.end(), [](const Split& a, const Split& b) { return a.t < b.t; });
  std::vector<Split> unique;
  for (const auto& s : splits)
    if (unique.empty() || s.t - unique.back().t > kDedupTol) unique.push_back(s);
  return unique;
}

}  // namespace

bool is_refined(const ScalarField& f, const TargetSet& targets) {
  if (!f.linear_per_edge()) return false;
  const auto values = split_values(targets);
  for (const auto& e : f.complex().edges()) {
    const double fu = f.value(e.u);
    const double fv = f.value(e.v);
    for (const auto& s : edge_splits(fu, fv, values))
      if (s.t > kDedupTol && s.t < 1.0 - kDedupTol) return false;
  }
  return true;
}

Refinement refine_for_targets(const ScalarField& f, const TargetSet& targets) {
  if (!f.linear_per_edge()) throw PreconditionError("refine_for_targets expects a field without knots");
  const Complex1D& c = f.complex();
  const auto values = split_values(targets);

  std::vector<Vertex> verts(c.vertices().begin(), c.vertices().end());
  std::vector<double> fvals(f.values().begin(), f.values().end());
  std::vector<Refinement::Origin> origin;
  for (std::size_t v = 0; v < verts.size(); ++v) origin.push_back({true, v, 0.0});
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> chain(c.edge_count());
  int next_id = c.max_vertex_id() + 1;

  for (std::size_t ei = 0; ei < c.edge_count(); ++ei) {
    const Edge& e = c.edge(ei);
    const double pu = c.vertex(e.u).position;
    const double pv = c.vertex(e.v).position;
    std::size_t prev = e.u;
    double prev_t = 0.0;
    for (const auto& s : edge_splits(fvals[e.u], fvals[e.v], values)) {
      const std::size_t idx = verts.size();
      verts.push_back({next_id++, pu + s.t * (pv - pu)});
      fvals.push_back(s.value);
      origin.push_back({false, ei, s.t});
      chain[ei].push_back(edges.size());
      edges.push_back({prev, idx, (s.t - prev_t) * e.length});
      prev = idx;
      prev_t = s.t;
    }
    chain[ei].push_back(edges.size());
    edges.push_back({prev, e.v, (1.0 - prev_t) * e.length});
  }

  auto refined = std::make_shared<const Complex1D>(c.name(), std::move(verts), std::move(edges));
  ScalarField field(refined, std::move(fvals));
  return Refinement{refined, std::move(field), std::move(origin), std::move(chain)};
}

ScalarField Refinement::transfer(const ScalarField& g) const {
  const Complex1D& old = g.complex();
  if (old.edge_count() != edge_chain.size()) throw PreconditionError("transfer: field is not on the source complex");
  std::vector<double> values(complex->vertex_count());
  for (std::size_t v = 0; v < origin.size(); ++v)
    values[v] = origin[v].original ? g.value(origin[v].index) : g.eval_edge(origin[v].index, origin[v].t);

  std::vector<std::vector<Knot>> knots(complex->edge_count());
  for (std::size_t ei = 0; ei < edge_chain.size(); ++ei) {
    // Parameter breakpoints of the chain along the old edge.
    std::vector<double> bounds{0.0};
    for (std::size_t k = 0; k + 1 < edge_chain[ei].size(); ++k)
      bounds.push_back(origin[complex->edge(edge_chain[ei][k]).v].t);
    bounds.push_back(1.0);
    for (const auto& kn : g.knots(ei)) {
      auto it = std::upper_bound(bounds.begin(), bounds.end(), kn.t);
      const std::size_t seg = static_cast<std::size_t>(it - bounds.begin()) - 1;
      const double lo = bounds[seg];
      const double hi = bounds[seg + 1];
      const double local = (kn.t - lo) / (hi - lo);
      if (local <= 0.0 || local >= 1.0) continue;
      knots[edge_chain[ei][seg]].push_back({local, kn.value});
    }
  }
  return ScalarField(complex, std::move(values), std::move(knots));
}

Instance refine_instance(const Instance& instance) {
  Refinement ref = refine_for_targets(instance.field, instance.targets);
  PerturbationFamily family = instance.family;
  if (family.kind() == FamilyKind::SampledParametric) {
    std::vector<SampledPerturbation> moved;
    for (const auto& s : family.samples()) moved.push_back({ref.transfer(s.field), s.distance});
    family = PerturbationFamily::sampled(std::move(moved));
  }
  return Instance{ref.complex, ref.field, instance.targets, std::move(family), instance.radii};
}

// ---------------------------------------------------------------------------

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::FullSupNorm: return "full";
    case FamilyKind::Shift: return "shift";
    case FamilyKind::SampledParametric: return "sampled";
  }
  return "unknown";
}

PerturbationFamily PerturbationFamily::sampled(std::vector<SampledPerturbation> samples) {
  for (const auto& s : samples)
    if (!(s.distance >= 0.0)) throw PreconditionError("sampled perturbation distances must be nonnegative");
  return PerturbationFamily(FamilyKind::SampledParametric, std::move(samples));
}

}  // namespace wellcheck
