#include "wellcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wellcheck/errors.hpp"

namespace wellcheck {

using nlohmann::json;

namespace {

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) x = 0.0;  // print -0 as 0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit(const json& node, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (node.type()) {
    case json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : node.items()) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        emit(value, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(node[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += number(node.get<double>());
      return;
    default:
      out += node.dump();
      return;
  }
}

double as_double(const json& node) {
  if (node.is_null()) return std::numeric_limits<double>::infinity();
  if (!node.is_number()) throw InvalidInput("expected a number in report");
  return node.get<double>();
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

json extremum_json(const Complex1D& c, const Extremum& e) {
  return {{"value", e.value}, {"at", location_to_json(c, e.where)}};
}

Extremum extremum_from_json(const Complex1D& c, const json& node) {
  return {as_double(node.at("value")), location_from_json(c, node.at("at"))};
}

Verdict verdict_from(const std::string& s) {
  if (s == "avoidable") return Verdict::Avoidable;
  if (s == "unavoidable") return Verdict::Unavoidable;
  if (s == "unknown") return Verdict::Unknown;
  throw InvalidInput("unknown verdict '" + s + "'");
}

Provenance provenance_from(const std::string& s) {
  for (auto p : {Provenance::Identity, Provenance::Shift, Provenance::Clamp, Provenance::Blend, Provenance::Lattice,
                 Provenance::User, Provenance::PointWitness})
    if (to_string(p) == s) return p;
  throw InvalidInput("unknown provenance '" + s + "'");
}

}  // namespace

std::string canonical_json(const json& doc) {
  std::string out;
  emit(doc, 0, out);
  out += "\n";
  return out;
}

json instance_to_json(const Instance& instance) {
  const Complex1D& c = *instance.complex;
  json doc;
  doc["name"] = c.name();
  doc["vertices"] = json::array();
  for (const auto& v : c.vertices()) doc["vertices"].push_back({{"id", v.id}, {"position", v.position}});
  doc["edges"] = json::array();
  for (const auto& e : c.edges())
    doc["edges"].push_back({{"u", c.vertex(e.u).id}, {"v", c.vertex(e.v).id}, {"length", e.length}});
  doc["field"] = field_to_json(instance.field)["values"];
  doc["targets"] = json(std::vector<double>(instance.targets.values().begin(), instance.targets.values().end()));
  switch (instance.family.kind()) {
    case FamilyKind::FullSupNorm: doc["family"] = {{"kind", "full"}}; break;
    case FamilyKind::Shift: doc["family"] = {{"kind", "shift"}}; break;
    case FamilyKind::SampledParametric: {
      json list = json::array();
      for (const auto& s : instance.family.samples())
        list.push_back({{"field", field_to_json(s.field)["values"]}, {"distance", s.distance}});
      doc["family"] = {{"kind", "sampled"}, {"perturbations", list}};
      break;
    }
  }
  doc["radii"] = {{"mode", instance.radii.mode == RadiiSpec::Mode::Auto ? "auto" : "explicit"},
                  {"values", instance.radii.values}};
  return doc;
}

json location_to_json(const Complex1D& c, const Location& x) {
  if (x.kind == Location::Kind::Vertex) return {{"vertex", c.vertex(x.index).id}};
  const Edge& e = c.edge(x.index);
  return {{"edge", x.index}, {"t", x.t}, {"u", c.vertex(e.u).id}, {"v", c.vertex(e.v).id}};
}

Location location_from_json(const Complex1D& c, const json& node) {
  if (node.contains("vertex")) {
    const auto idx = c.index_of(node.at("vertex").get<int>());
    if (!idx) throw InvalidInput("location names an unknown vertex");
    return Location::at_vertex(*idx);
  }
  Location x = Location::on_edge(node.at("edge").get<std::size_t>(), node.at("t").get<double>());
  check_location(c, x);
  return x;
}

json field_to_json(const ScalarField& field) {
  const Complex1D& c = field.complex();
  json values = json::object();
  for (std::size_t v = 0; v < c.vertex_count(); ++v) values[std::to_string(c.vertex(v).id)] = field.value(v);
  json doc{{"values", values}};
  json knots = json::array();
  for (std::size_t e = 0; e < c.edge_count(); ++e)
    for (const auto& k : field.knots(e)) knots.push_back({{"edge", e}, {"t", k.t}, {"value", k.value}});
  if (!knots.empty()) doc["knots"] = knots;
  return doc;
}

ScalarField field_from_json(const ComplexPtr& complex, const json& node) {
  const Complex1D& c = *complex;
  std::vector<double> values(c.vertex_count());
  std::vector<char> seen(c.vertex_count(), 0);
  for (const auto& [key, value] : node.at("values").items()) {
    const auto idx = c.index_of(std::stoi(key));
    if (!idx) throw InvalidInput("field names an unknown vertex " + key);
    values[*idx] = as_double(value);
    seen[*idx] = 1;
  }
  for (char s : seen)
    if (!s) throw InvalidInput("field is missing a vertex value");
  std::vector<std::vector<Knot>> knots(c.edge_count());
  if (node.contains("knots"))
    for (const auto& k : node["knots"]) {
      const auto e = k.at("edge").get<std::size_t>();
      if (e >= c.edge_count()) throw InvalidInput("knot on an unknown edge");
      knots[e].push_back({as_double(k.at("t")), as_double(k.at("value"))});
    }
  return ScalarField(complex, std::move(values), std::move(knots));
}

json decision_to_json(const Complex1D& c, const AvoidabilityDecision& decision) {
  json doc{{"verdict", std::string(to_string(decision.verdict))}};
  if (decision.witness) {
    const auto& w = *decision.witness;
    doc["witness"] = {{"provenance", std::string(to_string(w.provenance))},
                      {"distance", w.distance},
                      {"shift", w.shift},
                      {"field", field_to_json(w.field)}};
  }
  if (const auto* band = std::get_if<BandCertificate>(&decision.certificate)) {
    doc["certificate"] = {{"kind", "band"},
                          {"target", band->target},
                          {"r", band->r},
                          {"high", extremum_json(c, band->high)},
                          {"low", extremum_json(c, band->low)}};
  } else if (const auto* cover = std::get_if<ShiftCoverCertificate>(&decision.certificate)) {
    json pieces = json::array();
    for (const auto& p : cover->pieces) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"target", p.target}});
    doc["certificate"] = {{"kind", "shift-cover"}, {"r", cover->r}, {"pieces", pieces}};
  }
  return doc;
}

AvoidabilityDecision decision_from_json(const ComplexPtr& complex, const json& node) {
  const Complex1D& c = *complex;
  AvoidabilityDecision d;
  d.verdict = verdict_from(node.at("verdict").get<std::string>());
  if (node.contains("witness")) {
    const json& w = node["witness"];
    d.witness = PerturbedField{field_from_json(complex, w.at("field")), as_double(w.at("distance")),
                               provenance_from(w.at("provenance").get<std::string>()), as_double(w.at("shift"))};
  }
  if (node.contains("certificate")) {
    const json& cert = node["certificate"];
    const std::string kind = cert.at("kind").get<std::string>();
    if (kind == "band") {
      d.certificate = BandCertificate{as_double(cert.at("target")), as_double(cert.at("r")),
                                      extremum_from_json(c, cert.at("high")), extremum_from_json(c, cert.at("low"))};
    } else if (kind == "shift-cover") {
      ShiftCoverCertificate cover{as_double(cert.at("r")), {}};
      for (const auto& p : cert.at("pieces"))
        cover.pieces.push_back({as_double(p.at("lo")), as_double(p.at("hi")), as_double(p.at("target"))});
      d.certificate = std::move(cover);
    } else {
      throw InvalidInput("unknown certificate kind '" + kind + "'");
    }
  }
  return d;
}

json step_function_json(const StepFunction& fn, const std::string& value_key) {
  json out = json::array();
  for (const auto& p : fn.pieces())
    out.push_back({{"r_lo", p.lo}, {"r_hi", p.hi}, {value_key, p.value}, {"lo_closed", p.lo_closed},
                   {"hi_closed", p.hi_closed}});
  return out;
}

std::string step_function_csv(const StepFunction& fn) {
  std::string out = "r_lo,r_hi,value,lo_closed,hi_closed\n";
  for (const auto& p : fn.pieces()) {
    out += number(p.lo) + "," + (std::isinf(p.hi) ? std::string("inf") : number(p.hi)) + "," +
           std::to_string(p.value) + "," + bool_text(p.lo_closed) + "," + bool_text(p.hi_closed) + "\n";
  }
  return out;
}

json well_diagram_json(const WellDiagram& diagram, bool with_upper) {
  struct Atom {
    double lo, hi;
    bool lo_closed, hi_closed;
    int rank, upper;
  };
  const auto& g = diagram.grid;
  std::vector<Atom> merged;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double next = i + 1 < g.size() ? g[i + 1] : std::numeric_limits<double>::infinity();
    for (const Atom& a : {Atom{g[i], g[i], true, true, diagram.rank.at[i], diagram.rank_upper.at[i]},
                          Atom{g[i], next, false, false, diagram.rank.after[i], diagram.rank_upper.after[i]}}) {
      if (!merged.empty() && merged.back().rank == a.rank && merged.back().upper == a.upper) {
        merged.back().hi = a.hi;
        merged.back().hi_closed = a.hi_closed;
      } else {
        merged.push_back(a);
      }
    }
  }
  json out = json::array();
  for (const auto& a : merged) {
    json piece{{"r_lo", a.lo}, {"r_hi", a.hi}, {"rank", a.rank}, {"lo_closed", a.lo_closed},
               {"hi_closed", a.hi_closed}};
    if (with_upper) piece["rank_upper"] = a.upper;
    out.push_back(piece);
  }
  return out;
}

json swl_json(const SWLReport& report, bool all_pairs) {
  json violations = json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"r", v.r}, {"s", v.s}, {"component", v.component}, {"preimages", v.preimages},
                          {"unavoidable_at_r", v.unavoidable_at_r}});
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"r", p.r}, {"s", p.s}, {"injective", p.injective}, {"holds", p.holds}});
  return {{"violations", violations},
          {"admissible", report.admissible},
          {"component_count_at_0", report.component_count_at_0},
          {"tame", report.tame},
          {"all_pairs", all_pairs},
          {"pairs", pairs}};
}

json analysis_json(const Analysis& a) {
  const Complex1D& c = *a.refined.complex;
  json doc;
  doc["instance"] = instance_to_json(a.input);
  doc["family"] = std::string(to_string(a.input.family.kind()));
  doc["refined"] = {{"vertex_count", c.vertex_count()}, {"edge_count", c.edge_count()}};

  const WellField& w = a.tree.well();
  doc["well_field"] = {{"kind", std::string(to_string(w.kind))}, {"values", field_to_json(w.values)["values"]}};
  json births = json::array();
  for (const auto& b : a.tree.births()) births.push_back({{"value", b.value}, {"component", b.component}});
  json merges = json::array();
  for (const auto& m : a.tree.merges())
    merges.push_back({{"value", m.value}, {"survivor", m.survivor}, {"absorbed", m.absorbed}});
  doc["merge_tree"] = {{"births", births}, {"merges", merges}};

  doc["betti0"] = step_function_json(a.betti0, "value");
  const bool with_upper = a.input.family.kind() == FamilyKind::SampledParametric;
  doc["well_diagram"] = well_diagram_json(a.diagram, with_upper);
  doc["grid"] = a.diagram.grid;

  json fibers = json::array();
  for (const auto& fiber : a.diagram.fibers) {
    json comps = json::array();
    for (const auto& cv : fiber.components) {
      json entry = decision_to_json(c, cv.decision);
      entry["id"] = cv.id();
      json members = json::array();
      for (std::size_t v : cv.component.members) members.push_back(c.vertex(v).id);
      entry["members"] = members;
      entry["min_f"] = extremum_json(c, cv.component.min_f);
      entry["max_f"] = extremum_json(c, cv.component.max_f);
      comps.push_back(entry);
    }
    json f{{"r", fiber.r},
           {"rank", fiber.rank},
           {"injective_from_previous", fiber.injective_from_previous},
           {"components", comps}};
    if (with_upper) f["rank_upper"] = fiber.rank_upper;
    fibers.push_back(f);
  }
  doc["fibers"] = fibers;
  doc["swl"] = swl_json(a.swl, a.all_pairs);

  if (!a.oracle.empty() || !a.subspace.empty()) {
    json checks = json::array();
    for (const auto& o : a.oracle)
      checks.push_back({{"r", o.r}, {"component", o.component}, {"verdict", std::string(to_string(o.verdict))},
                        {"outcome", std::string(to_string(o.outcome))}});
    json ranks = json::array();
    for (const auto& s : a.subspace)
      ranks.push_back({{"r", s.r}, {"rank", s.rank}, {"subspace_rank", s.subspace_rank}, {"hit_sets", s.hit_sets}});
    doc["oracle"] = {{"verdicts", checks}, {"subspace", ranks}};
  }
  return doc;
}

std::vector<std::string> reverify_report(const json& report) {
  std::vector<std::string> failures;
  auto fail = [&](const std::string& what) { failures.push_back(what); };
  try {
    AnalyzeOptions options;
    options.all_pairs = report.at("swl").value("all_pairs", false);
    const Analysis a = analyze(build_complex(report.at("instance")), options);
    const ComplexPtr& complex = a.refined.complex;

    auto match_fiber = [&](double r) -> const WellGroupFiber* {
      for (const auto& fiber : a.diagram.fibers)
        if (std::abs(fiber.r - r) <= 1e-9 * std::max(1.0, std::abs(r))) return &fiber;
      return nullptr;
    };

    for (const auto& fj : report.at("fibers")) {
      const double r = as_double(fj.at("r"));
      const WellGroupFiber* fiber = match_fiber(r);
      if (!fiber) {
        fail("no fiber at r = " + number(r));
        continue;
      }
      for (const auto& cj : fj.at("components")) {
        const int id = cj.at("id").get<int>();
        const ComponentVerdict* cv = fiber->find(id);
        if (!cv) {
          fail("component " + std::to_string(id) + " missing at r = " + number(r));
          continue;
        }
        const AvoidabilityDecision d = decision_from_json(complex, cj);
        std::string why;
        if (!verify_decision(d, cv->component, a.refined.field, a.refined.targets, fiber->r, &why))
          fail("component " + std::to_string(id) + " at r = " + number(r) + ": " + why);
      }
    }

    for (const auto& vj : report.at("swl").at("violations")) {
      const WellGroupFiber* lower = match_fiber(as_double(vj.at("r")));
      const WellGroupFiber* upper = match_fiber(as_double(vj.at("s")));
      if (!lower || !upper) {
        fail("violation refers to an unknown radius");
        continue;
      }
      SWLViolation v{lower->r, upper->r, vj.at("component").get<int>(),
                     vj.at("preimages").get<std::vector<int>>(), vj.at("unavoidable_at_r").get<std::vector<int>>()};
      if (!reverify_violation(v, a.diagram, a.tree))
        fail("violation (" + number(v.r) + ", " + number(v.s) + ") does not re-verify");
    }
  } catch (const std::exception& e) {
    fail(std::string("re-analysis failed: ") + e.what());
  }
  return failures;
}

}  // namespace wellcheck
