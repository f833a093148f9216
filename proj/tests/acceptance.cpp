// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "support.hpp"
#include "wellcheck/errors.hpp"
#include "wellcheck/perturbation.hpp"
#include "wellcheck/well_groups.hpp"

using namespace wellcheck;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct ExpectedPiece {
  double lo, hi;
  bool lo_closed, hi_closed;
  int value;
};

bool same_pieces(const StepFunction& fn, const std::vector<ExpectedPiece>& expected, std::string& detail) {
  const auto pieces = fn.pieces();
  if (pieces.size() != expected.size()) {
    detail = "got " + fn.describe();
    return false;
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const auto& e = expected[i];
    if (p.lo != e.lo || p.hi != e.hi || p.lo_closed != e.lo_closed || p.hi_closed != e.hi_closed ||
        p.value != e.value) {
      detail = "got " + fn.describe();
      return false;
    }
  }
  detail = fn.describe();
  return true;
}

Outcome criterion1() {
  const Analysis a = analyze(counterexample_instance());
  Outcome out;
  out.pass = same_pieces(a.betti0, {{0, 2, true, false, 2}, {2, kInf, true, false, 1}}, out.detail);
  return out;
}

Outcome criterion2() {
  const Analysis a = analyze(counterexample_instance());
  Outcome out;
  out.pass = same_pieces(a.diagram.rank,
                         {{0, 1, true, true, 2}, {1, 2, false, false, 0}, {2, 5, true, true, 1}, {5, kInf, false, false, 0}},
                         out.detail);
  return out;
}

Outcome criterion3() {
  cli::RunConfig config;
  config.command = cli::Command::SwlCheck;
  config.input = cli::kBuiltinCounterexample;
  config.all_pairs = true;
  config.fail_on_violation = true;
  std::ostringstream out_text, err_text;
  const int code = cli::run(config, out_text, err_text);
  const auto doc = nlohmann::json::parse(out_text.str());
  bool saw = false;
  bool in_range = true;
  std::size_t count = 0;
  for (const auto& v : doc["swl"]["violations"]) {
    const double r = v["r"].get<double>();
    const double s = v["s"].get<double>();
    ++count;
    saw = saw || (r == 1.5 && s == 2.0);
    in_range = in_range && r > 1.0 && r < 2.0 && s >= 2.0 && s <= 5.0;
  }
  Outcome out;
  out.pass = code == 1 && saw && in_range;
  out.detail = std::to_string(count) + " violations, (1.5,2) " + (saw ? "present" : "absent") + ", all inside (1,2)x[2,5]: " +
               (in_range ? "yes" : "no") + ", exit " + std::to_string(code);
  return out;
}

Outcome criterion4() {
  std::mt19937 rng(2024);
  std::size_t violations = 0;
  std::size_t pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto c = testkit::random_graph(rng, 1 + trial % 12);
    const ScalarField f = testkit::random_field(rng, c, -10, 10, trial % 3 == 0);
    const double a = std::uniform_real_distribution<double>(-10, 10)(rng);
    AnalyzeOptions options;
    options.all_pairs = true;
    const Analysis an = analyze(testkit::make_instance(f, {a}, PerturbationFamily::full()), options);
    violations += an.swl.violations.size();
    pairs += an.swl.pairs.size();
  }
  return {violations == 0, std::to_string(pairs) + " (r, s) pairs checked, " + std::to_string(violations) + " violations"};
}

Outcome criterion5() {
  std::mt19937 rng(5150);
  double worst_gap = 0.0;
  std::size_t sublevel_mismatch = 0;
  std::size_t witness_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto c = testkit::random_graph(rng, 1 + trial % 12);
    const ScalarField f0 = testkit::random_field(rng, c, -10, 10, trial % 4 == 0);
    std::vector<double> targets{std::uniform_real_distribution<double>(-8, 8)(rng)};
    if (trial % 2) targets.push_back(std::uniform_real_distribution<double>(-8, 8)(rng));
    const TargetSet a(targets);

    const WellField p0 = well_field_prime(f0, a);
    const WellField s0 = well_field_second(f0, a, 1e-12);
    for (std::size_t v = 0; v < c->vertex_count(); ++v) worst_gap = std::max(worst_gap, std::abs(p0.at(v) - s0.at(v)));

    const Refinement ref = refine_for_targets(f0, a);
    const WellField w = well_field_prime(ref.field, a);
    for (double r : {0.0, 0.4, 1.3, 3.0, 8.5}) {
      const Region lhs = sublevel(w, r);
      const Region rhs = preimage(ref.field, thicken(a, r));
      if (!(lhs == rhs)) ++sublevel_mismatch;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Location x = Location::at_vertex(trial % c->vertex_count());
    if (c->edge_count() && trial % 2) x = Location::on_edge(trial % c->edge_count(), unit(rng));
    const double target = targets[0];
    for (double eps : {1e-3, 1e-6}) {
      const ScalarField h = witness_point_perturbation(f0, x, target, eps);
      const bool lands = std::abs(eval_field(h, x) - target) <= 1e-12;
      const bool close = sup_distance(h, f0) <= std::abs(eval_field(f0, x) - target) + 2 * eps + 1e-12;
      if (!lands || !close) ++witness_failures;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "max |f'-f''| = %.3g, sublevel mismatches %zu, witness failures %zu", worst_gap,
                sublevel_mismatch, witness_failures);
  return {worst_gap <= 1e-9 && sublevel_mismatch == 0 && witness_failures == 0, buf};
}

Outcome criterion6() {
  std::mt19937 rng(6060);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = testkit::random_graph(rng, 2 + trial % 11);
    const ScalarField f = testkit::random_field(rng, c, -10, 10);
    const double a = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double r = 0.05 + 1.9 * unit(rng);
    const Region near = preimage(f, IntervalUnion({{a + 2.0, 10.0}}));
    const Region far = preimage(f, IntervalUnion({{-10.0, a - 2.0}}));
    auto jitter = [&] {
      std::vector<double> v(f.values().begin(), f.values().end());
      for (double& y : v) y += r * (2 * unit(rng) - 1);
      return certify(ScalarField(c, v), f, Provenance::User);
    };
    const PerturbedField g = jitter();
    const PerturbedField gp = jitter();
    try {
      const PerturbedField h = blend(f, g, gp, near, far, a);
      bool ok = sup_distance(h.field, f) <= std::max(g.distance, gp.distance) + 1e-9;
      for (std::size_t v = 0; v < c->vertex_count(); ++v) {
        if (near.has_vertex(v)) ok = ok && h.field.value(v) == g.field.value(v);
        if (far.has_vertex(v)) ok = ok && h.field.value(v) == gp.field.value(v);
      }
      ok = ok && zeros_on(h, TargetSet({a}), near.united(*c, far)).empty();
      if (!ok) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {failures == 0, "1000 blends, " + std::to_string(failures) + " postcondition failures"};
}

Outcome criterion7() {
  std::mt19937 rng(7070);
  std::size_t consistent = 0, missed = 0, skipped = 0, contradictions = 0, bad_witnesses = 0;
  std::size_t rank_checks = 0, rank_mismatches = 0;
  LatticeOptions lattice;
  lattice.resolution = 0.05;
  lattice.budget = default_lattice_budget();
  for (int trial = 0; trial < 50; ++trial) {
    auto c = testkit::random_graph(rng, 1 + trial % 8);
    const ScalarField f0 = testkit::random_field(rng, c, -4, 4, trial % 2 == 0);
    const double a = trial % 2 == 0 ? 0.0 : std::uniform_real_distribution<double>(-2, 2)(rng);
    const Instance inst = refine_instance(testkit::make_instance(f0, {a}, PerturbationFamily::full()));
    const MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
    const WellDiagram d = well_diagram(tree, inst.field, inst.targets, inst.family, {});
    for (const auto& fiber : d.fibers) {
      std::vector<std::vector<std::size_t>> hit_sets;
      auto record_hits = [&](const ScalarField& g) {
        std::vector<std::size_t> hit;
        for (std::size_t i = 0; i < fiber.components.size(); ++i)
          if (!zeros_on(g, inst.targets, fiber.components[i].component.region, 1e-9).empty()) hit.push_back(i);
        hit_sets.push_back(std::move(hit));
      };
      record_hits(inst.field);
      for (const auto& cv : fiber.components) {
        if (cv.verdict() == Verdict::Avoidable) {
          if (!verify_decision(cv.decision, cv.component, inst.field, inst.targets, fiber.r)) ++bad_witnesses;
          record_hits(cv.decision.witness->field);
        }
        std::optional<PerturbedField> found;
        try {
          found = lattice_search(inst.field, inst.targets, fiber.r, cv.component, lattice);
        } catch (const PreconditionError&) {
          ++skipped;
          continue;
        } catch (const BudgetExceeded&) {
          ++skipped;
          continue;
        }
        if (found) record_hits(found->field);
        if (found && cv.verdict() == Verdict::Unavoidable) ++contradictions;
        else if (!found && cv.verdict() == Verdict::Avoidable) ++missed;
        else ++consistent;
      }
      std::sort(hit_sets.begin(), hit_sets.end());
      hit_sets.erase(std::unique(hit_sets.begin(), hit_sets.end()), hit_sets.end());
      if (fiber.components.size() > 20 || hit_sets.size() > 100) continue;
      ++rank_checks;
      if (subspace_oracle(fiber.components.size(), hit_sets) != fiber.rank) ++rank_mismatches;
    }
  }
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "lattice: %zu consistent, %zu avoidable but not found on the lattice, %zu skipped (stencil or budget), "
                "%zu contradictions; %zu invalid witnesses; rank = subspace rank on %zu/%zu fibers",
                consistent, missed, skipped, contradictions, bad_witnesses, rank_checks - rank_mismatches, rank_checks);
  return {contradictions == 0 && bad_witnesses == 0 && rank_mismatches == 0 && consistent > 0, buf};
}

Outcome criterion8() {
  std::mt19937 rng(8080);
  std::uniform_real_distribution<double> u(-5, 5);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    std::vector<double> a(dim), y(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      a[i] = u(rng);
      y[i] = a[i] + u(rng) / 2.0;
    }
    const double r = std::abs(u(rng)) / 2.0;
    const double eps = 0.01 + std::abs(u(rng)) / 10.0;
    const EuclideanPoint pa(a), py(y);
    const EuclideanPoint img = contraction_map(pa, r, eps, py);
    const double rho = distance(py, pa);
    bool ok = distance(img, py) <= r + 2 * eps + 1e-12;
    if (rho >= r + 2 * eps) ok = ok && distance(img, py) <= 1e-12;
    if (rho <= r + eps) ok = ok && distance(img, pa) <= 1e-12;
    if (!ok) ++failures;
  }
  return {failures == 0, "1000 samples, " + std::to_string(failures) + " failures"};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Criterion> criteria{{1, criterion1, 1.0},  {2, criterion2, 1.0},  {3, criterion3, 0.0},
                                        {4, criterion4, 30.0}, {5, criterion5, 0.0},  {6, criterion6, 0.0},
                                        {7, criterion7, 300.0}, {8, criterion8, 0.0}};
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
      outcome.pass = false;
      outcome.detail += "; over the time limit";
    }
    all = all && outcome.pass;
    std::printf("criterion %d: %s (%s; %.3fs)\n", c.number, outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
