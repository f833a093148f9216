#include <doctest.h>

#include <cstdlib>

#include "support.hpp"
#include "wellcheck/errors.hpp"
#include "wellcheck/perturbation.hpp"
#include "wellcheck/well_groups.hpp"

using namespace wellcheck;

namespace {

struct Fixture {
  Instance inst;
  MergeTree tree;
};

Fixture refined(const ScalarField& f, std::vector<double> targets, PerturbationFamily fam) {
  Instance inst = refine_instance(testkit::make_instance(f, std::move(targets), std::move(fam)));
  MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
  return {std::move(inst), std::move(tree)};
}

Region whole(const Complex1D& c) {
  Region r(c);
  for (std::size_t v = 0; v < c.vertex_count(); ++v) r.add_vertex(v);
  for (std::size_t e = 0; e < c.edge_count(); ++e) r.add_full_edge(c, e);
  return r;
}

}  // namespace

TEST_CASE("zeros_on finds vertex hits and interior crossings") {
  auto c = testkit::path_complex({0.0, 1.0, 2.0});
  ScalarField g(c, {-1.0, 1.0, 0.0});
  const auto zeros = zeros_on(g, TargetSet({0.0}), whole(*c));
  REQUIRE(zeros.size() == 2);
  CHECK(zeros[0] == Location::at_vertex(2));
  CHECK(zeros[1] == Location::on_edge(0, 0.5));

  Region part(*c);
  part.add_interval(*c, 0, {0.0, 0.4});
  CHECK(zeros_on(g, TargetSet({0.0}), part).empty());
  CHECK(zeros_on(g, TargetSet({0.0}), part, 0.21).size() == 1);
}

TEST_CASE("zeros_on: empty region and constant fields") {
  auto c = testkit::path_complex({0.0, 1.0});
  ScalarField g(c, {2.0, 2.0});
  CHECK(zeros_on(g, TargetSet({0.0}), Region(*c)).empty());
  CHECK(zeros_on(g, TargetSet({2.0}), whole(*c)).size() == 2);
}

TEST_CASE("counterexample shift verdicts and witnesses") {
  const Instance inst = counterexample_instance();
  const MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
  const auto fam = PerturbationFamily::shift();

  SUBCASE("r = 1.5: the left component is avoided by shifting right by 1.5") {
    const auto comps = tree.components_at(1.5);
    const auto d = avoidable(comps[0], inst.field, inst.targets, 1.5, fam);
    CHECK(d.verdict == Verdict::Avoidable);
    REQUIRE(d.witness);
    CHECK(d.witness->provenance == Provenance::Shift);
    CHECK(d.witness->shift == 1.5);
    CHECK(d.witness->distance == 1.5);
    CHECK(zeros_on(*d.witness, inst.targets, comps[0].region).empty());
  }
  SUBCASE("r = 1: both components are unavoidable with a cover certificate") {
    for (const auto& comp : tree.components_at(1.0)) {
      const auto d = avoidable(comp, inst.field, inst.targets, 1.0, fam);
      CHECK(d.verdict == Verdict::Unavoidable);
      CHECK(std::holds_alternative<ShiftCoverCertificate>(d.certificate));
      CHECK(verify_decision(d, comp, inst.field, inst.targets, 1.0));
    }
  }
  SUBCASE("r just above 5: the whole interval can be shifted off both targets") {
    const auto comps = tree.components_at(5.01);
    REQUIRE(comps.size() == 1);
    CHECK(avoidable(comps[0], inst.field, inst.targets, 5.01, fam).verdict == Verdict::Avoidable);
    CHECK(avoidable(comps[0], inst.field, inst.targets, 5.0, fam).verdict == Verdict::Unavoidable);
  }
}

TEST_CASE("full sup-norm rule: unavoidable iff the component spans [a - r, a + r]") {
  auto c = testkit::path_complex({-3.0, 0.0, 3.0});
  const auto fx = refined(ScalarField(c, {-3.0, 0.0, 3.0}), {0.0}, PerturbationFamily::full());
  const auto fam = PerturbationFamily::full();
  for (double r : {0.0, 1.0, 3.0}) {
    const auto comps = fx.tree.components_at(r);
    REQUIRE(comps.size() == 1);
    const auto d = avoidable(comps[0], fx.inst.field, fx.inst.targets, r, fam);
    CHECK(d.verdict == Verdict::Unavoidable);
    CHECK(std::holds_alternative<BandCertificate>(d.certificate));
  }
  const auto comps = fx.tree.components_at(3.5);
  const auto d = avoidable(comps[0], fx.inst.field, fx.inst.targets, 3.5, fam);
  CHECK(d.verdict == Verdict::Avoidable);
  REQUIRE(d.witness);
  CHECK(d.witness->distance <= 3.5);
  CHECK(zeros_on(*d.witness, fx.inst.targets, comps[0].region).empty());
}

TEST_CASE("full sup-norm rule refuses several targets") {
  auto c = testkit::path_complex({0.0, 1.0});
  const auto fx = refined(ScalarField(c, {0.0, 1.0}), {0.0, 1.0}, PerturbationFamily::full());
  const auto comps = fx.tree.components_at(0.1);
  try {
    avoidable(comps[0], fx.inst.field, fx.inst.targets, 0.1, PerturbationFamily::full());
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("singleton targets only") != std::string::npos);
  }
}

TEST_CASE("sampled family: avoidable only with a listed witness, otherwise unknown") {
  auto c = testkit::path_complex({0.0, 1.0});
  ScalarField f(c, {-1.0, 1.0});
  const PerturbationFamily fam = PerturbationFamily::sampled({{ScalarField(c, {0.5, 2.5}), 1.5}});
  const auto fx = refined(f, {0.0}, fam);
  const auto comps = fx.tree.components_at(1.0);
  REQUIRE(comps.size() == 1);
  CHECK(avoidable(comps[0], fx.inst.field, fx.inst.targets, 1.0, fx.inst.family).verdict == Verdict::Unknown);
  const auto d = avoidable(comps[0], fx.inst.field, fx.inst.targets, 1.5, fx.inst.family);
  CHECK(d.verdict == Verdict::Avoidable);
  CHECK(d.witness->provenance == Provenance::User);
}

TEST_CASE("verify_decision rejects tampered witnesses and certificates") {
  const Instance inst = counterexample_instance();
  const MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
  const auto comps = tree.components_at(1.5);
  auto d = avoidable(comps[0], inst.field, inst.targets, 1.5, PerturbationFamily::shift());
  std::string why;
  CHECK(verify_decision(d, comps[0], inst.field, inst.targets, 1.5, &why));
  CHECK_FALSE(verify_decision(d, comps[0], inst.field, inst.targets, 1.0, &why));
  CHECK(why.find("farther") != std::string::npos);
  d.witness.reset();
  CHECK_FALSE(verify_decision(d, comps[0], inst.field, inst.targets, 1.5));

  auto cover = avoidable(tree.components_at(1.0)[0], inst.field, inst.targets, 1.0, PerturbationFamily::shift());
  auto& pieces = std::get<ShiftCoverCertificate>(cover.certificate).pieces;
  pieces.erase(pieces.begin());  // the piece for a = -2 is the one covering [-1, 1]
  CHECK_FALSE(verify_decision(cover, tree.components_at(1.0)[0], inst.field, inst.targets, 1.0));
}

TEST_CASE("urysohn weights are 1 on C, 0 on C', and in between elsewhere") {
  auto c = testkit::path_complex({0.0, 1.0, 2.0, 3.0});
  Region near(*c), far(*c);
  near.add_vertex(0);
  far.add_vertex(3);
  const auto phi = urysohn(c, near, far).phi;
  CHECK(phi.value(0) == 1.0);
  CHECK(phi.value(3) == 0.0);
  CHECK(phi.value(1) == doctest::Approx(2.0 / 3.0));
  CHECK(phi.value(2) == doctest::Approx(1.0 / 3.0));

  Region overlap(*c);
  overlap.add_vertex(0);
  CHECK_THROWS_AS(urysohn(c, near, overlap), PreconditionError);
}

TEST_CASE("urysohn: unreachable far set gives weight 1") {
  auto c = std::make_shared<const Complex1D>("two", std::vector<Vertex>{{0, 0.0}, {1, 1.0}, {2, 5.0}},
                                             std::vector<Edge>{{0, 1, 1.0}});
  Region near(*c), far(*c);
  near.add_vertex(0);
  far.add_vertex(2);
  const auto phi = urysohn(c, near, far).phi;
  CHECK(phi.value(1) == 1.0);
  CHECK(phi.value(2) == 0.0);
}

TEST_CASE("blend postconditions on random inputs") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = testkit::random_graph(rng, 2 + trial % 10);
    ScalarField f = testkit::random_field(rng, c, -10, 10);
    const double a = 0.0;
    const double r = 0.1 + 1.7 * u(rng);
    const Region near = preimage(f, IntervalUnion({{2.0, 10.0}}));
    const Region far = preimage(f, IntervalUnion({{-10.0, -2.0}}));
    auto jitter = [&] {
      std::vector<double> v(f.values().begin(), f.values().end());
      for (double& x : v) x += r * (2 * u(rng) - 1);
      return certify(ScalarField(c, v), f, Provenance::User);
    };
    const PerturbedField g = jitter();
    const PerturbedField gp = jitter();
    const PerturbedField h = blend(f, g, gp, near, far, a);
    CHECK(h.distance <= std::max(g.distance, gp.distance) + 1e-9);
    for (std::size_t v = 0; v < c->vertex_count(); ++v) {
      if (near.has_vertex(v)) CHECK(h.field.value(v) == g.field.value(v));
      if (far.has_vertex(v)) CHECK(h.field.value(v) == gp.field.value(v));
    }
    CHECK(zeros_on(h, TargetSet({a}), near.united(*c, far)).empty());
  }
}

TEST_CASE("blend requires zero-free inputs") {
  auto c = testkit::path_complex({0.0, 1.0, 2.0});
  ScalarField f(c, {-1.0, 0.0, 1.0});
  Region near(*c), far(*c);
  near.add_vertex(1);
  far.add_vertex(2);
  const auto g = certify(f, f, Provenance::Identity);
  CHECK_THROWS_AS(blend(f, g, g, near, far, 0.0), PreconditionError);
}

TEST_CASE("lattice search finds avoiders and respects unavoidability") {
  auto c = testkit::path_complex({0.0, 1.0, 2.0});
  const auto fx = refined(ScalarField(c, {-0.5, 0.2, 0.6}), {0.0}, PerturbationFamily::full());
  const auto comps = fx.tree.components_at(0.7);
  REQUIRE(comps.size() == 1);
  const auto found = lattice_search(fx.inst.field, fx.inst.targets, 0.7, comps[0]);
  REQUIRE(found);
  CHECK(found->distance <= 0.7 + 1e-12);
  CHECK(zeros_on(*found, fx.inst.targets, comps[0].region).empty());
  CHECK(avoidable(comps[0], fx.inst.field, fx.inst.targets, 0.7, PerturbationFamily::full()).verdict ==
        Verdict::Avoidable);

  const auto tight = fx.tree.components_at(0.5);
  CHECK(avoidable(tight[0], fx.inst.field, fx.inst.targets, 0.5, PerturbationFamily::full()).verdict ==
        Verdict::Unavoidable);
  CHECK_FALSE(lattice_search(fx.inst.field, fx.inst.targets, 0.5, tight[0]));
}

TEST_CASE("lattice search enforces its stencil limit and budget") {
  std::vector<double> xs;
  for (int i = 0; i < 14; ++i) xs.push_back(i);
  auto c = testkit::path_complex(xs);
  std::vector<double> vals;
  for (int i = 0; i < 14; ++i) vals.push_back(i % 2 ? 0.5 : -0.5);
  const auto fx = refined(ScalarField(c, vals), {0.0}, PerturbationFamily::full());
  const auto comps = fx.tree.components_at(1.0);
  CHECK_THROWS_AS(lattice_search(fx.inst.field, fx.inst.targets, 1.0, comps[0]), PreconditionError);

  auto small = testkit::path_complex({0.0, 1.0, 2.0});
  // The high point is a partial-edge tip, so refuting it takes propagation.
  const auto sx = refined(ScalarField(small, {-0.5, 0.9, -0.5}), {0.0}, PerturbationFamily::full());
  LatticeOptions opts;
  opts.budget = 3;
  CHECK_THROWS_AS(lattice_search(sx.inst.field, sx.inst.targets, 0.5, sx.tree.components_at(0.5)[0], opts),
                  BudgetExceeded);
}

TEST_CASE("WELLCHECK_BUDGET overrides the default lattice budget") {
  ::setenv("WELLCHECK_BUDGET", "1234", 1);
  CHECK(default_lattice_budget() == 1234);
  ::setenv("WELLCHECK_BUDGET", "junk", 1);
  CHECK(default_lattice_budget() == 10'000'000);
  ::unsetenv("WELLCHECK_BUDGET");
  CHECK(default_lattice_budget() == 10'000'000);
}

TEST_CASE("minimizing perturbation hits exactly the unavoidable components") {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = testkit::random_graph(rng, 2 + trial % 10);
    ScalarField f = testkit::random_field(rng, c, -10, 10);
    const double a = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto fx = refined(f, {a}, PerturbationFamily::full());
    for (double r : {0.5, 2.0, 6.0}) {
      const auto result = minimizing_perturbation(fx.inst.field, a, r, PerturbationFamily::full(), fx.tree);
      CHECK(result.h.distance <= r + 1e-9);
      const auto comps = fx.tree.components_at(r);
      REQUIRE(result.ledger.size() == comps.size());
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const bool hit = !zeros_on(result.h, fx.inst.targets, comps[i].region, 1e-9).empty();
        CHECK(hit == (result.ledger[i].verdict == Verdict::Unavoidable));
        CHECK(hit == result.ledger[i].hit);
      }
    }
  }
}

TEST_CASE("minimizing perturbation needs the full family and the tree's target") {
  const Instance inst = counterexample_instance();
  const MergeTree tree(well_field_for(inst.field, inst.targets, inst.family));
  CHECK_THROWS_AS(minimizing_perturbation(inst.field, 2.0, 1.0, PerturbationFamily::shift(), tree),
                  PreconditionError);
  CHECK_THROWS_AS(minimizing_perturbation(inst.field, 2.0, 1.0, PerturbationFamily::full(), tree),
                  PreconditionError);
}

TEST_CASE("shift candidates stay on the lattice and include both ends") {
  auto c = testkit::path_complex({0.0, 1.0});
  const auto cands = shift_candidates(ScalarField(c, {0.0, 1.0}), 0.1, 0.05);
  REQUIRE(cands.size() == 5);
  CHECK(cands.front().shift == -0.1);
  CHECK(cands.back().shift == 0.1);
}
