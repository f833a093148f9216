#pragma once

// Shared fixtures for the test binaries: random instance generators and
// oracles that recompute quantities without going through the library's
// merge tree, refinement or avoidability rules.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "wellcheck/analysis.hpp"
#include "wellcheck/complex.hpp"
#include "wellcheck/instance.hpp"

namespace testkit {

using namespace wellcheck;

inline ComplexPtr path_complex(const std::vector<double>& positions, std::string name = "path") {
  std::vector<Vertex> verts;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < positions.size(); ++i) verts.push_back({static_cast<int>(i), positions[i]});
  for (std::size_t i = 0; i + 1 < positions.size(); ++i)
    edges.push_back({i, i + 1, std::abs(positions[i + 1] - positions[i])});
  return std::make_shared<const Complex1D>(std::move(name), std::move(verts), std::move(edges));
}

/// Random graph on n vertices: a random forest (each vertex links to an
/// earlier one with probability 0.9) plus a few extra edges. Vertex ids are
/// deliberately non-contiguous.
inline ComplexPtr random_graph(std::mt19937& rng, std::size_t n, double extra = 0.15) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> len(0.5, 2.0);
  std::vector<Vertex> verts;
  for (std::size_t i = 0; i < n; ++i) verts.push_back({static_cast<int>(7 + 3 * i), static_cast<double>(i)});
  std::vector<Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 1; i < n; ++i) {
    if (unit(rng) > 0.9) continue;
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    edges.push_back({j, i, len(rng)});
    seen.insert({j, i});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!seen.count({i, j}) && unit(rng) < extra / static_cast<double>(n)) {
        edges.push_back({i, j, len(rng)});
        seen.insert({i, j});
      }
  return std::make_shared<const Complex1D>("random", std::move(verts), std::move(edges));
}

inline ScalarField random_field(std::mt19937& rng, const ComplexPtr& c, double lo, double hi, bool integer = false) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_int_distribution<int> k(static_cast<int>(lo), static_cast<int>(hi));
  std::vector<double> values(c->vertex_count());
  for (double& v : values) v = integer ? k(rng) : u(rng);
  return ScalarField(c, std::move(values));
}

inline Instance make_instance(const ScalarField& f, std::vector<double> targets, PerturbationFamily family) {
  return Instance{f.complex_ptr(), f, TargetSet(std::move(targets)), std::move(family), RadiiSpec{}};
}

/// Path components of f^{-1}(A_r) for a field without knots, computed from
/// the preimages of the bands [a - r, a + r] edge by edge. Each component is
/// returned as the range of f over it.
inline std::vector<std::pair<double, double>> preimage_ranges(const ScalarField& f, const std::vector<double>& targets,
                                                              double r) {
  const Complex1D& c = f.complex();
  const std::size_t n = c.vertex_count();
  auto near = [&](double y) {
    for (double a : targets)
      if (a - r <= y && y <= a + r) return true;
    return false;
  };
  struct Piece {
    std::size_t edge;
    double t0, t1;
  };
  std::vector<Piece> pieces;
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const double fu = f.value(c.edge(e).u);
    const double fv = f.value(c.edge(e).v);
    std::vector<std::pair<double, double>> ivs;
    for (double a : targets) {
      if (fu == fv) {
        if (near(fu)) ivs.push_back({0.0, 1.0});
        continue;
      }
      double t0 = (a - r - fu) / (fv - fu);
      double t1 = (a + r - fu) / (fv - fu);
      if (t0 > t1) std::swap(t0, t1);
      t0 = std::max(t0, 0.0);
      t1 = std::min(t1, 1.0);
      if (t0 <= t1) ivs.push_back({t0, t1});
    }
    std::sort(ivs.begin(), ivs.end());
    for (const auto& iv : ivs) {
      if (!pieces.empty() && pieces.back().edge == e && iv.first <= pieces.back().t1)
        pieces.back().t1 = std::max(pieces.back().t1, iv.second);
      else
        pieces.push_back({e, iv.first, iv.second});
    }
  }
  std::vector<std::size_t> parent(n + pieces.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto join = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  std::vector<char> live(n + pieces.size(), 0);
  std::vector<std::pair<double, double>> span(n + pieces.size());
  for (std::size_t v = 0; v < n; ++v) {
    live[v] = near(f.value(v));
    span[v] = {f.value(v), f.value(v)};
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const double fu = f.value(c.edge(p.edge).u);
    const double fv = f.value(c.edge(p.edge).v);
    const double y0 = fu + p.t0 * (fv - fu);
    const double y1 = fu + p.t1 * (fv - fu);
    live[n + i] = 1;
    span[n + i] = {std::min(y0, y1), std::max(y0, y1)};
    if (p.t0 == 0.0) join(n + i, c.edge(p.edge).u);
    if (p.t1 == 1.0) join(n + i, c.edge(p.edge).v);
  }
  std::map<std::size_t, std::pair<double, double>> ranges;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (!live[i]) continue;
    auto [it, fresh] = ranges.try_emplace(find(i), span[i]);
    if (!fresh) {
      it->second.first = std::min(it->second.first, span[i].first);
      it->second.second = std::max(it->second.second, span[i].second);
    }
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [root, range] : ranges) out.push_back(range);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t preimage_components(const ScalarField& f, const std::vector<double>& targets, double r) {
  return preimage_ranges(f, targets, r).size();
}

/// Whether some translation t in [-r, r] keeps every target out of the range
/// [lo + t, hi + t] by more than tol. Checks +-r and the midpoints between
/// consecutive critical translations.
inline bool shift_avoids_range(double lo, double hi, const std::vector<double>& targets, double r,
                               double tol = 1e-9) {
  std::vector<double> cuts{-r, r};
  for (double a : targets)
    for (double t : {a - hi, a - lo})
      if (-r < t && t < r) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> probes{-r, r};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) probes.push_back(0.5 * (cuts[i] + cuts[i + 1]));
  for (double t : probes) {
    bool clear = true;
    for (double a : targets)
      if (lo + t <= a + tol && a <= hi + t + tol) clear = false;
    if (clear) return true;
  }
  return false;
}

/// Distance from y to the nearest target, by direct minimization.
inline double distance_to(const std::vector<double>& targets, double y) {
  double best = INFINITY;
  for (double a : targets) best = std::min(best, std::abs(y - a));
  return best;
}

}  // namespace testkit
