#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace wellcheck {

template <class Fn>
ScalarField compose_pl(const ScalarField& f, std::span<const double> kinks, Fn&& fn) {
  const Complex1D& c = f.complex();
  std::vector<double> values(c.vertex_count());
  for (std::size_t v = 0; v < values.size(); ++v) values[v] = fn(f.value(v));

  std::vector<std::vector<Knot>> knots(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const auto nodes = f.edge_profile(e);
    auto& out = knots[e];
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Knot lo = nodes[i];
      const Knot hi = nodes[i + 1];
      std::vector<std::pair<double, double>> ts;  // (t, kink value)
      for (double k : kinks) {
        const bool crosses = (lo.value < k && hi.value > k) || (lo.value > k && hi.value < k);
        if (!crosses) continue;
        const double s = (k - lo.value) / (hi.value - lo.value);
        const double t = lo.t + s * (hi.t - lo.t);
        if (t > lo.t && t < hi.t) ts.emplace_back(t, k);
      }
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
               ts.end());
      // The field equals the kink value exactly at the crossing.
      for (const auto& [t, k] : ts) out.push_back({t, fn(k)});
      if (i + 2 < nodes.size()) out.push_back({hi.t, fn(hi.value)});
    }
  }
  return ScalarField(f.complex_ptr(), std::move(values), std::move(knots));
}

}  // namespace wellcheck
