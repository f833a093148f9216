#pragma once

#include <map>
#include <string>
#include <vector>

#include "wellcheck/complex.hpp"
#include "wellcheck/well_function.hpp"

namespace wellcheck {

struct BirthEvent {
  double value = 0.0;
  int component = 0;   // id of the birth vertex
  std::size_t vertex = 0;
};

/// Elder rule: the younger component (absorbed) joins the older (survivor).
struct MergeEvent {
  double value = 0.0;
  int survivor = 0;
  int absorbed = 0;
};

struct Extremum {
  double value = 0.0;
  Location where;
};

/// A path-component of the closed sublevel set {w <= r}, with exact extrema
/// of f over it (partial edges included).
struct Component {
  int id = 0;  // smallest member vertex id
  double r = 0.0;
  Extremum min_f;
  Extremum max_f;
  /// Per target a (same order as the TargetSet): extrema of f - a.
  std::vector<Extremum> min_offset;
  std::vector<Extremum> max_offset;
  std::vector<std::size_t> members;  // vertex indices, ascending
  Region region;
};

/// Piecewise-constant integer function on [0, inf). breaks[0] == 0; `at[i]` is
/// the value at breaks[i] and `after[i]` the value on the open interval to
/// the next break (or to infinity for the last).
struct StepFunction {
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;  // +inf for the unbounded tail
    bool lo_closed = true;
    bool hi_closed = false;
    int value = 0;
  };

  std::vector<double> breaks;
  std::vector<int> at;
  std::vector<int> after;

  int value_at(double r) const;
  /// Maximal constant pieces with their endpoint conventions.
  std::vector<Piece> pieces() const;
  std::string describe() const;
};

struct ForwardMap {
  std::map<int, int> image;  // component id at r -> component id at s
  bool injective = true;
};

/// 0-dimensional persistence of the sublevel filtration of a well field.
class MergeTree {
 public:
  explicit MergeTree(WellField well);

  const WellField& well() const { return well_; }
  const std::vector<BirthEvent>& births() const { return births_; }
  const std::vector<MergeEvent>& merges() const { return merges_; }
  std::size_t vertex_count() const { return order_.size(); }

  std::vector<Component> components_at(double r) const;
  std::size_t live_count(double r) const;
  ForwardMap forward_map(double r, double s) const;
  StepFunction betti0_curve() const;
  /// Sorted distinct event values (births and merges).
  std::vector<double> event_values() const;

 private:
  std::vector<std::size_t> roots_at(double r) const;

  WellField well_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> edge_order_;
  std::vector<BirthEvent> births_;
  std::vector<MergeEvent> merges_;
};

MergeTree merge_tree(const WellField& w);
inline std::vector<Component> components_at(const MergeTree& t, double r) { return t.components_at(r); }
inline ForwardMap forward_map(const MergeTree& t, double r, double s) { return t.forward_map(r, s); }
inline StepFunction betti0_curve(const MergeTree& t) { return t.betti0_curve(); }

}  // namespace wellcheck
