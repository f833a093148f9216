#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wellcheck {

struct Vertex {
  int id = 0;
  double position = 0.0;
};

/// Edge between two vertex *indices* (not ids).
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double length = 1.0;
};

/// A finite 1-dimensional complex. Connectivity is not required.
class Complex1D {
 public:
  Complex1D(std::string name, std::vector<Vertex> vertices, std::vector<Edge> edges);

  const std::string& name() const { return name_; }
  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Vertex& vertex(std::size_t index) const { return vertices_.at(index); }
  const Edge& edge(std::size_t index) const { return edges_.at(index); }

  std::optional<std::size_t> index_of(int id) const;
  /// Edge indices incident to a vertex index.
  std::span<const std::size_t> incident(std::size_t vertex) const { return incident_.at(vertex); }
  int max_vertex_id() const;

 private:
  std::string name_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

using ComplexPtr = std::shared_ptr<const Complex1D>;

/// A point of the complex: a vertex, or a barycentric parameter t on an edge
/// measured from the edge's `u` endpoint.
struct Location {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  std::size_t index = 0;
  double t = 0.0;

  static Location at_vertex(std::size_t v) { return {Kind::Vertex, v, 0.0}; }
  static Location on_edge(std::size_t e, double t) { return {Kind::Edge, e, t}; }

  bool operator==(const Location&) const = default;
};

/// Validates a location against a complex; throws PreconditionError.
void check_location(const Complex1D& complex, const Location& x);
/// Position coordinate of a location (interpolated along its edge).
double position_of(const Complex1D& complex, const Location& x);

/// Interior breakpoint of a piecewise-linear field on an edge.
struct Knot {
  double t = 0.0;
  double value = 0.0;
};

/// Piecewise-linear real field on a complex: one value per vertex, linear along
/// each edge between optional interior knots.
class ScalarField {
 public:
  ScalarField(ComplexPtr complex, std::vector<double> values);
  ScalarField(ComplexPtr complex, std::vector<double> values, std::vector<std::vector<Knot>> knots);

  const ComplexPtr& complex_ptr() const { return complex_; }
  const Complex1D& complex() const { return *complex_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t vertex) const { return values_.at(vertex); }
  std::span<const Knot> knots(std::size_t edge) const { return knots_.at(edge); }
  bool linear_per_edge() const;

  /// Nodes of the edge profile: t=0, every knot, t=1.
  std::vector<Knot> edge_profile(std::size_t edge) const;
  /// Value at parameter t of an edge.
  double eval_edge(std::size_t edge, double t) const;

 private:
  ComplexPtr complex_;
  std::vector<double> values_;
  std::vector<std::vector<Knot>> knots_;
};

double eval_field(const ScalarField& f, const Location& x);

/// Merged node parameters of two fields on one edge (both profiles' t values).
std::vector<double> merged_nodes(const ScalarField& g, const ScalarField& h, std::size_t edge);

/// Exact sup-distance between two PL fields on the same complex (the maximum
/// is attained at a node of one of the two profiles).
double sup_distance(const ScalarField& g, const ScalarField& h);

/// Nonempty sorted set of distinct finite reals.
class TargetSet {
 public:
  explicit TargetSet(std::vector<double> targets);

  std::span<const double> values() const { return targets_; }
  std::size_t size() const { return targets_.size(); }
  double operator[](std::size_t i) const { return targets_[i]; }
  /// Index of the nearest target; ties go to the smaller target.
  std::size_t nearest_index(double y) const;
  double nearest(double y) const { return targets_[nearest_index(y)]; }
  double distance(double y) const;

 private:
  std::vector<double> targets_;
};

/// Closed parameter sub-interval of an edge.
struct ParamInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const ParamInterval&) const = default;
};

/// Closed subset of a complex: vertex membership flags plus closed parameter
/// intervals per edge. Intervals touching t=0 / t=1 imply the endpoint flag.
class Region {
 public:
  Region() = default;
  explicit Region(const Complex1D& complex);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_vertex(std::size_t v) const { return vertices_.at(v) != 0; }
  std::span<const ParamInterval> intervals(std::size_t e) const { return edges_.at(e); }

  void add_vertex(std::size_t v) { vertices_.at(v) = 1; }
  /// Adds [lo, hi] on edge e, merging with overlapping intervals.
  void add_interval(const Complex1D& complex, std::size_t e, ParamInterval iv);
  void add_full_edge(const Complex1D& complex, std::size_t e) { add_interval(complex, e, {0.0, 1.0}); }

  bool empty() const;
  bool contains(const Location& x, double tol = 0.0) const;
  bool intersects(const Region& other) const;
  Region united(const Complex1D& complex, const Region& other) const;
  std::vector<std::size_t> member_vertices() const;

  bool operator==(const Region&) const = default;

 private:
  std::vector<char> vertices_;
  std::vector<std::vector<ParamInterval>> edges_;
};

}  // namespace wellcheck
