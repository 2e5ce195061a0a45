#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qchar/rational.hpp"
#include "qchar/series.hpp"
#include "qchar/superalg.hpp"

namespace qchar {

// Directed graph with numbered vertices and numbered legs. Every vertex has
// exactly one outgoing incidence and at least one incoming incidence.
struct DecoratedGraph {
  // out[v] >= 0: edge v -> out[v]; out[v] = -(l+1): outgoing leg l.
  std::vector<int> out;
  // in_legs[l]: vertex carrying incoming leg l.
  std::vector<int> in_legs;

  std::size_t vertex_count() const { return out.size(); }
  std::size_t in_leg_count() const { return in_legs.size(); }
  std::size_t out_leg_count() const;
  std::vector<int> indegrees() const;
  // Incoming incidences of v: legs as -(l+1) ascending, then edge sources ascending.
  std::vector<int> incoming(int v) const;
  bool connected() const;
  void validate() const;

  // "k; edges: s->t,...; in: v1,...; out: w1,..." with 1-based vertices.
  std::string to_string() const;

  auto operator<=>(const DecoratedGraph&) const = default;
  bool operator==(const DecoratedGraph&) const = default;
};

// Graph with vertex v renamed to perm[v].
DecoratedGraph relabel(const DecoratedGraph& g, const std::vector<int>& perm);
DecoratedGraph parse_graph(const std::string& text);

struct CanonicalGraph {
  DecoratedGraph graph;
  int sign = 1;  // parity of the relabeling, 0 when an odd automorphism exists
};

CanonicalGraph canonicalize(const DecoratedGraph& g);

// Q-linear combination of canonical graphs.
class GraphVector {
 public:
  GraphVector() = default;
  explicit GraphVector(const DecoratedGraph& g, const Rational& coef = 1);

  const std::map<DecoratedGraph, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Canonicalizes g and adds sign * coef.
  void add(const DecoratedGraph& g, const Rational& coef);

  GraphVector& operator+=(const GraphVector& other);
  GraphVector& operator*=(const Rational& s);
  friend GraphVector operator+(GraphVector a, const GraphVector& b) { return a += b; }
  friend GraphVector operator*(GraphVector a, const Rational& s) { return a *= s; }
  friend bool operator==(const GraphVector& a, const GraphVector& b) { return a.terms_ == b.terms_; }

  // One line per graph: "<p/q> | <graph dump>".
  std::string to_string() const;

 private:
  std::map<DecoratedGraph, Rational> terms_;
};

// Splitting of vertex `vertex` before the sign and normalization are applied.
// upstream_inputs = 0 marks the bivalent insertion on the outgoing incidence.
struct VertexSplitting {
  DecoratedGraph graph;
  int vertex = 0;
  std::size_t downstream_inputs = 0;
  std::size_t upstream_inputs = 0;
};

std::vector<VertexSplitting> vertex_splittings(const DecoratedGraph& g);

GraphVector graph_differential(const GraphVector& v);
GraphVector graph_differential(const DecoratedGraph& g);

enum class GraphFamily { Tree, Cyclic, Polygon, Line, Connected, Mixed, All };

GraphFamily parse_family(const std::string& name);
std::string family_name(GraphFamily f);
bool in_family(const DecoratedGraph& g, GraphFamily f);

struct ComplexSlice {
  GraphFamily family = GraphFamily::All;
  std::size_t in_legs = 0, out_legs = 0, vertices = 0;
  std::vector<DecoratedGraph> basis;
};

// Default 8, overridden by QCHAR_BUDGET_VERTICES.
std::size_t vertex_budget();

// All canonical nonzero graphs of the slice in increasing order.
// Throws BudgetError when vertices exceeds vertex_budget().
ComplexSlice enumerate_basis(GraphFamily family, std::size_t in_legs, std::size_t out_legs,
                             std::size_t vertices);

struct CohomologyRow {
  std::size_t vertices = 0;
  std::size_t dim_chains = 0;
  std::size_t dim = 0;
};

// Cohomology of the family with fixed legs in vertex counts 1..max_vertices;
// needs the slice with max_vertices + 1 vertices.
std::vector<CohomologyRow> cohomology_table(GraphFamily family, std::size_t in_legs, std::size_t out_legs,
                                            std::size_t max_vertices, unsigned threads = 1);
// Tree: n+1 in-legs and one out-leg; cyclic: n in-legs; polygon and line: n = max vertices.
std::vector<CohomologyRow> cohomology_dims(GraphFamily family, std::size_t n, unsigned threads = 1);

// Rank of the differential from the k-vertex slice into the (k+1)-vertex slice.
std::size_t differential_rank(const ComplexSlice& from, const ComplexSlice& to);

// A: polygon with 2n-1 vertices; B: caterpillar with n trivalent vertices;
// C: wheel with n trivalent vertices, one leg each.
DecoratedGraph cocycle_graph(Series s, int n);
GraphVector basis_cocycles(Series s, int n);

// Corolla with r inputs evaluates to the (r,1) tensor of r-th derivatives of Q;
// edges are contractions. Free slots: in-legs in order, then out-legs in order.
TensorField evaluate_graph(const DecoratedGraph& g, const VectorField& q);
TensorField evaluate_graph(const GraphVector& v, const VectorField& q);
// Same with the leg counts given, so that the zero vector has the right type.
TensorField evaluate_graph(const GraphVector& v, const VectorField& q, std::size_t in_legs, std::size_t out_legs);

// evaluate(dg) = L_Q evaluate(g).
bool chain_property_holds(const DecoratedGraph& g, const VectorField& q);
// Graphs of the list violating the chain property; evaluations of graphs shared
// between differentials are computed once.
std::vector<DecoratedGraph> chain_property_failures(const std::vector<DecoratedGraph>& graphs, const VectorField& q);

}  // namespace qchar
