#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "qchar/errors.hpp"
#include "qchar/graphs.hpp"
#include "qchar/qmanifolds.hpp"
#include "qchar/random.hpp"

using namespace qchar;

namespace {

int perm_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

std::vector<int> random_perm(Rng& rng, std::size_t n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(i) - 1))]);
  return p;
}

std::vector<DecoratedGraph> small_graphs(std::size_t max_vertices) {
  std::vector<DecoratedGraph> out;
  for (std::size_t in = 0; in <= 3; ++in)
    for (std::size_t o = 0; o <= 2; ++o)
      for (std::size_t v = 1; v <= max_vertices; ++v) {
        const ComplexSlice s = enumerate_basis(GraphFamily::All, in, o, v);
        out.insert(out.end(), s.basis.begin(), s.basis.end());
      }
  return out;
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("graph text round trip") {
  const std::string text = "3; edges: 1->3,2->3; in: 1,1,2,2,3; out: 3";
  const DecoratedGraph g = parse_graph(text);
  CHECK(g.vertex_count() == 3);
  CHECK(g.in_leg_count() == 5);
  CHECK(g.out_leg_count() == 1);
  CHECK(g.to_string() == text);
  CHECK(parse_graph(g.to_string()) == g);
  CHECK(g.connected());
}

TEST_CASE("malformed graphs are rejected") {
  CHECK_THROWS_AS(parse_graph("2; edges: 1->2; in: 1; out:"), ValidationError);       // vertex 2 has no outgoing
  CHECK_THROWS_AS(parse_graph("1; edges: ; in: ; out: 1"), ValidationError);          // no incoming incidence
  CHECK_THROWS_AS(parse_graph("2; edges: 1->3; in: 1,2; out: 2"), ValidationError);   // bad endpoint
  CHECK_THROWS_AS(parse_graph("two; edges: ; in: 1; out: 1"), ValidationError);
  CHECK_THROWS_AS(parse_graph("1; in: 1; out: 1"), ValidationError);
  CHECK_THROWS_AS(parse_family("forest"), ValidationError);
}

TEST_CASE("relabeling changes the vector by the sign of the permutation") {
  Rng rng(41);
  const auto graphs = small_graphs(3);
  for (int t = 0; t < 200; ++t) {
    const DecoratedGraph& g = graphs[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(graphs.size()) - 1))];
    const std::vector<int> p = random_perm(rng, g.vertex_count());
    CHECK(GraphVector(relabel(g, p)) == GraphVector(g) * Rational(perm_sign(p)));
  }
}

TEST_CASE("canonical form is a class invariant") {
  Rng rng(42);
  const auto graphs = small_graphs(3);
  for (const auto& g : graphs) {
    const std::vector<int> p = random_perm(rng, g.vertex_count());
    CHECK(canonicalize(relabel(g, p)).graph == canonicalize(g).graph);
  }
}

TEST_CASE("a graph with an odd automorphism vanishes") {
  // The two-vertex cycle: swapping the vertices is an odd automorphism.
  const DecoratedGraph g = parse_graph("2; edges: 1->2,2->1; in: ; out:");
  CHECK(canonicalize(g).sign == 0);
  CHECK(GraphVector(g).is_zero());
}

TEST_CASE("differential squares to zero on basis graphs and random vectors") {
  const auto graphs = small_graphs(3);
  for (const auto& g : graphs) CHECK(graph_differential(graph_differential(g)).is_zero());
  Rng rng(43);
  for (int t = 0; t < 100; ++t) {
    GraphVector v;
    for (int k = 0; k < 3; ++k)
      v.add(graphs[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(graphs.size()) - 1))], rng.uniform(-3, 3));
    CHECK(graph_differential(graph_differential(v)).is_zero());
  }
}

TEST_CASE("differential raises the vertex count by one") {
  for (const auto& g : small_graphs(2)) {
    const GraphVector dg = graph_differential(g);
    for (const auto& [h, c] : dg.terms()) {
      CHECK(h.vertex_count() == g.vertex_count() + 1);
      CHECK(h.in_leg_count() == g.in_leg_count());
      CHECK(h.out_leg_count() == g.out_leg_count());
    }
  }
}

TEST_CASE("tree slice sizes match direct counts") {
  // Two-vertex trees with N leaves: the upper vertex takes s of them, 2 <= s <= N - 1.
  for (std::size_t n = 2; n <= 4; ++n) {
    std::size_t count = 0;
    for (std::size_t s = 2; s + 1 <= n + 1; ++s) count += binom(n + 1, s);
    CHECK(enumerate_basis(GraphFamily::Tree, n + 1, 1, 2).basis.size() == count);
  }
  // Binary trees with N labeled leaves: (2N - 3)!!.
  CHECK(enumerate_basis(GraphFamily::Tree, 3, 1, 2).basis.size() == 3);
  CHECK(enumerate_basis(GraphFamily::Tree, 4, 1, 3).basis.size() == 15);
  CHECK(enumerate_basis(GraphFamily::Tree, 5, 1, 4).basis.size() == 105);
}

TEST_CASE("tree cohomology is concentrated in the top degree with dimension n!") {
  const std::size_t expected[] = {1, 2, 6, 24};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto rows = cohomology_dims(GraphFamily::Tree, n);
    REQUIRE(rows.size() == n);
    long euler_chains = 0, euler_h = 0;
    for (const auto& r : rows) {
      CHECK(r.dim == (r.vertices == n ? expected[n - 1] : 0));
      const long s = r.vertices % 2 ? -1 : 1;
      euler_chains += s * static_cast<long>(r.dim_chains);
      euler_h += s * static_cast<long>(r.dim);
    }
    CHECK(euler_chains == euler_h);
  }
}

TEST_CASE("cyclic cohomology has dimension (n-1)! in the top degree") {
  const std::size_t expected[] = {1, 1, 2, 6};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto rows = cohomology_dims(GraphFamily::Cyclic, n);
    for (const auto& r : rows) CHECK(r.dim == (r.vertices == n ? expected[n - 1] : 0));
  }
}

TEST_CASE("polygon and line complexes") {
  for (const auto& r : cohomology_dims(GraphFamily::Polygon, 7)) CHECK(r.dim == (r.vertices % 2 ? 1u : 0u));
  for (const auto& r : cohomology_dims(GraphFamily::Line, 6)) CHECK(r.dim == 0);
}

TEST_CASE("family membership") {
  CHECK(in_family(cocycle_graph(Series::B, 3), GraphFamily::Tree));
  CHECK(in_family(cocycle_graph(Series::C, 3), GraphFamily::Cyclic));
  CHECK(in_family(cocycle_graph(Series::A, 2), GraphFamily::Polygon));
  CHECK_FALSE(in_family(cocycle_graph(Series::A, 2), GraphFamily::Tree));
  for (const auto& g : enumerate_basis(GraphFamily::Mixed, 2, 1, 3).basis) CHECK(in_family(g, GraphFamily::Mixed));
}

TEST_CASE("series graphs are cocycles") {
  for (int n = 1; n <= 3; ++n)
    for (Series s : {Series::A, Series::B, Series::C})
      CHECK(graph_differential(basis_cocycles(s, n)).is_zero());
}

TEST_CASE("vertex budget") {
  CHECK(vertex_budget() >= 1);
  CHECK_THROWS_AS(enumerate_basis(GraphFamily::All, 1, 1, vertex_budget() + 1), BudgetError);
}

TEST_CASE("corolla evaluates to the derivative tensor") {
  Rng rng(44);
  const VectorField q = random_homological_field(rng, 3);
  CHECK(evaluate_graph(parse_graph("1; edges: ; in: 1; out: 1"), q) == derivative_tensor(q, 1));
  CHECK(evaluate_graph(parse_graph("1; edges: ; in: 1,1; out: 1"), q) == derivative_tensor(q, 2));
}

TEST_CASE("series graphs evaluate to the coordinate representatives") {
  Rng rng(45);
  for (int t = 0; t < 5; ++t) {
    const VectorField q = random_homological_field(rng, 3);
    for (int n = 1; n <= 2; ++n) {
      CHECK(evaluate_graph(basis_cocycles(Series::B, n), q) == series_B(q, n));
      CHECK(evaluate_graph(basis_cocycles(Series::C, n), q) == series_C(q, n) * Rational(-1));
      CHECK(evaluate_graph(basis_cocycles(Series::A, n), q) == series_A(q, n) * Rational(-1));
    }
  }
}

TEST_CASE("evaluation intertwines the differential with the Lie derivative") {
  Rng rng(46);
  const auto graphs = small_graphs(2);
  for (int t = 0; t < 3; ++t) {
    const VectorField q = random_homological_field(rng, 3);
    CHECK(chain_property_failures(graphs, q).empty());
    for (std::size_t i = 0; i < graphs.size(); i += 7) CHECK(chain_property_holds(graphs[i], q));
  }
}

TEST_CASE("evaluation rejects non-homological fields") {
  VectorField q(3, 1);
  q.set_component(0, GP::generator(3, 1) * GP::generator(3, 2));
  q.set_component(1, GP::constant(3, 1));
  CHECK_THROWS_AS(evaluate_graph(parse_graph("1; edges: ; in: 1; out: 1"), q), ValidationError);
}

TEST_CASE("empty vector evaluates to the zero tensor of the given type") {
  Rng rng(47);
  const VectorField q = random_homological_field(rng, 2);
  const TensorField z = evaluate_graph(GraphVector(), q, 2, 1);
  CHECK(z.is_zero());
  CHECK(z.lower() == 2);
  CHECK(z.upper() == 1);
}
