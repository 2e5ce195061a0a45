// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qchar/bicomplex.hpp"
#include "qchar/cyclic_words.hpp"
#include "qchar/errors.hpp"
#include "qchar/graphs.hpp"
#include "qchar/qmanifolds.hpp"
#include "qchar/random.hpp"

using namespace qchar;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void note(const std::string& s) { details.push_back(s); }
  void require(bool cond, const std::string& s) {
    if (!cond) pass = false;
    details.push_back((cond ? "ok    " : "FAIL  ") + s);
  }
};

std::string str(std::size_t v) { return std::to_string(v); }

// 1. Dimension table of the tree and cyclic complexes.
Outcome tree_cyclic_table() {
  Outcome o;
  auto check = [&](GraphFamily f, std::size_t n) {
    const auto rows = cohomology_dims(f, n);
    const std::size_t expected_top = factorial(static_cast<unsigned>(n - 1)).get_num().get_ui();
    std::string line = family_name(f) + " n=" + str(n) + ":";
    bool ok = true;
    for (const auto& r : rows) {
      const std::size_t want = r.vertices == n ? expected_top : 0;
      line += " m" + str(r.vertices) + "=" + str(r.dim);
      if (r.dim != want) {
        ok = false;
        line += "(expected " + str(want) + ")";
      }
    }
    o.require(ok, line);
  };
  for (std::size_t n = 2; n <= 4; ++n) check(GraphFamily::Tree, n);
  for (std::size_t n = 1; n <= 4; ++n) check(GraphFamily::Cyclic, n);
  o.note("tree rows equal n! (dimension of Lie(n+1)); see README");
  return o;
}

// 2. Polygon and line complexes.
Outcome polygon_line() {
  Outcome o;
  const auto poly = cohomology_dims(GraphFamily::Polygon, 7);
  std::string line = "polygon:";
  bool ok = poly.size() == 7;
  for (const auto& r : poly) {
    line += " " + str(r.dim);
    ok = ok && r.dim == (r.vertices % 2 == 1 ? 1u : 0u);
  }
  o.require(ok, line);
  const auto lines = cohomology_dims(GraphFamily::Line, 6);
  line = "line:";
  ok = lines.size() == 6;
  for (const auto& r : lines) {
    line += " " + str(r.dim);
    ok = ok && r.dim == 0;
  }
  o.require(ok, line);
  return o;
}

// 3. d^2 = 0 on slices and random vectors.
Outcome differential_squares() {
  Outcome o;
  std::vector<ComplexSlice> slices;
  std::size_t graphs = 0, failures = 0;
  for (std::size_t in = 0; in <= 3; ++in)
    for (std::size_t out = 0; out <= 2; ++out)
      for (std::size_t v = 1; v <= 4; ++v) {
        ComplexSlice s = enumerate_basis(GraphFamily::All, in, out, v);
        if (s.basis.empty()) continue;
        for (const auto& g : s.basis) {
          ++graphs;
          if (!graph_differential(graph_differential(g)).is_zero()) ++failures;
        }
        slices.push_back(std::move(s));
      }
  o.require(failures == 0, "basis graphs with <= 4 vertices: " + str(graphs) + " checked, " + str(failures) +
                               " failures");
  Rng rng(2024);
  failures = 0;
  for (int t = 0; t < 500; ++t) {
    const ComplexSlice& s = slices[rng.uniform(0, static_cast<long>(slices.size()) - 1)];
    GraphVector v;
    const long terms = rng.uniform(1, 4);
    for (long k = 0; k < terms; ++k)
      v.add(s.basis[rng.uniform(0, static_cast<long>(s.basis.size()) - 1)], Rational(rng.uniform(-5, 5), rng.uniform(1, 3)));
    if (!graph_differential(graph_differential(v)).is_zero()) ++failures;
  }
  o.require(failures == 0, "random graph vectors: 500 checked, " + str(failures) + " failures");
  return o;
}

// 4. evaluate(dG) = L_Q evaluate(G).
Outcome chain_property() {
  Outcome o;
  std::vector<DecoratedGraph> graphs;
  for (std::size_t in = 0; in <= 3; ++in)
    for (std::size_t out = 0; out <= 2; ++out)
      for (std::size_t v = 1; v <= 3; ++v) {
        const ComplexSlice s = enumerate_basis(GraphFamily::All, in, out, v);
        graphs.insert(graphs.end(), s.basis.begin(), s.basis.end());
      }
  Rng rng(4);
  std::size_t failures = 0;
  for (int t = 0; t < 20; ++t) {
    const VectorField q = random_homological_field(rng, 4);
    failures += chain_property_failures(graphs, q).size();
  }
  o.require(failures == 0, str(graphs.size()) + " graphs x 20 fields on R^{0|4}: " + str(failures) + " failures");
  return o;
}

// 5. Transgression in the cyclic word space.
Outcome transgression() {
  Outcome o;
  // Hand expansion: d(aaa) = 3 aab and d(ab) = bb - aab after cyclic reduction,
  // so d(aaa + 3 ab) = 3 bb.
  const CyclicPoly hand_d_aaa = CyclicPoly::word("aab", 3);
  const CyclicPoly hand_d_ab = CyclicPoly::word("bb") - CyclicPoly::word("aab");
  o.require(d_cyclic(CyclicPoly::word("aaa")) == hand_d_aaa && d_cyclic(CyclicPoly::word("ab")) == hand_d_ab,
            "hand expansions of d(aaa), d(ab)");
  for (int n = 1; n <= 4; ++n) {
    const Transgression t = transgress(n);
    CyclicPoly bn;
    bn.add(std::string(static_cast<std::size_t>(n), 'b'), t.alpha);
    const bool solves = d_cyclic(t.candidate) == bn;
    const bool cohom = is_cyclic_exact(t.candidate - tabulated_A_words(n));
    const Rational stated = binomial(static_cast<unsigned>(2 * n - 1), static_cast<unsigned>(n));
    Rational two_n = 1;
    for (int k = 0; k < n; ++k) two_n *= 2;
    o.require(t.alpha != 0 && solves && t.alpha_unique && cohom,
              "n=" + std::to_string(n) + ": alpha=" + to_string(t.alpha) + ", candidate " + t.candidate.to_string() +
                  ", cohomologous to tabulated word: " + (cohom ? "yes" : "no"));
    o.note("      stated C(2n-1,n)=" + to_string(stated) + (t.alpha == stated ? " (matches alpha)" : " (differs)") +
           "; as a multiple of Str(R^n) with R=2b: " + to_string(t.alpha / two_n) +
           (t.alpha / two_n != stated ? "  [discrepancy: factor 2^-" + std::to_string(n) + "]" : ""));
  }
  const Transgression t2 = transgress(2);
  o.require(t2.alpha == 3, "alpha_2 = 3 (hand oracle)");
  return o;
}

// 6. Acyclicity of the cyclic word space.
Outcome acyclicity() {
  Outcome o;
  std::string line = "dim H in degrees 1..7:";
  bool ok = true;
  for (const auto& row : cyclic_cohomology(7)) {
    line += " " + str(row.dim);
    ok = ok && row.dim == 0;
  }
  o.require(ok, line);
  return o;
}

// 7. Bicomplex of traced words.
Outcome bicomplex() {
  Outcome o;
  for (const auto& p : check_bicomplex(4))
    o.require(p.holds(), p.name + ": " + str(p.checked) + " checked" +
                             (p.holds() ? "" : ", first failure " + p.first_failure));
  const HomotopyReport h = homotopy_check(4);
  std::size_t letter_fail = 0;
  for (const auto& l : h.letters)
    if (!l.holds()) ++letter_fail;
  o.require(letter_fail == 0, "homotopy table: " + str(h.letters.size()) + " letter identities, " + str(letter_fail) +
                                  " failures");
  for (const auto& k : h.kernels) o.require(k.holds(), k.name + ": " + str(k.checked) + " checked");
  std::size_t rows = 0, bad = 0;
  for (const auto& r : small_degree_cohomology(4)) {
    ++rows;
    if (!r.matches()) {
      ++bad;
      o.note("      mismatch at (" + std::to_string(r.degree.p) + "," + std::to_string(r.degree.q) + ")");
    }
  }
  o.require(bad == 0, "small-degree cohomology: " + str(rows) + " bidegrees, " + str(bad) + " mismatches");
  for (int n = 1; n <= 3; ++n) {
    const RepresentativeReport r = verify_exact_representatives(n);
    o.require(r.status != RepresentativeReport::Status::Failed,
              "C" + std::to_string(n) + " representative: " + status_name(r.status) +
                  (r.unique ? " (unique)" : " (free coefficients at tabulated values)"));
    std::string side;
    for (const auto& term : r.terms)
      o.note(std::string("      ") + (term.delta_side ? "delta " : "d     ") + render(term.key) +
             ": computed " + to_string(term.computed) + ", tabulated " + to_string(term.tabulated));
  }
  return o;
}

// 8. Chevalley-Eilenberg examples.
Outcome lie_suite() {
  Outcome o;
  const LieSuperAlgebraSpec sl2 = builtin_algebra("sl2");
  const CEQManifold m = ce_field(sl2);
  o.require(!jacobi_violation(sl2).has_value() && is_homological(m.q), "sl2: Jacobi and Q^2 = 0");
  o.require(series_A(m.q, 1).is_zero(), "A1(sl2) = 0");
  // Trace oracle: ad(e0) = diag(-1, 0, 1) on (e_-1, e0, e1), so tr(ad e0 ad e0) = 2.
  const std::vector<std::vector<int>> ad_e0 = {{-1, 0, 0}, {0, 0, 0}, {0, 0, 1}};
  int trace = 0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) trace += ad_e0[i][k] * ad_e0[k][i];
  const std::size_t e0 = sl2.index_of("e0");
  const TensorField c2 = series_C(m.q, 2);
  const GP value = c2.component({static_cast<std::uint8_t>(e0), static_cast<std::uint8_t>(e0)});
  const GP oracle = GP::constant(3, trace);
  o.require(value == oracle, "C2(e0,e0) = " + value.to_string() + ", oracle tr(ad e0 ad e0) = " + std::to_string(trace));
  const ClassReport c2r = class_report(m, Series::C, 2);
  o.require(c2r.closed && c2r.exact == false, "C2(sl2) closed and not exact");

  const LieSuperAlgebraSpec borel = builtin_algebra("borel2");
  const ClassReport mb = modular_class(borel);
  const GP c0 = GP::generator(2, borel.index_of("e0"));
  const GP rep = mb.representative.component({});
  o.require((rep == c0 || rep == -c0) && mb.exact == false,
            "borel2 modular class " + rep.to_string(borel.ghost_domain()) + ", non-exact by exhaustive solve");
  const ClassReport mh = modular_class(builtin_algebra("heisenberg3"));
  o.require(mh.representative.is_zero() || mh.exact == true, "heisenberg3 modular class trivial");
  return o;
}

// 9. Jet and Gauss identities.
Outcome jets() {
  Outcome o;
  Rng rng(9);
  std::size_t jet_fail = 0, gauss_fail = 0;
  for (int t = 0; t < 50; ++t) {
    const VectorField q = random_homological_field(rng, static_cast<std::size_t>(1 + t % 5));
    if (!jet_expansion(q, 3).all_hold()) ++jet_fail;
    if (!gauss_chain_check(q, 2).all_hold()) ++gauss_fail;
  }
  o.require(jet_fail == 0, "jet identities m <= 3 on 50 fields: " + str(jet_fail) + " failures");
  o.require(gauss_fail == 0, "Gauss chain identities r <= 2 on 50 fields: " + str(gauss_fail) + " failures");
  return o;
}

// 10. Change of chart changes each representative by an L_Q-exact term.
Outcome chart_independence() {
  Outcome o;
  Rng rng(10);
  std::size_t checked = 0, failures = 0;
  for (int t = 0; t < 10; ++t) {
    const VectorField q = random_homological_field(rng, 4);
    const CoordinateChange change = random_coordinate_change(rng, 4, true);
    const VectorField q_new = push_forward(q, change);
    for (Series s : {Series::A, Series::B, Series::C})
      for (int n = 1; n <= 2; ++n) {
        const TensorField diff = pull_back(series_rep(s, q_new, n), change) - series_rep(s, q, n);
        const ExactnessResult r = is_exact(q, diff);
        const bool certified = r.exact && r.primitive && lie_derivative(q, *r.primitive) == diff;
        ++checked;
        if (!certified) {
          ++failures;
          o.note(std::string("      trial ") + std::to_string(t) + " " + series_letter(s) + std::to_string(n) +
                 ": no primitive");
        }
      }
  }
  o.require(failures == 0, str(checked) + " differences (A,B,C for n = 1,2, 10 changes): " + str(failures) +
                               " without a certified primitive");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 tree and cyclic dimension table", tree_cyclic_table},
      {"2 polygon and line complexes", polygon_line},
      {"3 graph differential squares to zero", differential_squares},
      {"4 chain property of graph evaluation", chain_property},
      {"5 transgression in cyclic words", transgression},
      {"6 cyclic word space acyclic", acyclicity},
      {"7 bicomplex of traced words", bicomplex},
      {"8 Lie algebra suite", lie_suite},
      {"9 jet and Gauss identities", jets},
      {"10 chart independence", chart_independence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::printf("%s criterion %s (%s)\n", o.pass ? "PASS" : "FAIL", c.name, timing);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
