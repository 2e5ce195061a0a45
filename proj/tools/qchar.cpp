#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qchar/bicomplex.hpp"
#include "qchar/cyclic_words.hpp"
#include "qchar/errors.hpp"
#include "qchar/graphs.hpp"
#include "qchar/linalg.hpp"
#include "qchar/qmanifolds.hpp"
#include "qchar/random.hpp"

using json = nlohmann::ordered_json;
using namespace qchar;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string format = "text";
  std::uint64_t seed = 0;
  int trials = 100;
  unsigned threads = 1;
};

// Text lines and JSON results built side by side.
struct Report {
  std::string command;
  std::vector<std::string> lines;
  json results = json::object();

  void line(const std::string& s) { lines.push_back(s); }
};

// Set when a command finds a contradiction it should report with exit 3.
bool g_consistency_failure = false;

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string read_input(const std::string& input) {
  if (is_builtin_algebra(input)) return builtin_algebra_text(input);
  std::ifstream in(input);
  if (!in) throw ValidationError("cannot read algebra file '" + input + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- graphs ----

void graphs_cohomology(Report& r, const Options& o, const std::string& family_text, int n, int max_vertices,
                       int max_length, int in_legs, int out_legs, bool certificates) {
  const GraphFamily family = parse_family(family_text);
  std::vector<CohomologyRow> rows;
  std::size_t rows_in = 0, rows_out = 0;
  switch (family) {
    case GraphFamily::Tree:
    case GraphFamily::Cyclic:
      if (n < 1) throw ValidationError("--n is required for the " + family_text + " family");
      rows = cohomology_dims(family, n, o.threads);
      rows_in = family == GraphFamily::Tree ? n + 1 : n;
      rows_out = family == GraphFamily::Tree ? 1 : 0;
      break;
    case GraphFamily::Polygon:
      rows = cohomology_dims(family, max_vertices > 0 ? max_vertices : 7, o.threads);
      break;
    case GraphFamily::Line:
      rows = cohomology_dims(family, max_length > 0 ? max_length : (max_vertices > 0 ? max_vertices : 6), o.threads);
      rows_in = rows_out = 1;
      break;
    default:
      if (in_legs < 0 || out_legs < 0 || max_vertices < 1)
        throw ValidationError("--in, --out and --max-vertices are required for the " + family_text + " family");
      rows = cohomology_table(family, in_legs, out_legs, max_vertices, o.threads);
      rows_in = in_legs;
      rows_out = out_legs;
  }
  r.results["family"] = family_name(family);
  r.results["in_legs"] = rows_in;
  r.results["out_legs"] = rows_out;
  r.line("family " + family_name(family) + ", in-legs " + std::to_string(rows_in) + ", out-legs " +
         std::to_string(rows_out));
  json table = json::array();
  for (const auto& row : rows) {
    r.line("m=" + std::to_string(row.vertices) + ": " + std::to_string(row.dim) + "  (chains " +
           std::to_string(row.dim_chains) + ")");
    table.push_back({{"m", row.vertices}, {"dim", row.dim}, {"chains", row.dim_chains}});
  }
  r.results["rows"] = table;
  if (!certificates) return;
  json certs = json::array();
  for (const auto& row : rows) {
    if (row.dim == 0) continue;
    DecoratedGraph g;
    const int k = static_cast<int>(row.vertices);
    if (family == GraphFamily::Polygon && k % 2 == 1)
      g = cocycle_graph(Series::A, (k + 1) / 2);
    else if (family == GraphFamily::Tree && k == n)
      g = cocycle_graph(Series::B, n);
    else if (family == GraphFamily::Cyclic && k == n)
      g = cocycle_graph(Series::C, n);
    else
      continue;
    const std::size_t raw_terms = vertex_splittings(g).size();
    const GraphVector dg = graph_differential(g);
    const std::string line = "certificate m=" + std::to_string(k) + ": " + g.to_string() + " | d: " +
                             std::to_string(raw_terms) + " splitting terms, sum " +
                             (dg.is_zero() ? "0" : "nonzero");
    r.line(line);
    if (!dg.is_zero()) {
      g_consistency_failure = true;
      r.line("  d = " + dg.to_string());
    }
    certs.push_back({{"m", k}, {"graph", g.to_string()}, {"splitting_terms", raw_terms}, {"closed", dg.is_zero()}});
  }
  r.results["certificates"] = certs;
}

void graphs_chain(Report& r, const Options& o, int max_vertices, int q) {
  if (max_vertices < 1 || max_vertices > 3) throw ValidationError("--max-vertices must be 1..3");
  if (q < 1 || q > 5) throw ValidationError("--q must be 1..5");
  std::vector<DecoratedGraph> graphs;
  for (int k = 1; k <= max_vertices; ++k)
    for (std::size_t in = 0; in <= 3; ++in)
      for (std::size_t out = 0; out <= 2; ++out)
        for (auto& g : enumerate_basis(GraphFamily::All, in, out, k).basis) graphs.push_back(g);
  Rng rng(o.seed);
  std::size_t failures = 0;
  std::string first;
  for (int t = 0; t < o.trials; ++t) {
    const VectorField field = random_homological_field(rng, q);
    const auto bad = chain_property_failures(graphs, field);
    if (!bad.empty() && failures == 0) first = bad.front().to_string();
    failures += bad.size();
  }
  r.line("graphs: " + std::to_string(graphs.size()) + ", fields: " + std::to_string(o.trials) + ", q = " +
         std::to_string(q));
  r.line("evaluate(d G) = L_Q evaluate(G): " + std::string(failures ? "FAILED" : "holds") + " (" +
         std::to_string(failures) + " failures)");
  if (failures) {
    r.line("first failure: " + first);
    g_consistency_failure = true;
  }
  r.results["graphs"] = graphs.size();
  r.results["fields"] = o.trials;
  r.results["q"] = q;
  r.results["failures"] = failures;
}

// ---- transgress ----

void transgress_cmd(Report& r, int n, int budget) {
  const Transgression t = transgress(n, budget);
  r.line("candidate: " + t.candidate.to_string() + ", alpha: " + to_string(t.alpha));
  r.line("alpha unique: " + yes_no(t.alpha_unique));
  r.results["n"] = n;
  r.results["candidate"] = t.candidate.to_string();
  r.results["alpha"] = to_string(t.alpha);
  r.results["alpha_unique"] = t.alpha_unique;
  // C(2n-1, n)
  Rational binom = 1;
  for (int i = 1; i <= n; ++i) binom = binom * Rational(n - 1 + i) / Rational(i);
  Rational two_n = 1;
  for (int i = 0; i < n; ++i) two_n *= 2;
  r.line("binomial C(2n-1,n): " + to_string(binom) + " (" + (binom == t.alpha ? "matches" : "differs from") +
         " alpha)");
  r.line("Str(R^n) coefficient implied for R = 2b: " + to_string(t.alpha / two_n) + " (stated " + to_string(binom) +
         ", factor 2^-" + std::to_string(n) + ")");
  r.results["binomial"] = to_string(binom);
  r.results["str_r_coefficient"] = to_string(t.alpha / two_n);
  if (n <= 4) {
    const CyclicPoly words = tabulated_A_words(n);
    const CyclicPoly dwords = d_cyclic(words);
    const bool cohomologous = is_cyclic_exact(t.candidate - words);
    r.line("tabulated A" + std::to_string(n) + " (R -> 2b): " + words.to_string());
    r.line("d(tabulated): " + dwords.to_string());
    r.line("cohomologous to candidate: " + yes_no(cohomologous));
    r.results["tabulated"] = words.to_string();
    r.results["d_tabulated"] = dwords.to_string();
    r.results["cohomologous"] = cohomologous;
    if (!cohomologous) g_consistency_failure = true;
  }
}

// ---- lie ----

bool nondegenerate_form(const TensorField& t) {
  if (t.lower() != 2 || t.upper() != 0) return false;
  std::vector<SparseVec> rows(t.q());
  std::vector<std::map<std::size_t, Rational>> dense(t.q());
  for (const auto& [index, value] : t.components()) {
    if (value.terms().size() != 1 || value.terms().begin()->first != 0) return false;
    dense[index[0]][index[1]] = value.terms().begin()->second;
  }
  for (std::size_t i = 0; i < t.q(); ++i) rows[i] = make_sparse(dense[i]);
  return rank(rows) == t.q();
}

void lie_verify(Report& r, const std::string& input) {
  const LieSuperAlgebraSpec spec = parse_algebra(read_input(input));
  const CEQManifold m = ce_field(spec);
  const OddDomain dom = spec.ghost_domain();
  std::string names;
  for (const auto& e : spec.basis) names += (names.empty() ? "" : ", ") + e.name;
  r.line("algebra: " + input + " (dim " + std::to_string(spec.dim()) + ": " + names + ")");
  r.line("graded antisymmetry: ok");
  r.line("graded Jacobi: ok");
  r.line("Q = " + m.q.to_string(dom));
  r.line("[Q,Q] = 0: yes");
  r.results["algebra"] = input;
  r.results["dim"] = spec.dim();
  r.results["jacobi"] = true;
  r.results["q"] = m.q.to_string(dom);
  r.results["homological"] = true;
}

void lie_classes(Report& r, const std::string& input, const std::string& series_list, int n) {
  const LieSuperAlgebraSpec spec = parse_algebra(read_input(input));
  const CEQManifold m = ce_field(spec);
  const OddDomain dom = spec.ghost_domain();
  json reports = json::array();
  std::stringstream ss(series_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "A" && item != "B" && item != "C") throw ValidationError("unknown series '" + item + "'");
    const Series s = item == "A" ? Series::A : item == "B" ? Series::B : Series::C;
    const ClassReport c = class_report(m, s, n);
    const std::string rep = c.representative.is_zero() ? "0" : c.representative.to_string(dom);
    const std::string exact = c.exact ? yes_no(*c.exact) : "undecided";
    const bool closed_form = c.representative == adjoint_closed_form(spec, s, n);
    r.line(item + std::to_string(n) + ": closed " + yes_no(c.closed) + ", exact " + exact + ", matches adjoint formula " +
           yes_no(closed_form));
    r.line("  representative: " + rep);
    json j = {{"series", item}, {"n", n}, {"closed", c.closed}, {"exact", exact},
              {"adjoint_formula", closed_form}, {"representative", rep}};
    if (c.representative.lower() == 2 && c.representative.upper() == 0 && !c.representative.is_zero()) {
      const bool nd = nondegenerate_form(c.representative);
      r.line("  nondegenerate: " + yes_no(nd));
      j["nondegenerate"] = nd;
    }
    if (!c.closed || !closed_form) g_consistency_failure = true;
    reports.push_back(j);
  }
  r.results["algebra"] = input;
  r.results["classes"] = reports;
}

void lie_modular(Report& r, const std::string& input) {
  const LieSuperAlgebraSpec spec = parse_algebra(read_input(input));
  const ClassReport c = modular_class(spec);
  const OddDomain dom = spec.ghost_domain();
  const bool trivial = c.exact.value_or(false);
  const std::string rep = c.representative.is_zero() ? "0" : c.representative.to_string(dom);
  r.line(std::string(trivial ? "trivial" : "nontrivial") + ", representative " + rep);
  if (trivial && !c.representative.is_zero() && c.primitive)
    r.line("primitive: " + c.primitive->to_string(dom));
  r.results["algebra"] = input;
  r.results["trivial"] = trivial;
  r.results["representative"] = rep;
}

void lie_jets(Report& r, const Options& o, int q_max, int order) {
  if (q_max < 1 || q_max > 5) throw ValidationError("--q must be 1..5");
  Rng rng(o.seed);
  std::size_t jet_fail = 0, gauss_fail = 0;
  for (int t = 0; t < o.trials; ++t) {
    const std::size_t q = 1 + t % q_max;
    const VectorField field = random_homological_field(rng, q);
    if (!jet_expansion(field, order).all_hold()) ++jet_fail;
    if (!gauss_chain_check(field, std::min(order, 2)).all_hold()) ++gauss_fail;
  }
  r.line("fields: " + std::to_string(o.trials) + ", q <= " + std::to_string(q_max));
  r.line("jet identities through order " + std::to_string(order) + ": " + std::to_string(jet_fail) + " failures");
  r.line("Gauss chain identities through order " + std::to_string(std::min(order, 2)) + ": " +
         std::to_string(gauss_fail) + " failures");
  r.results["fields"] = o.trials;
  r.results["jet_failures"] = jet_fail;
  r.results["gauss_failures"] = gauss_fail;
  if (jet_fail || gauss_fail) g_consistency_failure = true;
}

// ---- bicomplex ----

Convention convention(const std::string& tables, const std::string& f) {
  Convention c;
  if (tables == "tabulated")
    c.tables = tabulated_tables();
  else if (tables != "engine")
    throw ValidationError("--tables must be tabulated or engine");
  if (f == "tabulated")
    c.f = FRelations::Tabulated;
  else if (f != "derived")
    throw ValidationError("--f-relations must be tabulated or derived");
  return c;
}

void homotopy_lines(Report& r, const HomotopyReport& h) {
  json letters = json::array();
  for (const auto& l : h.letters) {
    r.line(l.lhs + " = " + render(l.computed) + (l.holds() ? "  [ok]" : "  [expected " + render(l.expected) + "]"));
    letters.push_back({{"lhs", l.lhs}, {"computed", render(l.computed)}, {"holds", l.holds()}});
  }
  json kernels = json::array();
  for (const auto& k : h.kernels) {
    r.line(k.name + ": " + (k.holds() ? "ok" : "FAILED: " + k.first_failure) + " (" + std::to_string(k.checked) +
           " checks)");
    kernels.push_back({{"name", k.name}, {"checked", k.checked}, {"failures", k.failures}});
  }
  r.results["homotopy"] = letters;
  r.results["kernels"] = kernels;
  if (!h.all_hold()) g_consistency_failure = true;
}

void bicomplex_check(Report& r, const Convention& c, int max_len) {
  if (max_len < 1 || max_len > 4) throw BudgetError("--max-len is limited to 4");
  json props = json::array();
  for (const auto& p : check_bicomplex(max_len, c)) {
    r.line(p.name + ": " + (p.holds() ? "ok" : "FAILED (" + std::to_string(p.failures) + "), first: " + p.first_failure) +
           " (" + std::to_string(p.checked) + " checks)");
    props.push_back({{"name", p.name}, {"checked", p.checked}, {"failures", p.failures}});
    if (!p.holds()) g_consistency_failure = true;
  }
  r.results["properties"] = props;
  homotopy_lines(r, homotopy_check(max_len, c));
}

void bicomplex_cohomology(Report& r, const Convention& c, int max_total) {
  json rows = json::array();
  for (const auto& row : small_degree_cohomology(max_total, c)) {
    r.line("(" + std::to_string(row.degree.p) + "," + std::to_string(row.degree.q) + "): chains " +
           std::to_string(row.dim_chains) + ", H_delta " + std::to_string(row.h_delta) + ", H_d " +
           std::to_string(row.h_d) + (row.matches() ? "" : "  [expected " + std::to_string(row.expected_delta) + ", " +
                                                            std::to_string(row.expected_d) + "]"));
    rows.push_back({{"p", row.degree.p}, {"q", row.degree.q}, {"chains", row.dim_chains},
                    {"h_delta", row.h_delta}, {"h_d", row.h_d}, {"matches", row.matches()}});
    if (!row.matches()) g_consistency_failure = true;
  }
  r.results["rows"] = rows;
}

void bicomplex_representatives(Report& r, const Convention& c, int upto) {
  if (upto < 1 || upto > 3) throw ValidationError("--upto must be 1..3");
  json out = json::array();
  for (int n = 1; n <= upto; ++n) {
    const RepresentativeReport rep = verify_exact_representatives(n, c);
    std::string computed, tabulated;
    json terms = json::array();
    for (const auto& t : rep.terms) {
      computed += (computed.empty() ? "" : ", ") + to_string(t.computed);
      tabulated += (tabulated.empty() ? "" : ", ") + to_string(t.tabulated);
      terms.push_back({{"side", t.delta_side ? "delta" : "d"}, {"term", render(t.key)},
                       {"tabulated", to_string(t.tabulated)}, {"computed", to_string(t.computed)}});
    }
    r.line("C" + std::to_string(n) + ": " + status_name(rep.status) + " (" + computed + ") tabulated (" + tabulated + ")" +
           (rep.unique ? "" : " free coefficients kept at tabulated values"));
    for (const auto& t : rep.terms)
      r.line(std::string("  ") + (t.delta_side ? "delta " : "d ") + render(t.key) + ": " + to_string(t.tabulated) +
             " -> " + to_string(t.computed));
    if (rep.status == RepresentativeReport::Status::Failed) g_consistency_failure = true;
    out.push_back({{"n", n}, {"status", status_name(rep.status)}, {"unique", rep.unique}, {"terms", terms},
                   {"tabulated_residual", rep.tabulated_residual.to_string()}});
  }
  r.results["identities"] = out;
}

void emit(const Report& r, const Options& o) {
  if (o.format == "json") {
    json j;
    j["command"] = r.command;
    j["version"] = kVersion;
    j["seed"] = o.seed;
    j["results"] = r.results;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "# qchar " << kVersion << ": " << r.command << " (seed " << o.seed << ")\n";
    for (const auto& l : r.lines) std::cout << l << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qchar: characteristic classes of Q-manifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", o.seed, "Seed for randomized commands");
  app.add_option("--trials", o.trials, "Trials for randomized commands")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string family, input, series = "A,B,C", tables = "engine", frel = "derived";
  int n = 0, max_vertices = 0, max_length = 0, in_legs = -1, out_legs = -1, budget = 7, order = 3;
  int chain_vertices = 3, chain_q = 4, jets_q = 5, trans_n = 0, classes_n = 1;
  int upto = 3, max_len = 4, max_total = 4;
  bool certificates = false;

  auto* graphs = app.add_subcommand("graphs", "Graph complexes");
  graphs->require_subcommand(1);
  auto* gcoh = graphs->add_subcommand("cohomology", "Cohomology dimension table");
  gcoh->add_option("--family", family, "tree, cyclic, polygon, line, all-connected, mixed, all")->required();
  gcoh->add_option("--n", n, "Index n (tree, cyclic)");
  gcoh->add_option("--max-vertices", max_vertices, "Largest vertex count");
  gcoh->add_option("--max-length", max_length, "Largest line length");
  gcoh->add_option("--in", in_legs, "Incoming legs (general families)");
  gcoh->add_option("--out", out_legs, "Outgoing legs (general families)");
  gcoh->add_flag("--certificates", certificates, "Print basis cocycles with their closedness");
  auto* gchain = graphs->add_subcommand("chain", "Randomized check of evaluate(dG) = L_Q evaluate(G)");
  gchain->add_option("--max-vertices", chain_vertices, "Largest vertex count (<= 3)")->default_val(3);
  gchain->add_option("--q", chain_q, "Odd dimension of the random fields")->default_val(4);

  auto* trans = app.add_subcommand("transgress", "Cyclic-word transgression");
  trans->add_option("--n", trans_n, "Series index")->required()->check(CLI::PositiveNumber);
  trans->add_option("--budget", budget, "Largest word degree")->check(CLI::PositiveNumber);

  auto* lie = app.add_subcommand("lie", "Lie superalgebras");
  lie->require_subcommand(1);
  auto* lverify = lie->add_subcommand("verify", "Jacobi identity and [Q,Q] = 0");
  auto* lclasses = lie->add_subcommand("classes", "A/B/C classes");
  auto* lmodular = lie->add_subcommand("modular", "Modular class");
  for (auto* sc : {lverify, lclasses, lmodular})
    sc->add_option("--input", input, "Built-in name or JSON file")->required();
  lclasses->add_option("--series", series, "Comma-separated subset of A,B,C");
  lclasses->add_option("--n", classes_n, "Series index")->default_val(1)->check(CLI::PositiveNumber);
  auto* ljets = lie->add_subcommand("jets", "Randomized jet and Gauss identities");
  ljets->add_option("--q", jets_q, "Largest odd dimension")->default_val(5);
  ljets->add_option("--order", order, "Jet order")->default_val(3);

  auto* bic = app.add_subcommand("bicomplex", "Bicomplex of traced covariants");
  bic->require_subcommand(1);
  bic->add_option("--tables", tables, "tabulated or engine")->check(CLI::IsMember({"tabulated", "engine"}));
  bic->add_option("--f-relations", frel, "tabulated or derived")->check(CLI::IsMember({"tabulated", "derived"}));
  auto* bcheck = bic->add_subcommand("check", "Nilpotency, anticommutation and homotopy tables");
  bcheck->add_option("--max-len", max_len, "Word length")->default_val(4);
  auto* bhom = bic->add_subcommand("homotopy", "Homotopy tables and kernels");
  bhom->add_option("--max-len", max_len, "Word length")->default_val(4);
  auto* bcoh = bic->add_subcommand("cohomology", "Small-degree cohomology");
  bcoh->add_option("--max-total", max_total, "Largest p + q")->default_val(4);
  auto* brep = bic->add_subcommand("representatives", "d-exact representatives");
  brep->add_option("--upto", upto, "Largest n")->default_val(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help exits 0; every malformed command line is an input validation error
    return app.exit(e) == 0 ? 0 : 1;
  }

  Report r;
  for (int i = 1; i < argc; ++i) r.command += (i > 1 ? " " : "") + std::string(argv[i]);
  try {
    if (gcoh->parsed())
      graphs_cohomology(r, o, family, n, max_vertices, max_length, in_legs, out_legs, certificates);
    else if (gchain->parsed())
      graphs_chain(r, o, chain_vertices, chain_q);
    else if (trans->parsed())
      transgress_cmd(r, trans_n, budget);
    else if (lverify->parsed())
      lie_verify(r, input);
    else if (lclasses->parsed())
      lie_classes(r, input, series, classes_n);
    else if (lmodular->parsed())
      lie_modular(r, input);
    else if (ljets->parsed())
      lie_jets(r, o, jets_q, order);
    else if (bcheck->parsed())
      bicomplex_check(r, convention(tables, frel), max_len);
    else if (bhom->parsed())
      homotopy_lines(r, homotopy_check(max_len, convention(tables, frel)));
    else if (bcoh->parsed())
      bicomplex_cohomology(r, convention(tables, frel), max_total);
    else if (brep->parsed())
      bicomplex_representatives(r, convention(tables, frel), upto);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 3;
  }
  emit(r, o);
  return g_consistency_failure ? 3 : 0;
}
