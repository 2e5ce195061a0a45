#include "qchar/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

#include "qchar/errors.hpp"
#include "qchar/linalg.hpp"

namespace qchar {

namespace {

int permutation_parity_sign(const std::vector<int>& perm) {
  int s = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s = -s;
  return s;
}

// Dense ranks of signatures in sorted order.
std::vector<int> rank_signatures(const std::vector<std::vector<long>>& sig) {
  std::vector<std::vector<long>> sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(sig.size());
  for (std::size_t v = 0; v < sig.size(); ++v)
    out[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
  return out;
}

int cell_count(const std::vector<int>& colors) {
  return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
}

std::vector<int> refine(const DecoratedGraph& g, std::vector<int> colors) {
  const std::size_t k = g.vertex_count();
  std::vector<std::vector<int>> sources(k);
  for (std::size_t u = 0; u < k; ++u)
    if (g.out[u] >= 0) sources[g.out[u]].push_back(static_cast<int>(u));
  while (true) {
    std::vector<std::vector<long>> sig(k);
    for (std::size_t v = 0; v < k; ++v) {
      sig[v].push_back(colors[v]);
      sig[v].push_back(g.out[v] >= 0 ? colors[g.out[v]] : g.out[v]);
      std::vector<long> in;
      for (int u : sources[v]) in.push_back(colors[u]);
      std::sort(in.begin(), in.end());
      sig[v].insert(sig[v].end(), in.begin(), in.end());
    }
    std::vector<int> next = rank_signatures(sig);
    if (cell_count(next) == cell_count(colors)) return next;
    colors = std::move(next);
  }
}

struct CanonSearch {
  const DecoratedGraph& g;
  bool found = false;
  DecoratedGraph best;
  int best_sign = 1;
  bool odd_automorphism = false;

  void run(const std::vector<int>& colors) {
    std::vector<int> c = refine(g, colors);
    const std::size_t k = c.size();
    if (static_cast<std::size_t>(cell_count(c)) == k) {
      DecoratedGraph cand = relabel(g, c);
      int s = permutation_parity_sign(c);
      if (!found || cand < best) {
        found = true;
        best = std::move(cand);
        best_sign = s;
        odd_automorphism = false;
      } else if (cand == best && s != best_sign) {
        odd_automorphism = true;
      }
      return;
    }
    // First non-singleton cell.
    std::vector<int> size(k, 0);
    for (int x : c) ++size[x];
    int target = 0;
    while (size[target] < 2) ++target;
    for (std::size_t v = 0; v < k; ++v) {
      if (c[v] != target) continue;
      std::vector<std::vector<long>> sig(k);
      for (std::size_t w = 0; w < k; ++w) sig[w] = {2L * c[w] + (w == v ? 0 : 1)};
      run(rank_signatures(sig));
    }
  }
};

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError("invalid graph: " + what);
}

}  // namespace

std::size_t DecoratedGraph::out_leg_count() const {
  return static_cast<std::size_t>(std::count_if(out.begin(), out.end(), [](int t) { return t < 0; }));
}

std::vector<int> DecoratedGraph::indegrees() const {
  std::vector<int> d(out.size(), 0);
  for (int t : out)
    if (t >= 0) ++d[t];
  for (int v : in_legs) ++d[v];
  return d;
}

std::vector<int> DecoratedGraph::incoming(int v) const {
  std::vector<int> inc;
  for (std::size_t l = 0; l < in_legs.size(); ++l)
    if (in_legs[l] == v) inc.push_back(-static_cast<int>(l) - 1);
  for (std::size_t u = 0; u < out.size(); ++u)
    if (out[u] == v) inc.push_back(static_cast<int>(u));
  return inc;
}

bool DecoratedGraph::connected() const {
  const std::size_t k = out.size();
  if (k == 0) return true;
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t u = 0; u < k; ++u)
    if (out[u] >= 0) parent[find(static_cast<int>(u))] = find(out[u]);
  for (std::size_t u = 1; u < k; ++u)
    if (find(static_cast<int>(u)) != find(0)) return false;
  return true;
}

void DecoratedGraph::validate() const {
  const int k = static_cast<int>(out.size());
  require(k > 0, "no vertices");
  std::vector<int> leg_used;
  for (int t : out) {
    require(t < k, "edge target out of range");
    if (t < 0) leg_used.push_back(-t - 1);
  }
  std::sort(leg_used.begin(), leg_used.end());
  for (std::size_t l = 0; l < leg_used.size(); ++l) require(leg_used[l] == static_cast<int>(l), "out-legs not 1..m");
  for (int v : in_legs) require(v >= 0 && v < k, "in-leg vertex out of range");
  for (int d : indegrees()) require(d >= 1, "vertex without incoming incidence");
}

std::string DecoratedGraph::to_string() const {
  std::ostringstream os;
  os << out.size() << "; edges: ";
  bool first = true;
  for (std::size_t u = 0; u < out.size(); ++u)
    if (out[u] >= 0) {
      os << (first ? "" : ",") << u + 1 << "->" << out[u] + 1;
      first = false;
    }
  os << "; in: ";
  for (std::size_t l = 0; l < in_legs.size(); ++l) os << (l ? "," : "") << in_legs[l] + 1;
  os << "; out: ";
  std::vector<int> outs(out_leg_count());
  for (std::size_t u = 0; u < out.size(); ++u)
    if (out[u] < 0) outs[-out[u] - 1] = static_cast<int>(u);
  for (std::size_t l = 0; l < outs.size(); ++l) os << (l ? "," : "") << outs[l] + 1;
  return os.str();
}

DecoratedGraph parse_graph(const std::string& text) {
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto numbers = [&](const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) out.push_back(std::stoi(trim(item)) - 1);
    return out;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) parts.push_back(trim(part));
  DecoratedGraph g;
  try {
    require(parts.size() == 4, "expected 'k; edges: ...; in: ...; out: ...'");
    const int k = std::stoi(parts[0]);
    require(k > 0, "vertex count");
    require(parts[1].rfind("edges:", 0) == 0 && parts[2].rfind("in:", 0) == 0 && parts[3].rfind("out:", 0) == 0,
            "section names");
    g.out.assign(k, -1000000);
    std::stringstream es(parts[1].substr(6));
    std::string e;
    while (std::getline(es, e, ',')) {
      e = trim(e);
      if (e.empty()) continue;
      auto arrow = e.find("->");
      require(arrow != std::string::npos, "edge syntax");
      int s = std::stoi(e.substr(0, arrow)) - 1, t = std::stoi(e.substr(arrow + 2)) - 1;
      require(s >= 0 && s < k && t >= 0 && t < k && g.out[s] == -1000000, "edge endpoints");
      g.out[s] = t;
    }
    g.in_legs = numbers(parts[2].substr(3));
    auto outs = numbers(parts[3].substr(4));
    for (std::size_t l = 0; l < outs.size(); ++l) {
      require(outs[l] >= 0 && outs[l] < k && g.out[outs[l]] == -1000000, "out-leg vertex");
      g.out[outs[l]] = -static_cast<int>(l) - 1;
    }
    for (int t : g.out) require(t != -1000000, "vertex without outgoing incidence");
  } catch (const std::logic_error&) {
    throw ValidationError("invalid graph text: " + text);
  }
  g.validate();
  return g;
}

DecoratedGraph relabel(const DecoratedGraph& g, const std::vector<int>& perm) {
  DecoratedGraph r;
  r.out.assign(g.out.size(), 0);
  for (std::size_t v = 0; v < g.out.size(); ++v) r.out[perm[v]] = g.out[v] >= 0 ? perm[g.out[v]] : g.out[v];
  r.in_legs.resize(g.in_legs.size());
  for (std::size_t l = 0; l < g.in_legs.size(); ++l) r.in_legs[l] = perm[g.in_legs[l]];
  return r;
}

CanonicalGraph canonicalize(const DecoratedGraph& g) {
  g.validate();
  const std::size_t k = g.vertex_count();
  std::vector<std::vector<int>> legs_at(k);
  for (std::size_t l = 0; l < g.in_legs.size(); ++l) legs_at[g.in_legs[l]].push_back(static_cast<int>(l));
  auto deg = g.indegrees();
  std::vector<std::vector<long>> sig(k);
  for (std::size_t v = 0; v < k; ++v) {
    sig[v] = {g.out[v] < 0 ? g.out[v] : 0, g.out[v] == static_cast<int>(v) ? 1 : 0, deg[v]};
    sig[v].insert(sig[v].end(), legs_at[v].begin(), legs_at[v].end());
  }
  CanonSearch search{g, false, {}, 1, false};
  search.run(rank_signatures(sig));
  return {search.best, search.odd_automorphism ? 0 : search.best_sign};
}

GraphVector::GraphVector(const DecoratedGraph& g, const Rational& coef) { add(g, coef); }

void GraphVector::add(const DecoratedGraph& g, const Rational& coef) {
  if (coef == 0) return;
  auto c = canonicalize(g);
  if (c.sign == 0) return;
  auto [it, fresh] = terms_.try_emplace(c.graph, c.sign * coef);
  if (!fresh) {
    it->second += c.sign * coef;
    if (it->second == 0) terms_.erase(it);
  }
}

GraphVector& GraphVector::operator+=(const GraphVector& other) {
  for (const auto& [g, c] : other.terms_) {
    auto [it, fresh] = terms_.try_emplace(g, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

GraphVector& GraphVector::operator*=(const Rational& s) {
  if (s == 0) terms_.clear();
  for (auto& [g, c] : terms_) c *= s;
  return *this;
}

std::string GraphVector::to_string() const {
  std::ostringstream os;
  for (const auto& [g, c] : terms_) os << qchar::to_string(c) << " | " << g.to_string() << "\n";
  return os.str();
}

std::vector<VertexSplitting> vertex_splittings(const DecoratedGraph& g) {
  std::vector<VertexSplitting> out;
  const int k = static_cast<int>(g.vertex_count());
  for (int v = 0; v < k; ++v) {
    const std::vector<int> inc = g.incoming(v);
    const std::size_t r = inc.size();
    auto shift = [v](int u) { return u < v ? u : u + 1; };
    // mask bit set: incidence goes to the upstream vertex v+1, otherwise to v.
    auto build = [&](unsigned mask, bool bivalent) {
      DecoratedGraph h;
      h.out.assign(k + 1, 0);
      h.in_legs.resize(g.in_legs.size());
      auto target_of = [&](std::size_t pos) {
        if (bivalent) return v;
        return (mask >> pos & 1u) ? v + 1 : v;
      };
      for (int u = 0; u < k; ++u) {
        if (u == v) continue;
        int t = g.out[u];
        if (t < 0 || t != v) {
          h.out[shift(u)] = t < 0 ? t : shift(t);
        }
      }
      // Incidences of v: legs and edge sources.
      for (std::size_t pos = 0; pos < r; ++pos) {
        int x = inc[pos];
        int dest = target_of(pos);
        if (x < 0) {
          h.in_legs[-x - 1] = dest;
        } else if (x == v) {
          // Loop: its source is whichever new vertex carries v's old output.
          h.out[bivalent ? v + 1 : v] = dest;
        } else {
          h.out[shift(x)] = dest;
        }
      }
      for (std::size_t l = 0; l < g.in_legs.size(); ++l)
        if (g.in_legs[l] != v) h.in_legs[l] = shift(g.in_legs[l]);
      const int old_out = g.out[v];
      if (bivalent) {
        h.out[v] = v + 1;
        if (old_out != v) h.out[v + 1] = old_out < 0 ? old_out : shift(old_out);
      } else {
        h.out[v + 1] = v;
        if (old_out != v) h.out[v] = old_out < 0 ? old_out : shift(old_out);
      }
      return h;
    };
    if (r == 1) {
      out.push_back({build(0, true), v, 1, 0});
      continue;
    }
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
      const std::size_t up = static_cast<std::size_t>(std::popcount(mask));
      if (up < 2 || up == r) continue;
      out.push_back({build(mask, false), v, r - up, up});
    }
  }
  return out;
}

namespace {

// (-1)^v on vertex v; a split with |J| inputs carries a further (-1)^{|J|}.
// Fixed by matching L_Q of evaluated graphs.
Rational splitting_coefficient(const VertexSplitting& s) {
  int e = s.vertex;
  if (s.upstream_inputs > 0) e += static_cast<int>(s.downstream_inputs + s.upstream_inputs);
  return e % 2 ? -1 : 1;
}

}  // namespace

GraphVector graph_differential(const DecoratedGraph& g) {
  GraphVector out;
  for (const auto& s : vertex_splittings(g)) out.add(s.graph, splitting_coefficient(s));
  return out;
}

GraphVector graph_differential(const GraphVector& v) {
  GraphVector out;
  for (const auto& [g, c] : v.terms()) out += graph_differential(g) * c;
  return out;
}

GraphFamily parse_family(const std::string& name) {
  if (name == "tree") return GraphFamily::Tree;
  if (name == "cyclic") return GraphFamily::Cyclic;
  if (name == "polygon") return GraphFamily::Polygon;
  if (name == "line") return GraphFamily::Line;
  if (name == "connected" || name == "all-connected") return GraphFamily::Connected;
  if (name == "mixed") return GraphFamily::Mixed;
  if (name == "all") return GraphFamily::All;
  throw ValidationError("unknown graph family '" + name + "'");
}

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Tree: return "tree";
    case GraphFamily::Cyclic: return "cyclic";
    case GraphFamily::Polygon: return "polygon";
    case GraphFamily::Line: return "line";
    case GraphFamily::Connected: return "all-connected";
    case GraphFamily::Mixed: return "mixed";
    case GraphFamily::All: return "all";
  }
  return "";
}

bool in_family(const DecoratedGraph& g, GraphFamily f) {
  auto deg = g.indegrees();
  const bool all_high = std::all_of(deg.begin(), deg.end(), [](int d) { return d >= 2; });
  const bool all_bivalent = std::all_of(deg.begin(), deg.end(), [](int d) { return d == 1; });
  switch (f) {
    case GraphFamily::Tree: return g.out_leg_count() == 1 && all_high && g.connected();
    case GraphFamily::Cyclic: return g.out_leg_count() == 0 && all_high && g.connected();
    case GraphFamily::Polygon: return g.in_leg_count() == 0 && g.out_leg_count() == 0 && all_bivalent && g.connected();
    case GraphFamily::Line: return g.in_leg_count() == 1 && g.out_leg_count() == 1 && all_bivalent && g.connected();
    case GraphFamily::Connected: return g.connected();
    case GraphFamily::Mixed:
      return g.connected() && std::any_of(deg.begin(), deg.end(), [](int d) { return d == 1; }) &&
             std::any_of(deg.begin(), deg.end(), [](int d) { return d >= 2; });
    case GraphFamily::All: return true;
  }
  return false;
}

std::size_t vertex_budget() {
  if (const char* env = std::getenv("QCHAR_BUDGET_VERTICES")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) throw ValidationError("QCHAR_BUDGET_VERTICES must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return 8;
}

ComplexSlice enumerate_basis(GraphFamily family, std::size_t in_legs, std::size_t out_legs, std::size_t vertices) {
  if (vertices > vertex_budget())
    throw BudgetError("slice with " + std::to_string(vertices) + " vertices exceeds the vertex budget of " +
                      std::to_string(vertex_budget()) + " (set QCHAR_BUDGET_VERTICES)");
  switch (family) {
    case GraphFamily::Tree:
      if (out_legs != 1) throw ValidationError("tree graphs have one out-leg");
      break;
    case GraphFamily::Cyclic:
      if (out_legs != 0) throw ValidationError("cyclic graphs have no out-legs");
      break;
    case GraphFamily::Polygon:
      if (in_legs != 0 || out_legs != 0) throw ValidationError("polygon graphs have no legs");
      break;
    case GraphFamily::Line:
      if (in_legs != 1 || out_legs != 1) throw ValidationError("line graphs have one leg of each kind");
      break;
    default: break;
  }
  ComplexSlice slice{family, in_legs, out_legs, vertices, {}};
  const int k = static_cast<int>(vertices);
  if (k == 0 || out_legs > vertices) return slice;
  const bool high = family == GraphFamily::Tree || family == GraphFamily::Cyclic;
  const bool bivalent = family == GraphFamily::Polygon || family == GraphFamily::Line;
  const int dmin = high ? 2 : 1;
  const int dmax = bivalent ? 1 : 1 << 20;
  const long incidences = static_cast<long>(in_legs) + k - static_cast<long>(out_legs);
  if (incidences < static_cast<long>(dmin) * k || incidences > static_cast<long>(dmax) * k) return slice;

  std::set<DecoratedGraph> found;
  DecoratedGraph g;
  g.out.assign(k, 0);
  g.in_legs.assign(in_legs, 0);
  std::vector<int> deg(k, 0);
  std::vector<bool> leg_used(out_legs, false);

  auto deficit = [&]() {
    long d = 0;
    for (int x : deg) d += std::max(0, dmin - x);
    return d;
  };
  std::function<void(std::size_t)> place_legs = [&](std::size_t l) {
    if (static_cast<long>(in_legs - l) < deficit()) return;
    if (l == in_legs) {
      if (!in_family(g, family)) return;
      auto c = canonicalize(g);
      if (c.sign != 0) found.insert(c.graph);
      return;
    }
    for (int v = 0; v < k; ++v) {
      if (deg[v] >= dmax) continue;
      g.in_legs[l] = v;
      ++deg[v];
      place_legs(l + 1);
      --deg[v];
    }
  };
  std::function<void(int, std::size_t)> place_out = [&](int u, std::size_t legs_left) {
    if (static_cast<std::size_t>(k - u) < legs_left) return;
    if (u == k) {
      place_legs(0);
      return;
    }
    for (std::size_t l = 0; l < out_legs; ++l) {
      if (leg_used[l]) continue;
      leg_used[l] = true;
      g.out[u] = -static_cast<int>(l) - 1;
      place_out(u + 1, legs_left - 1);
      leg_used[l] = false;
    }
    for (int t = 0; t < k; ++t) {
      if (deg[t] >= dmax) continue;
      g.out[u] = t;
      ++deg[t];
      place_out(u + 1, legs_left);
      --deg[t];
    }
  };
  place_out(0, out_legs);
  slice.basis.assign(found.begin(), found.end());
  return slice;
}

std::size_t differential_rank(const ComplexSlice& from, const ComplexSlice& to) {
  std::map<DecoratedGraph, std::size_t> index;
  for (std::size_t i = 0; i < to.basis.size(); ++i) index[to.basis[i]] = i;
  EchelonBasis echelon;
  for (const auto& g : from.basis) {
    std::map<std::size_t, Rational> row;
    const GraphVector dg = graph_differential(g);
    for (const auto& [h, c] : dg.terms()) {
      auto it = index.find(h);
      if (it == index.end())
        throw ConsistencyError("differential leaves the " + family_name(from.family) + " family: " + h.to_string());
      row[it->second] = c;
    }
    echelon.insert(make_sparse(row));
  }
  return echelon.rank();
}

std::vector<CohomologyRow> cohomology_table(GraphFamily family, std::size_t in_legs, std::size_t out_legs,
                                            std::size_t max_vertices, unsigned threads) {
  if (max_vertices + 1 > vertex_budget())
    throw BudgetError("cohomology through " + std::to_string(max_vertices) + " vertices needs slices with " +
                      std::to_string(max_vertices + 1) + " vertices; budget is " + std::to_string(vertex_budget()) +
                      " (set QCHAR_BUDGET_VERTICES)");
  std::vector<ComplexSlice> slices(max_vertices + 2);
  std::vector<std::size_t> ranks(max_vertices + 2, 0);
  auto build = [&](std::size_t k) { slices[k] = enumerate_basis(family, in_legs, out_legs, k); };
  auto rank_at = [&](std::size_t k) { ranks[k] = differential_rank(slices[k], slices[k + 1]); };
  auto run = [&](std::size_t lo, std::size_t hi, auto&& fn) {
    if (threads <= 1) {
      for (std::size_t k = lo; k <= hi; ++k) fn(k);
      return;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t k = lo; k <= hi; ++k) {
      jobs.push_back(std::async(std::launch::async, fn, k));
      if (jobs.size() >= threads) {
        for (auto& j : jobs) j.get();
        jobs.clear();
      }
    }
    for (auto& j : jobs) j.get();
  };
  run(1, max_vertices + 1, build);
  run(1, max_vertices, rank_at);
  std::vector<CohomologyRow> rows;
  for (std::size_t k = 1; k <= max_vertices; ++k) {
    const std::size_t dim = slices[k].basis.size();
    const std::size_t incoming = k >= 2 ? ranks[k - 1] : 0;
    rows.push_back({k, dim, dim - ranks[k] - incoming});
  }
  return rows;
}

std::vector<CohomologyRow> cohomology_dims(GraphFamily family, std::size_t n, unsigned threads) {
  switch (family) {
    case GraphFamily::Tree: return cohomology_table(family, n + 1, 1, n, threads);
    case GraphFamily::Cyclic: return cohomology_table(family, n, 0, n, threads);
    case GraphFamily::Polygon: return cohomology_table(family, 0, 0, n, threads);
    case GraphFamily::Line: return cohomology_table(family, 1, 1, n, threads);
    default: throw ValidationError("cohomology_dims supports tree, cyclic, polygon and line");
  }
}

DecoratedGraph cocycle_graph(Series s, int n) {
  if (n < 1) throw ValidationError("series index must be positive");
  DecoratedGraph g;
  switch (s) {
    case Series::A: {
      const int k = 2 * n - 1;
      for (int v = 0; v < k; ++v) g.out.push_back((v + 1) % k);
      break;
    }
    case Series::B: {
      g.in_legs = {0, 0};
      for (int v = 0; v < n; ++v) {
        g.out.push_back(v + 1 < n ? v + 1 : -1);
        if (v > 0) g.in_legs.push_back(v);
      }
      break;
    }
    case Series::C: {
      for (int v = 0; v < n; ++v) {
        g.out.push_back((v + 1) % n);
        g.in_legs.push_back(v);
      }
      break;
    }
  }
  g.validate();
  return g;
}

GraphVector basis_cocycles(Series s, int n) { return GraphVector(cocycle_graph(s, n)); }

namespace {

struct SlotLabel {
  bool edge = false;
  int id = 0;
  bool operator==(const SlotLabel&) const = default;
};

TensorField evaluate_unchecked(const DecoratedGraph& g, const VectorField& q, std::map<std::size_t, TensorField>& memo) {
  TensorField t = TensorField::scalar(GP::constant(q.q(), 1));
  std::vector<SlotLabel> lower, upper;
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    const auto inc = g.incoming(v);
    auto it = memo.find(inc.size());
    if (it == memo.end()) it = memo.emplace(inc.size(), derivative_tensor(q, inc.size())).first;
    for (int x : inc) lower.push_back(x < 0 ? SlotLabel{false, -x - 1} : SlotLabel{true, x});
    upper.push_back(g.out[v] < 0 ? SlotLabel{false, -g.out[v] - 1} : SlotLabel{true, v});
    std::vector<std::pair<std::size_t, std::size_t>> diagonal;
    for (std::size_t i = 0; i < lower.size(); ++i)
      for (std::size_t j = 0; j < upper.size() && lower[i].edge; ++j)
        if (upper[j] == lower[i]) diagonal.emplace_back(i, j);
    t = tensor_product(t, it->second, diagonal);
    bool again = true;
    while (again) {
      again = false;
      for (std::size_t i = 0; i < lower.size() && !again; ++i) {
        if (!lower[i].edge) continue;
        for (std::size_t j = 0; j < upper.size(); ++j)
          if (upper[j] == lower[i]) {
            t = contract(t, i, j);
            lower.erase(lower.begin() + i);
            upper.erase(upper.begin() + j);
            again = true;
            break;
          }
      }
    }
  }
  std::vector<std::size_t> lp(lower.size()), up(upper.size());
  for (std::size_t i = 0; i < lower.size(); ++i) lp[lower[i].id] = i;
  for (std::size_t j = 0; j < upper.size(); ++j) up[upper[j].id] = j;
  return permute_slots(t, lp, up);
}

}  // namespace

TensorField evaluate_graph(const DecoratedGraph& g, const VectorField& q) {
  g.validate();
  if (!is_homological(q)) throw ValidationError("evaluate_graph: field is not homological");
  std::map<std::size_t, TensorField> memo;
  return evaluate_unchecked(g, q, memo);
}

TensorField evaluate_graph(const GraphVector& v, const VectorField& q) {
  if (v.is_zero()) return TensorField(q.q(), 0, 0);
  const DecoratedGraph& g = v.terms().begin()->first;
  return evaluate_graph(v, q, g.in_leg_count(), g.out_leg_count());
}

TensorField evaluate_graph(const GraphVector& v, const VectorField& q, std::size_t in_legs, std::size_t out_legs) {
  if (!is_homological(q)) throw ValidationError("evaluate_graph: field is not homological");
  std::map<std::size_t, TensorField> memo;
  TensorField out(q.q(), in_legs, out_legs);
  for (const auto& [g, c] : v.terms()) {
    if (g.in_leg_count() != in_legs || g.out_leg_count() != out_legs)
      throw ValidationError("evaluate_graph: terms have different leg counts");
    out += evaluate_unchecked(g, q, memo) * c;
  }
  return out;
}

bool chain_property_holds(const DecoratedGraph& g, const VectorField& q) {
  const TensorField lhs = evaluate_graph(graph_differential(g), q, g.in_leg_count(), g.out_leg_count());
  return lhs == lie_derivative(q, evaluate_graph(g, q));
}

std::vector<DecoratedGraph> chain_property_failures(const std::vector<DecoratedGraph>& graphs, const VectorField& q) {
  if (!is_homological(q)) throw ValidationError("evaluate_graph: field is not homological");
  std::map<std::size_t, TensorField> memo;
  std::map<DecoratedGraph, TensorField> cache;
  auto eval = [&](const DecoratedGraph& g) -> const TensorField& {
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, evaluate_unchecked(g, q, memo)).first;
    return it->second;
  };
  std::vector<DecoratedGraph> failures;
  for (const auto& g : graphs) {
    g.validate();
    TensorField lhs(q.q(), g.in_leg_count(), g.out_leg_count());
    const GraphVector dg = graph_differential(g);
    for (const auto& [h, c] : dg.terms()) lhs += eval(h) * c;
    if (!(lhs == lie_derivative(q, eval(g)))) failures.push_back(g);
  }
  return failures;
}

}  // namespace qchar
