#include "qchar/qmanifolds.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "qchar/errors.hpp"
#include "qchar/linalg.hpp"

namespace qchar {

namespace {

using Matrix = std::vector<std::vector<Rational>>;

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b[k][j] != 0) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

Matrix mat_identity(std::size_t n) {
  Matrix m(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Rational mat_trace(const Matrix& m) {
  Rational t = 0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

// Bracket of basis element a with basis element b as a coefficient vector.
std::vector<Rational> bracket_basis(const LieSuperAlgebraSpec& s, std::size_t a, std::size_t b) {
  std::vector<Rational> out(s.dim(), 0);
  for (std::size_t d = 0; d < s.dim(); ++d) out[d] = s.f(a, b, d);
  return out;
}

std::vector<Rational> bracket_left(const LieSuperAlgebraSpec& s, std::size_t a, const std::vector<Rational>& v) {
  std::vector<Rational> out(s.dim(), 0);
  for (std::size_t k = 0; k < s.dim(); ++k) {
    if (v[k] == 0) continue;
    for (std::size_t d = 0; d < s.dim(); ++d) out[d] += v[k] * s.f(a, k, d);
  }
  return out;
}

std::vector<Rational> bracket_right(const LieSuperAlgebraSpec& s, const std::vector<Rational>& v, std::size_t c) {
  std::vector<Rational> out(s.dim(), 0);
  for (std::size_t k = 0; k < s.dim(); ++k) {
    if (v[k] == 0) continue;
    for (std::size_t d = 0; d < s.dim(); ++d) out[d] += v[k] * s.f(k, c, d);
  }
  return out;
}

GP embed(const GP& f, std::size_t q, std::size_t offset) {
  GP out(q);
  for (const auto& [m, c] : f.terms()) out.add_term(m << offset, c);
  return out;
}

// d_{i1} ... d_{in} f, innermost derivative taken with respect to the last index.
GP derive(GP f, const std::vector<std::size_t>& indices) {
  for (std::size_t k = indices.size(); k-- > 0 && !f.is_zero();) f = f.derivative(indices[k]);
  return f;
}

int permutation_sign(const std::vector<std::size_t>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

Rational LieSuperAlgebraSpec::f(std::size_t a, std::size_t b, std::size_t d) const {
  auto it = constants.find({a, b, d});
  return it == constants.end() ? Rational(0) : it->second;
}

std::size_t LieSuperAlgebraSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i].name == name) return i;
  throw ValidationError("unknown basis element '" + name + "'");
}

std::vector<std::vector<Rational>> LieSuperAlgebraSpec::ad_matrix(std::size_t a) const {
  Matrix m(dim(), std::vector<Rational>(dim(), 0));
  for (std::size_t b = 0; b < dim(); ++b)
    for (std::size_t d = 0; d < dim(); ++d) m[d][b] = f(a, b, d);
  return m;
}

OddDomain LieSuperAlgebraSpec::ghost_domain() const {
  OddDomain d;
  for (const auto& e : basis) {
    if (!e.name.empty() && e.name[0] == 'e')
      d.names.push_back("c" + e.name.substr(1));
    else
      d.names.push_back("c_" + e.name);
  }
  d.validate();
  return d;
}

std::optional<std::array<std::size_t, 3>> jacobi_violation(const LieSuperAlgebraSpec& s) {
  const std::size_t n = s.dim();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        // [a,[b,c]] = [[a,b],c] + (-1)^{ab} [b,[a,c]]
        auto lhs = bracket_left(s, a, bracket_basis(s, b, c));
        auto r1 = bracket_right(s, bracket_basis(s, a, b), c);
        auto r2 = bracket_left(s, b, bracket_basis(s, a, c));
        const bool odd = (s.basis[a].parity & 1) && (s.basis[b].parity & 1);
        for (std::size_t d = 0; d < n; ++d) {
          Rational rhs = r1[d] + (odd ? Rational(-r2[d]) : r2[d]);
          if (lhs[d] != rhs) return std::array<std::size_t, 3>{a, b, c};
        }
      }
  return std::nullopt;
}

void validate_algebra(const LieSuperAlgebraSpec& s) {
  std::map<std::string, int> names;
  for (const auto& e : s.basis) {
    if (e.name.empty()) throw ValidationError("empty basis element name");
    if (names[e.name]++) throw ValidationError("duplicate basis element '" + e.name + "'");
    if (e.parity != 0 && e.parity != 1) throw ValidationError("parity of '" + e.name + "' must be 0 or 1");
  }
  for (const auto& [key, c] : s.constants) {
    auto [a, b, d] = key;
    if (a >= s.dim() || b >= s.dim() || d >= s.dim()) throw ValidationError("structure constant index out of range");
    if (c == 0) continue;
    if (((s.basis[a].parity + s.basis[b].parity) & 1) != (s.basis[d].parity & 1))
      throw ValidationError("parity violation in [" + s.basis[a].name + "," + s.basis[b].name + "] -> " +
                            s.basis[d].name);
  }
  for (std::size_t a = 0; a < s.dim(); ++a)
    for (std::size_t b = 0; b < s.dim(); ++b)
      for (std::size_t d = 0; d < s.dim(); ++d) {
        const bool odd = (s.basis[a].parity & 1) && (s.basis[b].parity & 1);
        Rational expected = odd ? s.f(b, a, d) : Rational(-s.f(b, a, d));
        if (s.f(a, b, d) != expected)
          throw ValidationError("antisymmetry violation for (" + s.basis[a].name + ", " + s.basis[b].name + ")");
      }
  if (auto v = jacobi_violation(s))
    throw ValidationError("Jacobi violation for triple (" + s.basis[(*v)[0]].name + ", " + s.basis[(*v)[1]].name +
                          ", " + s.basis[(*v)[2]].name + ")");
}

LieSuperAlgebraSpec parse_algebra(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("algebra parse error: ") + e.what());
  }
  LieSuperAlgebraSpec s;
  try {
    if (!j.is_object() || !j.contains("basis") || !j["basis"].is_array())
      throw ValidationError("algebra input needs a 'basis' array");
    for (const auto& e : j["basis"]) {
      LieSuperAlgebraSpec::Element el;
      el.name = e.at("name").get<std::string>();
      el.parity = e.contains("parity") ? e["parity"].get<int>() : 0;
      s.basis.push_back(el);
    }
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> given;
    if (j.contains("brackets")) {
      for (const auto& br : j["brackets"]) {
        std::size_t a = s.index_of(br.at("a").get<std::string>());
        std::size_t b = s.index_of(br.at("b").get<std::string>());
        for (const auto& [name, value] : br.at("out").items()) {
          std::size_t d = s.index_of(name);
          Rational c = value.is_string() ? parse_rational(value.get<std::string>())
                                         : value.is_number_integer() ? Rational(value.get<long>())
                                                                     : throw ValidationError("coefficient must be a string 'p/q'");
          auto [it, fresh] = given.try_emplace({a, b, d}, c);
          if (!fresh) throw ValidationError("bracket (" + s.basis[a].name + ", " + s.basis[b].name + ") given twice");
        }
      }
    }
    // Antisymmetry closure: fill the reverse orientation where it is absent.
    s.constants = given;
    for (const auto& [key, c] : given) {
      auto [a, b, d] = key;
      if (given.count({b, a, d})) continue;
      const bool odd = (s.basis[a].parity & 1) && (s.basis[b].parity & 1);
      if (a == b) continue;
      s.constants[{b, a, d}] = odd ? c : Rational(-c);
    }
    for (auto it = s.constants.begin(); it != s.constants.end();)
      it = it->second == 0 ? s.constants.erase(it) : std::next(it);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("algebra format error: ") + e.what());
  }
  validate_algebra(s);
  return s;
}

bool is_builtin_algebra(const std::string& name) {
  return name == "sl2" || name == "borel2" || name == "heisenberg3" || name.rfind("abelian:", 0) == 0;
}

std::string builtin_algebra_text(const std::string& name) {
  if (name == "sl2")
    return R"({"basis": [{"name": "e_-1", "parity": 0}, {"name": "e0", "parity": 0}, {"name": "e1", "parity": 0}],
 "brackets": [{"a": "e_-1", "b": "e1", "out": {"e0": "2"}},
              {"a": "e0", "b": "e1", "out": {"e1": "1"}},
              {"a": "e0", "b": "e_-1", "out": {"e_-1": "-1"}}]})";
  if (name == "borel2")
    return R"({"basis": [{"name": "e0", "parity": 0}, {"name": "e1", "parity": 0}],
 "brackets": [{"a": "e0", "b": "e1", "out": {"e1": "1"}}]})";
  if (name == "heisenberg3")
    return R"({"basis": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}, {"name": "z", "parity": 0}],
 "brackets": [{"a": "x", "b": "y", "out": {"z": "1"}}]})";
  if (name.rfind("abelian:", 0) == 0) {
    std::size_t n = 0;
    try {
      n = std::stoul(name.substr(8));
    } catch (...) {
      throw ValidationError("bad abelian dimension in '" + name + "'");
    }
    if (n > kMaxGenerators) throw ValidationError("abelian dimension too large");
    std::string t = R"({"basis": [)";
    for (std::size_t i = 0; i < n; ++i)
      t += (i ? ", " : "") + std::string(R"({"name": "e)") + std::to_string(i) + R"(", "parity": 0})";
    return t + R"(], "brackets": []})";
  }
  throw ValidationError("unknown built-in algebra '" + name + "'");
}

LieSuperAlgebraSpec builtin_algebra(const std::string& name) { return parse_algebra(builtin_algebra_text(name)); }

VectorField ce_vector_field(const LieSuperAlgebraSpec& spec) {
  const std::size_t q = spec.dim();
  VectorField out(q, 1);
  std::vector<GP> comps(q, GP(q));
  const Rational half(1, 2);
  for (const auto& [key, c] : spec.constants) {
    auto [a, b, d] = key;
    comps[d] += GP::generator(q, b) * GP::generator(q, a) * (half * c);
  }
  for (std::size_t d = 0; d < q; ++d) out.set_component(d, comps[d]);
  return out;
}

CEQManifold ce_field(const LieSuperAlgebraSpec& spec) {
  for (const auto& e : spec.basis)
    if (e.parity & 1)
      throw ValidationError("odd basis element '" + e.name +
                            "' has an even ghost; only purely odd coordinate domains are supported");
  validate_algebra(spec);
  CEQManifold m{spec.ghost_domain(), ce_vector_field(spec)};
  if (!is_homological(m.q)) throw ConsistencyError("Chevalley-Eilenberg field of a Jacobi algebra is not homological");
  return m;
}

TensorField series_A(const VectorField& q, int n) {
  if (n < 1) throw ValidationError("series index must be positive");
  TensorField lambda = derivative_tensor(q, 1);
  TensorField power = lambda;
  for (int k = 1; k < 2 * n - 1; ++k) power = compose(power, lambda);
  return TensorField::scalar(supertrace(power));
}

TensorField series_B(const VectorField& q, int n) {
  if (n < 1) throw ValidationError("series index must be positive");
  TensorField d2 = derivative_tensor(q, 2);
  TensorField chain = d2;
  for (int k = 1; k < n; ++k) chain = contract(tensor_product(chain, d2), chain.lower(), 0);
  return chain;
}

TensorField series_C(const VectorField& q, int n) { return contract(series_B(q, n), 0, 0) * Rational(-1); }

TensorField series_rep(Series s, const VectorField& q, int n) {
  switch (s) {
    case Series::A: return series_A(q, n);
    case Series::B: return series_B(q, n);
    case Series::C: return series_C(q, n);
  }
  return {};
}

TensorField adjoint_closed_form(const LieSuperAlgebraSpec& spec, Series s, int n) {
  const std::size_t q = spec.dim();
  std::vector<Matrix> ad;
  for (std::size_t a = 0; a < q; ++a) ad.push_back(spec.ad_matrix(a));
  const std::size_t len = s == Series::A ? static_cast<std::size_t>(2 * n - 1) : static_cast<std::size_t>(n);
  const Rational sign_n = (n % 2) ? Rational(-1) : Rational(1);
  std::size_t slots = s == Series::A ? 0 : s == Series::B ? n + 2 : n;
  TensorField out(q, s == Series::A ? 0 : s == Series::B ? n + 1 : n, s == Series::B ? 1 : 0);
  (void)slots;
  std::vector<std::size_t> seq(len, 0);
  while (true) {
    // Product ad_{seq[len-1]} ... ad_{seq[0]}.
    Matrix prod = mat_identity(q);
    for (std::size_t k = 0; k < len; ++k) prod = mat_mul(ad[seq[k]], prod);
    if (s == Series::A) {
      // tr(ad_{a1}...ad_{ak}) with a1 = seq[0]: reverse order product.
      Matrix fwd = mat_identity(q);
      for (std::size_t k = 0; k < len; ++k) fwd = mat_mul(fwd, ad[seq[k]]);
      Rational tr = mat_trace(fwd);
      if (tr != 0) {
        GP mono = GP::constant(q, tr * sign_n);
        for (std::size_t k = 0; k < len; ++k) mono = mono * GP::generator(q, seq[k]);
        out.add_component({}, mono);
      }
    } else if (s == Series::C) {
      Rational tr = mat_trace(prod);
      if (tr != 0) {
        TensorIndex idx(seq.begin(), seq.end());
        out.add_component(idx, GP::constant(q, tr * sign_n));
      }
    } else {
      for (std::size_t y = 0; y < q; ++y)
        for (std::size_t d = 0; d < q; ++d) {
          if (prod[d][y] == 0) continue;
          TensorIndex idx;
          idx.push_back(static_cast<std::uint8_t>(y));
          for (auto x : seq) idx.push_back(static_cast<std::uint8_t>(x));
          idx.push_back(static_cast<std::uint8_t>(d));
          out.add_component(idx, GP::constant(q, -prod[d][y]));
        }
    }
    std::size_t pos = 0;
    while (pos < len && ++seq[pos] == q) seq[pos++] = 0;
    if (pos == len) break;
  }
  return out;
}

ExactnessResult is_exact(const VectorField& q, const TensorField& t) {
  if (q.q() != t.q()) throw ValidationError("mismatched odd domains");
  if (!lie_derivative(q, t).is_zero()) throw ValidationError("is_exact: tensor is not closed");
  const std::size_t dim = q.q();
  const std::size_t slots = t.lower() + t.upper();
  TensorField primitive(dim, t.lower(), t.upper());
  for (int p = 0; p < 2; ++p) {
    TensorField target = t.parity_part(p);
    if (target.is_zero()) continue;
    const int coef_parity = (p + 1 + static_cast<int>(slots)) & 1;
    std::vector<std::pair<TensorIndex, Monomial>> unknowns;
    TensorIndex idx(slots, 0);
    while (true) {
      for (Monomial m = 0; m < (Monomial(1) << dim); ++m)
        if ((monomial_degree(m) & 1) == coef_parity) unknowns.emplace_back(idx, m);
      std::size_t pos = 0;
      while (pos < slots && ++idx[pos] == dim) idx[pos++] = 0;
      if (pos == slots) break;
    }
    // High-degree coefficients first: their images are short.
    std::stable_sort(unknowns.begin(), unknowns.end(), [](const auto& a, const auto& b) {
      return monomial_degree(a.second) > monomial_degree(b.second);
    });
    std::map<std::pair<TensorIndex, Monomial>, std::size_t> coord;
    std::vector<std::map<std::size_t, Rational>> rows;
    auto coord_of = [&](const TensorIndex& i, Monomial m) {
      auto [it, fresh] = coord.try_emplace({i, m}, rows.size());
      if (fresh) rows.emplace_back();
      return it->second;
    };
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      TensorField basis(dim, t.lower(), t.upper());
      basis.add_component(unknowns[u].first, GP::monomial(dim, unknowns[u].second, 1));
      TensorField image = lie_derivative(q, basis);
      for (const auto& [i, f] : image.components())
        for (const auto& [m, c] : f.terms()) rows[coord_of(i, m)][u] = c;
    }
    std::vector<Rational> rhs(rows.size(), 0);
    for (const auto& [i, f] : target.components())
      for (const auto& [m, c] : f.terms()) {
        std::size_t r = coord_of(i, m);
        if (r >= rhs.size()) rhs.resize(rows.size(), 0);
        rhs[r] = c;
      }
    LinearSystem sys;
    sys.unknowns = unknowns.size();
    for (std::size_t r = 0; r < rows.size(); ++r) sys.add_equation(make_sparse(rows[r]), rhs[r]);
    auto x = solve_any(sys);
    if (!x) return {false, std::nullopt};
    for (std::size_t u = 0; u < unknowns.size(); ++u)
      if ((*x)[u] != 0) primitive.add_component(unknowns[u].first, GP::monomial(dim, unknowns[u].second, (*x)[u]));
  }
  if (!(lie_derivative(q, primitive) == t)) throw ConsistencyError("is_exact: primitive does not reproduce the tensor");
  return {true, primitive};
}

ClassReport class_report(const CEQManifold& m, Series s, int n, bool decide_exact, bool keep_primitive) {
  ClassReport r;
  r.series = s;
  r.n = n;
  r.representative = series_rep(s, m.q, n);
  r.closed = lie_derivative(m.q, r.representative).is_zero();
  if (decide_exact && r.closed) {
    auto e = is_exact(m.q, r.representative);
    r.exact = e.exact;
    if (keep_primitive && e.exact) r.primitive = e.primitive;
  }
  return r;
}

ClassReport modular_class(const LieSuperAlgebraSpec& spec) {
  return class_report(ce_field(spec), Series::A, 1, true, true);
}

bool VerificationReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.holds; });
}

std::vector<VectorField> jet_components(const VectorField& q, int order) {
  const std::size_t n = q.q();
  const std::size_t d = 2 * n;
  std::vector<GP> shift(n, GP(d));
  for (std::size_t a = 0; a < n; ++a) shift[a] = GP::generator(d, a) + GP::generator(d, n + a);
  std::vector<VectorField> parts(order + 1, VectorField(d, 1));
  auto y_degree = [n](Monomial m) { return monomial_degree(m >> n); };
  for (std::size_t a = 0; a < n; ++a) {
    GP base = embed(q.component(a), d, 0);
    GP lifted = q.component(a).substitute(shift) - base;
    for (int w = 0; w <= order; ++w) {
      GP xs(d), ys(d);
      for (const auto& [m, c] : base.terms())
        if (y_degree(m) == w) xs.add_term(m, c);
      for (const auto& [m, c] : lifted.terms())
        if (y_degree(m) == w + 1) ys.add_term(m, c);
      parts[w].set_component(a, xs);
      parts[w].set_component(n + a, ys);
    }
  }
  return parts;
}

VerificationReport jet_expansion(const VectorField& q, int order) {
  if (order < 1) throw ValidationError("jet order must be positive");
  VerificationReport report;
  auto parts = jet_components(q, order);
  const std::size_t n = q.q(), d = 2 * n;
  {
    VectorField expected(d, 1);
    for (std::size_t i = 0; i < n; ++i) {
      expected.set_component(i, embed(q.component(i), d, 0));
      GP lin(d);
      for (std::size_t j = 0; j < n; ++j)
        lin += GP::generator(d, n + j) * embed(q.component(i).derivative(j), d, 0);
      expected.set_component(n + i, lin);
    }
    report.checks.push_back({"Q~0 is the tangent lift of Q", expected == parts[0]});
  }
  report.checks.push_back({"[Q~0,Q~0] = 0", lie_bracket(parts[0], parts[0]).is_zero()});
  for (int m = 1; m <= order; ++m) {
    VectorField total = lie_bracket(parts[0], parts[m]) * Rational(2);
    for (int k = 1; k < m; ++k) total += lie_bracket(parts[m - k], parts[k]);
    report.checks.push_back({"2[Q~0,Q~" + std::to_string(m) + "] = -sum_k [Q~" + std::to_string(m) + "-k,Q~k]",
                             total.is_zero()});
  }
  return report;
}

VerificationReport gauss_chain_check(const VectorField& q, int order) {
  if (order < 1) throw ValidationError("order must be positive");
  VerificationReport report;
  const std::size_t dim = q.q();
  for (int n = 1; n <= order; ++n) {
    bool ok = true;
    std::vector<std::size_t> perm(n);
    std::vector<std::size_t> idx(n, 0);
    const Rational inv_fact = Rational(1) / factorial(n);
    while (ok) {
      for (std::size_t j = 0; j < dim && ok; ++j) {
        GP lhs(dim);
        std::vector<std::size_t> full;
        for (std::size_t m = 0; m < dim; ++m) {
          full.assign(1, m);
          full.insert(full.end(), idx.begin(), idx.end());
          GP inner = derive(q.component(j), full);
          if (!inner.is_zero()) lhs += q.component(m) * inner;
        }
        GP rhs(dim);
        std::iota(perm.begin(), perm.end(), 0);
        do {
          const int sg = permutation_sign(perm);
          std::vector<std::size_t> p(n);
          for (int k = 0; k < n; ++k) p[k] = idx[perm[k]];
          for (int l = 1; l <= n; ++l) {
            Rational coef = binomial(n, l) * inv_fact * ((l + 1) % 2 ? -1 : 1) * sg;
            std::vector<std::size_t> head(p.begin(), p.begin() + l);
            for (std::size_t m = 0; m < dim; ++m) {
              GP left = derive(q.component(m), head);
              if (left.is_zero()) continue;
              std::vector<std::size_t> tail{m};
              tail.insert(tail.end(), p.begin() + l, p.end());
              GP right = derive(q.component(j), tail);
              if (right.is_zero()) continue;
              rhs += (left * right) * coef;
            }
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!(lhs == rhs)) ok = false;
      }
      std::size_t pos = 0;
      while (pos < static_cast<std::size_t>(n) && ++idx[pos] == dim) idx[pos++] = 0;
      if (pos == static_cast<std::size_t>(n)) break;
    }
    report.checks.push_back({"binomial identity at order " + std::to_string(n), ok});
  }
  return report;
}

CoordinateChange make_coordinate_change(std::vector<GP> forward) {
  const std::size_t q = forward.size();
  for (const auto& f : forward)
    if (f.q() != q || (!f.is_zero() && f.parity() != 1)) throw ValidationError("coordinate change must map odd to odd");
  // Linear part L^a_b and its inverse.
  LinearSystem sys;
  sys.unknowns = q * q;
  // Solve L X = I for X (unknown X^b_c at b*q + c).
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t c = 0; c < q; ++c) {
      std::map<std::size_t, Rational> row;
      for (std::size_t b = 0; b < q; ++b) {
        Rational l = forward[a].coefficient(Monomial(1) << b);
        if (l != 0) row[b * q + c] = l;
      }
      sys.add_equation(make_sparse(row), a == c ? Rational(1) : Rational(0));
    }
  if (nullity(sys) != 0) throw ValidationError("coordinate change is not invertible");
  auto x = solve(sys);
  if (!x) throw ValidationError("coordinate change is not invertible");
  std::vector<GP> nonlinear(q, GP(q));
  for (std::size_t a = 0; a < q; ++a) nonlinear[a] = forward[a] - forward[a].degree_part(1);
  std::vector<GP> inv(q, GP(q));
  auto apply_linv = [&](const std::vector<GP>& v) {
    std::vector<GP> out(q, GP(q));
    for (std::size_t b = 0; b < q; ++b)
      for (std::size_t c = 0; c < q; ++c)
        if ((*x)[b * q + c] != 0) out[b] += v[c] * (*x)[b * q + c];
    return out;
  };
  std::vector<GP> coords(q, GP(q));
  for (std::size_t a = 0; a < q; ++a) coords[a] = GP::generator(q, a);
  inv = apply_linv(coords);
  for (std::size_t iter = 0; iter <= q; ++iter) {
    std::vector<GP> rhs(q, GP(q));
    for (std::size_t a = 0; a < q; ++a) rhs[a] = coords[a] - nonlinear[a].substitute(inv);
    inv = apply_linv(rhs);
  }
  for (std::size_t a = 0; a < q; ++a)
    if (!(forward[a].substitute(inv) == coords[a])) throw ConsistencyError("coordinate change inversion failed");
  return {std::move(forward), std::move(inv)};
}

CoordinateChange random_coordinate_change(Rng& rng, std::size_t q, bool nonlinear) {
  Matrix lower = mat_identity(q), upper = mat_identity(q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      if (i > j) lower[i][j] = rng.uniform(-1, 1);
      if (i < j) upper[i][j] = rng.uniform(-1, 1);
    }
  Matrix l = mat_mul(lower, upper);
  std::vector<GP> forward(q, GP(q));
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b)
      if (l[a][b] != 0) forward[a].add_term(Monomial(1) << b, l[a][b]);
    if (nonlinear) forward[a] += random_polynomial(rng, q, 1, 35, 3).degree_part(3);
  }
  return make_coordinate_change(std::move(forward));
}

VectorField push_forward(const VectorField& q, const CoordinateChange& change) {
  const std::size_t n = q.q();
  VectorField out(n, q.parity());
  for (std::size_t a = 0; a < n; ++a) out.set_component(a, q.apply(change.forward[a]).substitute(change.inverse));
  return out;
}

TensorField pull_back(const TensorField& t_new, const CoordinateChange& change) {
  const std::size_t q = t_new.q();
  std::vector<std::vector<GP>> k(q, std::vector<GP>(q)), jac(q, std::vector<GP>(q));
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t a = 0; a < q; ++a) k[j][a] = change.forward[a].derivative(j);
  for (std::size_t b = 0; b < q; ++b)
    for (std::size_t l = 0; l < q; ++l) jac[b][l] = change.inverse[l].derivative(b).substitute(change.forward);
  const std::size_t n = t_new.lower(), m = t_new.upper();
  TensorField out(q, n, m);
  for (const auto& [idx, f] : t_new.components()) {
    std::map<TensorIndex, GP> partial{{TensorIndex{}, f.substitute(change.forward)}};
    for (std::size_t s = 0; s < n + m; ++s) {
      std::map<TensorIndex, GP> next;
      for (const auto& [pi, g] : partial)
        for (std::size_t o = 0; o < q; ++o) {
          const GP& factor = s < n ? k[o][idx[s]] : jac[idx[s]][o];
          if (factor.is_zero()) continue;
          TensorIndex ni = pi;
          ni.push_back(static_cast<std::uint8_t>(o));
          GP prod = g * factor;
          if (prod.is_zero()) continue;
          auto [it, fresh] = next.try_emplace(ni, prod);
          if (!fresh) it->second += prod;
        }
      partial = std::move(next);
    }
    for (const auto& [pi, g] : partial) out.add_component(pi, g);
  }
  return out;
}

VectorField random_homological_field(Rng& rng, std::size_t q) {
  static const LieSuperAlgebraSpec sl2 = builtin_algebra("sl2");
  static const LieSuperAlgebraSpec borel = builtin_algebra("borel2");
  static const LieSuperAlgebraSpec heis = builtin_algebra("heisenberg3");
  std::vector<GP> comps(q, GP(q));
  std::size_t offset = 0;
  while (offset < q) {
    const std::size_t room = q - offset;
    long kind = rng.uniform(0, room >= 3 ? 4 : room == 2 ? 2 : 1);
    const LieSuperAlgebraSpec* block = nullptr;
    if (kind == 0) {
      comps[offset] = GP::constant(q, 1);
      offset += 1;
      continue;
    }
    if (kind == 1) {
      offset += 1;
      continue;
    }
    block = kind == 2 ? &borel : kind == 3 ? &sl2 : &heis;
    VectorField local = ce_vector_field(*block);
    for (std::size_t a = 0; a < block->dim(); ++a) comps[offset + a] = embed(local.component(a), q, offset);
    offset += block->dim();
  }
  VectorField base(comps, 1);
  VectorField out = push_forward(base, random_coordinate_change(rng, q, true));
  if (!is_homological(out)) throw ConsistencyError("random field lost homologicity under a coordinate change");
  return out;
}

}  // namespace qchar
