#include "qchar/cyclic_words.hpp"

#include <algorithm>
#include <sstream>

#include "qchar/errors.hpp"
#include "qchar/linalg.hpp"

namespace qchar {

int word_degree(const Word& w) {
  int d = 0;
  for (char c : w) d += c == 'a' ? 1 : 2;
  return d;
}

int word_weight(const Word& w) { return 2 * static_cast<int>(std::count(w.begin(), w.end(), 'b')); }

void validate_word(const Word& w) {
  for (char c : w)
    if (c != 'a' && c != 'b') throw ValidationError("words use only the letters a and b: '" + w + "'");
}

void add_term(NCPoly& p, const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = p.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

NCPoly d_free(const NCPoly& p) {
  NCPoly out;
  for (const auto& [w, c] : p) {
    validate_word(w);
    int prefix_degree = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Word head = w.substr(0, i), tail = w.substr(i + 1);
      const Rational s = prefix_degree % 2 ? Rational(-c) : c;
      if (w[i] == 'a') {
        add_term(out, head + "aa" + tail, s);
        add_term(out, head + "b" + tail, s);
        prefix_degree += 1;
      } else {
        add_term(out, head + "ab" + tail, s);
        add_term(out, head + "ba" + tail, -s);
        prefix_degree += 2;
      }
    }
  }
  return out;
}

std::pair<Word, int> canonical_rotation(const Word& w) {
  validate_word(w);
  if (w.empty()) return {w, 1};
  Word best = w;
  int best_sign = 1;
  Word cur = w;
  int sign = 1;
  bool vanishes = false;  // some rotation gives w = -w
  const int total = word_degree(w);
  for (std::size_t step = 0; step < w.size(); ++step) {
    // x rest -> (-1)^{|x||rest|} rest x
    const int x = cur[0] == 'a' ? 1 : 2;
    if ((x * (total - x)) % 2) sign = -sign;
    cur = cur.substr(1) + cur[0];
    if (cur == w && sign < 0) vanishes = true;
    if (cur < best) {
      best = cur;
      best_sign = sign;
    }
  }
  return {best, vanishes ? 0 : best_sign};
}

CyclicPoly CyclicPoly::word(const Word& w, const Rational& c) {
  CyclicPoly p;
  p.add(w, c);
  return p;
}

Rational CyclicPoly::coefficient(const Word& canonical) const {
  auto it = terms_.find(canonical);
  return it == terms_.end() ? Rational(0) : it->second;
}

void CyclicPoly::add(const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [canon, sign] = canonical_rotation(w);
  if (sign == 0) return;
  auto [it, fresh] = terms_.try_emplace(canon, sign * c);
  if (!fresh) {
    it->second += sign * c;
    if (it->second == 0) terms_.erase(it);
  }
}

CyclicPoly& CyclicPoly::operator+=(const CyclicPoly& other) {
  for (const auto& [w, c] : other.terms_) {
    auto [it, fresh] = terms_.try_emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

CyclicPoly& CyclicPoly::operator*=(const Rational& s) {
  if (s == 0) terms_.clear();
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

namespace {

std::string render_word(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += ".";
    out += w[i];
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

}  // namespace

std::string CyclicPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (first)
      os << qchar::to_string(c);
    else if (c < 0)
      os << " - " << qchar::to_string(Rational(-c));
    else
      os << " + " << qchar::to_string(c);
    os << " " << render_word(w);
    first = false;
  }
  return os.str();
}

CyclicPoly cyclic_reduce(const NCPoly& p) {
  CyclicPoly out;
  for (const auto& [w, c] : p) out.add(w, c);
  return out;
}

CyclicPoly d_cyclic(const CyclicPoly& p) {
  NCPoly lift(p.terms().begin(), p.terms().end());
  return cyclic_reduce(d_free(lift));
}

std::vector<Word> free_basis(int degree) {
  std::vector<Word> out;
  if (degree < 0) return out;
  if (degree == 0) return {""};
  for (const Word& w : free_basis(degree - 1)) out.push_back("a" + w);
  for (const Word& w : free_basis(degree - 2)) out.push_back("b" + w);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Word> cyclic_basis(int degree) {
  std::vector<Word> out;
  for (const Word& w : free_basis(degree)) {
    auto [canon, sign] = canonical_rotation(w);
    if (sign != 0 && canon == w) out.push_back(w);
  }
  return out;
}

namespace {

SparseVec coordinates(const CyclicPoly& p, const std::map<Word, std::size_t>& index) {
  std::map<std::size_t, Rational> row;
  for (const auto& [w, c] : p.terms()) {
    auto it = index.find(w);
    if (it == index.end()) throw ConsistencyError("word outside the expected basis: " + w);
    row[it->second] = c;
  }
  return make_sparse(row);
}

std::map<Word, std::size_t> index_of(const std::vector<Word>& basis) {
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;
  return index;
}

}  // namespace

Transgression transgress(int n, int max_degree) {
  if (n < 1) throw ValidationError("transgress: n must be positive");
  if (2 * n - 1 > max_degree)
    throw BudgetError("transgress(" + std::to_string(n) + ") needs words of degree " + std::to_string(2 * n - 1) +
                      ", above the budget " + std::to_string(max_degree) + " (raise --budget)");
  const Word lead(2 * n - 1, 'a');
  const Word target = Word(n, 'b');
  std::vector<Word> unknown_words;
  for (const Word& w : cyclic_basis(2 * n - 1))
    if (w != lead) unknown_words.push_back(w);
  const std::vector<Word> rows_basis = cyclic_basis(2 * n);
  const auto row_index = index_of(rows_basis);
  // Unknowns: x_w for each word, then alpha.
  const std::size_t alpha_col = unknown_words.size();
  std::vector<std::map<std::size_t, Rational>> rows(rows_basis.size());
  for (std::size_t u = 0; u < unknown_words.size(); ++u) {
    const CyclicPoly du = d_cyclic(CyclicPoly::word(unknown_words[u]));
    for (const auto& [w, c] : du.terms()) rows[row_index.at(w)][u] = c;
  }
  rows[row_index.at(target)][alpha_col] = -1;
  std::vector<Rational> rhs(rows_basis.size(), 0);
  const CyclicPoly dlead = d_cyclic(CyclicPoly::word(lead));
  for (const auto& [w, c] : dlead.terms()) rhs[row_index.at(w)] = -c;
  LinearSystem sys;
  sys.unknowns = alpha_col + 1;
  for (std::size_t r = 0; r < rows.size(); ++r) sys.add_equation(make_sparse(rows[r]), rhs[r]);
  auto x = solve(sys);
  if (!x) throw ConsistencyError("transgression system is infeasible for n = " + std::to_string(n));
  Transgression t;
  t.n = n;
  t.alpha = (*x)[alpha_col];
  t.candidate.add(lead, 1);
  for (std::size_t u = 0; u < unknown_words.size(); ++u) t.candidate.add(unknown_words[u], (*x)[u]);
  // alpha is unique iff b^n is not a coboundary of the lower words.
  EchelonBasis image;
  for (std::size_t u = 0; u < unknown_words.size(); ++u)
    image.insert(coordinates(d_cyclic(CyclicPoly::word(unknown_words[u])), row_index));
  t.alpha_unique = !image.in_span(coordinates(CyclicPoly::word(target), row_index));
  if (!(d_cyclic(t.candidate) == CyclicPoly::word(target, t.alpha)))
    throw ConsistencyError("transgression solution does not verify");
  return t;
}

CyclicPoly tabulated_A_words(int n) {
  // Str(Lambda^{2n-1} + ...) with R -> 2b: a word with k letters b carries the
  // tabulated coefficient times 2^k.
  CyclicPoly p;
  switch (n) {
    case 1: p.add("a", 1); break;
    case 2:
      p.add("aaa", 1);
      p.add("ba", Rational(3, 2) * 2);
      break;
    case 3:
      p.add("aaaaa", 1);
      p.add("baaa", Rational(5, 2) * 2);
      p.add("bba", Rational(10, 4) * 4);
      break;
    case 4:
      p.add("aaaaaaa", 1);
      p.add("baaaaa", Rational(7, 2) * 2);
      p.add("bbaaa", Rational(14, 4) * 4);
      p.add("babaa", Rational(7, 4) * 4);
      p.add("bbba", Rational(35, 8) * 8);
      break;
    default: throw ValidationError("explicit A-series words are tabulated for n <= 4");
  }
  return p;
}

bool is_cyclic_exact(const CyclicPoly& p) {
  if (p.is_zero()) return true;
  const int degree = word_degree(p.terms().begin()->first);
  for (const auto& [w, c] : p.terms())
    if (word_degree(w) != degree) throw ValidationError("is_cyclic_exact: inhomogeneous element");
  if (degree <= 1) return false;
  const auto basis = cyclic_basis(degree);
  const auto index = index_of(basis);
  EchelonBasis image;
  for (const Word& w : cyclic_basis(degree - 1)) {
    if (w.empty()) continue;
    image.insert(coordinates(d_cyclic(CyclicPoly::word(w)), index));
  }
  return image.in_span(coordinates(p, index));
}

std::vector<DegreeCohomology> cyclic_cohomology(int max_degree) {
  std::vector<std::size_t> ranks(max_degree + 2, 0);
  std::vector<std::vector<Word>> bases(max_degree + 2);
  for (int d = 1; d <= max_degree + 1; ++d) bases[d] = cyclic_basis(d);
  for (int d = 1; d <= max_degree; ++d) {
    const auto index = index_of(bases[d + 1]);
    EchelonBasis image;
    for (const Word& w : bases[d]) image.insert(coordinates(d_cyclic(CyclicPoly::word(w)), index));
    ranks[d] = image.rank();
  }
  std::vector<DegreeCohomology> out;
  for (int d = 1; d <= max_degree; ++d) {
    const std::size_t dim = bases[d].size();
    out.push_back({d, dim, dim - ranks[d] - (d >= 2 ? ranks[d - 1] : 0)});
  }
  return out;
}

CyclicPoly d0_cyclic(const CyclicPoly& p) {
  CyclicPoly out;
  for (const auto& [w, c] : p.terms()) {
    int prefix = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == 'a') out.add(w.substr(0, i) + "aa" + w.substr(i + 1), prefix % 2 ? c : Rational(-c));
      prefix += w[i] == 'a' ? 1 : 2;
    }
  }
  return out;
}

std::vector<BidegreeCohomology> d0_cohomology(int max_p, int max_q) {
  auto slice = [](int p, int q) {
    std::vector<Word> out;
    if (p % 2) return out;
    for (const Word& w : cyclic_basis(p + q))
      if (word_weight(w) == p) out.push_back(w);
    return out;
  };
  std::vector<BidegreeCohomology> out;
  for (int p = 0; p <= max_p; p += 2)
    for (int q = 0; q <= max_q; ++q) {
      if (p == 0 && q == 0) continue;
      const auto here = slice(p, q), next = slice(p, q + 1);
      const auto next_index = index_of(next), here_index = index_of(here);
      EchelonBasis outgoing, incoming;
      for (const Word& w : here) outgoing.insert(coordinates(d0_cyclic(CyclicPoly::word(w)), next_index));
      if (q > 0)
        for (const Word& w : slice(p, q - 1)) incoming.insert(coordinates(d0_cyclic(CyclicPoly::word(w)), here_index));
      BidegreeCohomology row{p, q, here.size(), here.size() - outgoing.rank() - incoming.rank(), {}};
      if (row.dim > 0)
        for (const Word& w : here)
          if (d0_cyclic(CyclicPoly::word(w)).is_zero() && !incoming.in_span(coordinates(CyclicPoly::word(w), here_index)))
            row.representatives.push_back(w);
      out.push_back(row);
    }
  return out;
}

}  // namespace qchar
