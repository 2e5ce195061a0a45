#include "qchar/bicomplex.hpp"

#include <functional>
#include <sstream>

#include "qchar/errors.hpp"
#include "qchar/linalg.hpp"

namespace qchar {

namespace {

constexpr Bidegree kLetterBidegree[kLetterCount] = {{0, 1}, {0, 2}, {1, 1}, {2, 0}, {1, 1}, {1, 2}, {2, 1}};

int digit(char c) { return c - '0'; }

}  // namespace

Bidegree letter_bidegree(int letter) {
  if (letter < 0 || letter >= kLetterCount) throw ValidationError("letter index out of range");
  return kLetterBidegree[letter];
}

int letter_parity(int letter) {
  const Bidegree b = letter_bidegree(letter);
  return (b.p + b.q) % 2;
}

void validate_letter_word(const LetterWord& w) {
  for (char c : w)
    if (c < '0' || c >= '0' + kLetterCount) throw ValidationError("letter words use digits 0..6: '" + w + "'");
}

Bidegree word_bidegree(const LetterWord& w) {
  Bidegree b;
  for (char c : w) {
    const Bidegree l = letter_bidegree(digit(c));
    b.p += l.p;
    b.q += l.q;
  }
  return b;
}

int word_parity(const LetterWord& w) {
  const Bidegree b = word_bidegree(w);
  return (b.p + b.q) % 2;
}

void accumulate(LetterPoly& p, const LetterWord& w, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = p.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

LetterPoly letter(int i, const Rational& c) {
  letter_bidegree(i);
  LetterPoly p;
  accumulate(p, LetterWord(1, static_cast<char>('0' + i)), c);
  return p;
}

LetterPoly multiply(const LetterPoly& x, const LetterPoly& y) {
  LetterPoly out;
  for (const auto& [u, a] : x)
    for (const auto& [v, b] : y) accumulate(out, u + v, a * b);
  return out;
}

namespace {

int poly_parity(const LetterPoly& p) {
  if (p.empty()) return 0;
  const int e = word_parity(p.begin()->first);
  for (const auto& [w, c] : p)
    if (word_parity(w) != e) throw ValidationError("inhomogeneous letter polynomial");
  return e;
}

LetterPoly scaled(LetterPoly p, const Rational& s) {
  if (s == 0) return {};
  for (auto& [w, c] : p) c *= s;
  return p;
}

LetterPoly sum(LetterPoly a, const LetterPoly& b) {
  for (const auto& [w, c] : b) accumulate(a, w, c);
  return a;
}

std::string render_word(const LetterWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (char c : w) {
    if (!out.empty()) out += " ";
    out += "a";
    out += c;
  }
  return out;
}

template <class Map, class Render>
std::string render_terms(const Map& terms, Render render_key) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms) {
    if (first)
      os << to_string(c);
    else if (c < 0)
      os << " - " << to_string(Rational(-c));
    else
      os << " + " << to_string(c);
    os << " " << render_key(key);
    first = false;
  }
  return os.str();
}

}  // namespace

LetterPoly commutator(const LetterPoly& x, const LetterPoly& y) {
  const int s = poly_parity(x) && poly_parity(y) ? 1 : -1;
  return sum(multiply(x, y), scaled(multiply(y, x), s));
}

std::string render(const LetterPoly& p) { return render_terms(p, render_word); }

bool Derivation::defined_on(const LetterWord& w) const {
  for (char c : w)
    if (!image[digit(c)]) return false;
  return true;
}

LetterPoly Derivation::apply(const LetterPoly& p) const {
  LetterPoly out;
  for (const auto& [w, c] : p) {
    validate_letter_word(w);
    int prefix = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const int l = digit(w[i]);
      if (!image[l]) throw ValidationError(name + " is undefined on a" + std::to_string(l));
      const Rational s = parity && prefix % 2 ? Rational(-c) : c;
      const LetterWord head = w.substr(0, i), tail = w.substr(i + 1);
      for (const auto& [v, b] : *image[l]) accumulate(out, head + v + tail, s * b);
      prefix += letter_parity(l);
    }
  }
  return out;
}

DerivationTables tabulated_tables() {
  auto a = [](int i, Rational c = 1) { return letter(i, c); };
  auto br = [](const LetterPoly& x, const LetterPoly& y) { return commutator(x, y); };
  const Rational half(1, 2);
  DerivationTables t;
  t.delta.name = "delta";
  t.delta.parity = 1;
  t.delta.image = {sum(multiply(a(0), a(0)), a(1, -half)),
                   br(a(0), a(1)),
                   sum(br(a(0), a(2)), a(5, -half)),
                   sum(br(a(0), a(3)), a(6, -1)),
                   LetterPoly{},
                   sum(br(a(0), a(5)), scaled(br(a(2), a(1)), -1)),
                   sum(br(a(0), a(6)), scaled(br(a(3), a(1)), -half))};
  t.nabla.name = "nabla";
  t.nabla.parity = 1;
  t.nabla.image = {sum(a(4), a(2, -1)), a(5), a(6), LetterPoly{}, sum(br(a(3), a(0)), a(6)), br(a(3), a(1)),
                   br(a(3), a(2))};
  t.iq.name = "i_Q";
  t.iq.parity = 0;
  t.iq.image = {LetterPoly{}, LetterPoly{}, a(1), a(2), std::nullopt, std::nullopt, std::nullopt};
  t.h1.name = "h1";
  t.h1.parity = 1;
  t.h1.image = {LetterPoly{}, a(0, -2), LetterPoly{}, LetterPoly{}, LetterPoly{}, a(2, -2), a(3, -1)};
  t.h2.name = "h2";
  t.h2.parity = 1;
  t.h2.image = {LetterPoly{}, LetterPoly{}, LetterPoly{}, LetterPoly{}, a(0), a(1), a(2)};
  return t;
}

DerivationTables engine_tables() {
  DerivationTables t = tabulated_tables();
  t.delta.image[5] = sum(commutator(letter(0), letter(5)), commutator(letter(2), letter(1)));
  t.delta.image[6] = sum(commutator(letter(0), letter(6)), scaled(commutator(letter(3), letter(1)), Rational(1, 2)));
  return t;
}

Bidegree key_bidegree(const VKey& key) {
  switch (key.kind) {
    case VKey::Kind::Trace: return word_bidegree(key.word);
    case VKey::Kind::F: return {2 * key.n - 1 - key.k, key.k};
    case VKey::Kind::Fbar: return {2 * key.n - 1 - key.k, key.k + 1};
  }
  return {};
}

std::string render(const VKey& key) {
  switch (key.kind) {
    case VKey::Kind::Trace: return "Str(" + render_word(key.word) + ")";
    case VKey::Kind::F: return "F(" + std::to_string(key.n) + "," + std::to_string(key.k) + ")";
    case VKey::Kind::Fbar: return "Fbar(" + std::to_string(key.n) + "," + std::to_string(key.k) + ")";
  }
  return {};
}

std::pair<LetterWord, int> canonical_trace(const LetterWord& w) {
  validate_letter_word(w);
  if (w.empty()) return {w, 1};
  const int total = word_parity(w);
  LetterWord best = w, cur = w;
  int best_sign = 1, sign = 1;
  bool vanishes = false;
  for (std::size_t step = 0; step < w.size(); ++step) {
    // Str(x rest) = (-1)^{|x||rest|} Str(rest x)
    const int x = letter_parity(digit(cur[0]));
    if (x && (total + x) % 2) sign = -sign;
    cur = cur.substr(1) + cur[0];
    if (cur == w && sign < 0) vanishes = true;
    if (cur < best) {
      best = cur;
      best_sign = sign;
    }
  }
  return {best, vanishes ? 0 : best_sign};
}

namespace {

void check_f(int n, int k, int kmax) {
  if (n < 1 || n > 3) throw ValidationError("F letters are adjoined for n = 1, 2, 3");
  if (k < 0 || k > kmax) throw ValidationError("F letter index out of range");
}

}  // namespace

Covariant Covariant::str(const LetterWord& w, const Rational& c) {
  Covariant x;
  auto [canon, sign] = canonical_trace(w);
  if (sign != 0) x.add({VKey::Kind::Trace, canon, 0, 0}, c * sign);
  return x;
}

Covariant Covariant::str(const LetterPoly& p) {
  Covariant x;
  for (const auto& [w, c] : p) x += str(w, c);
  return x;
}

Covariant Covariant::f(int n, int k, const Rational& c) {
  check_f(n, k, 2 * n - 1);
  Covariant x;
  x.add({VKey::Kind::F, "", n, k}, c);
  return x;
}

Covariant Covariant::fbar(int n, int k, const Rational& c) {
  check_f(n, k, 2 * n - 2);
  Covariant x;
  x.add({VKey::Kind::Fbar, "", n, k}, c);
  return x;
}

Rational Covariant::coefficient(const VKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Covariant::add(const VKey& key, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.try_emplace(key, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Covariant& Covariant::operator+=(const Covariant& other) {
  for (const auto& [key, c] : other.terms_) add(key, c);
  return *this;
}

Covariant& Covariant::operator*=(const Rational& s) {
  if (s == 0) terms_.clear();
  for (auto& [key, c] : terms_) c *= s;
  return *this;
}

std::string Covariant::to_string() const {
  return render_terms(terms_, [](const VKey& k) { return render(k); });
}

namespace {

Covariant trace_apply(const Derivation& der, const Covariant& x) {
  Covariant out;
  for (const auto& [key, c] : x.terms()) {
    if (key.kind != VKey::Kind::Trace) throw ValidationError(der.name + " acts on traced words only");
    out += Covariant::str(der.apply(LetterPoly{{key.word, c}}));
  }
  return out;
}

Covariant only_traces(const Covariant& x) {
  Covariant out;
  for (const auto& [key, c] : x.terms())
    if (key.kind == VKey::Kind::Trace) out.add(key, c);
  return out;
}

Covariant only_letters(const Covariant& x) {
  Covariant out;
  for (const auto& [key, c] : x.terms())
    if (key.kind != VKey::Kind::Trace) out.add(key, c);
  return out;
}

}  // namespace

Covariant contracted_pontryagin(int n, int k, const Convention& c) {
  Covariant x = Covariant::str(LetterWord(n, '3'));
  for (int i = 0; i < k; ++i) x = trace_apply(c.tables.iq, x);
  return x;
}

Covariant apply_iq(const Covariant& x, const Convention& c) { return trace_apply(c.tables.iq, x); }

Covariant apply_delta(const Covariant& x, const Convention& c) {
  Covariant out = trace_apply(c.tables.delta, only_traces(x));
  const Covariant letters = only_letters(x);
  for (const auto& [key, coef] : letters.terms()) {
    if (key.kind == VKey::Kind::Fbar) continue;
    if (key.k < 2 * key.n - 1) {
      out += Covariant::fbar(key.n, key.k, coef);
    } else {
      const Rational t = c.f == FRelations::Tabulated ? Rational(1) : Rational(1, 2 * key.n);
      out += contracted_pontryagin(key.n, 2 * key.n, c) * (t * coef);
    }
  }
  return out;
}

Covariant apply_d(const Covariant& x, const Convention& c) {
  Covariant out = trace_apply(c.tables.nabla, only_traces(x));
  const int s = c.f == FRelations::Tabulated ? 1 : -1;
  const Covariant letters = only_letters(x);
  for (const auto& [key, coef] : letters.terms()) {
    if (key.kind == VKey::Kind::F) {
      if (key.k > 0) out += Covariant::fbar(key.n, key.k - 1, coef * s * key.k);
      out += contracted_pontryagin(key.n, key.k, c) * coef;
    } else {
      out += apply_delta(contracted_pontryagin(key.n, key.k, c), c) * Rational(-coef);
    }
  }
  return out;
}

std::vector<LetterWord> trace_basis(Bidegree b) {
  std::vector<LetterWord> out;
  std::function<void(LetterWord&, int, int)> grow = [&](LetterWord& w, int p, int q) {
    if (p == 0 && q == 0) {
      auto [canon, sign] = canonical_trace(w);
      if (sign != 0 && canon == w) out.push_back(w);
      return;
    }
    for (int l = 0; l < kLetterCount; ++l) {
      const Bidegree lb = kLetterBidegree[l];
      if (lb.p > p || lb.q > q) continue;
      w.push_back(static_cast<char>('0' + l));
      grow(w, p - lb.p, q - lb.q);
      w.pop_back();
    }
  };
  if (b.p < 0 || b.q < 0 || (b.p == 0 && b.q == 0)) return out;
  LetterWord w;
  grow(w, b.p, b.q);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LetterWord> trace_words(std::size_t max_len) {
  std::vector<LetterWord> out;
  std::function<void(LetterWord&)> grow = [&](LetterWord& w) {
    if (!w.empty()) {
      auto [canon, sign] = canonical_trace(w);
      if (sign != 0 && canon == w) out.push_back(w);
    }
    if (w.size() == max_len) return;
    for (int l = 0; l < kLetterCount; ++l) {
      w.push_back(static_cast<char>('0' + l));
      grow(w);
      w.pop_back();
    }
  };
  LetterWord w;
  grow(w);
  return out;
}

namespace {

void record(PropertyResult& r, const std::string& what, const Covariant& value) {
  ++r.checked;
  if (value.is_zero()) return;
  if (r.failures++ == 0) r.first_failure = what + " = " + value.to_string();
}

std::vector<Covariant> f_letters() {
  std::vector<Covariant> out;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= 2 * n - 1; ++k) out.push_back(Covariant::f(n, k));
    for (int k = 0; k <= 2 * n - 2; ++k) out.push_back(Covariant::fbar(n, k));
  }
  return out;
}

}  // namespace

std::vector<PropertyResult> check_bicomplex(std::size_t max_len, const Convention& c) {
  PropertyResult free_sq{"delta^2 = 0 on letters"};
  for (int l = 0; l < kLetterCount; ++l) {
    const LetterPoly v = c.tables.delta.apply(c.tables.delta.apply(letter(l)));
    ++free_sq.checked;
    if (!v.empty() && free_sq.failures++ == 0)
      free_sq.first_failure = "delta^2 a" + std::to_string(l) + " = " + render(v);
  }
  PropertyResult dd{"d^2 = 0"}, deltadelta{"delta^2 = 0"}, anti{"d delta + delta d = 0"};
  std::vector<Covariant> elements;
  for (const LetterWord& w : trace_words(max_len)) elements.push_back(Covariant::str(w));
  for (const Covariant& f : f_letters()) elements.push_back(f);
  for (const Covariant& x : elements) {
    const std::string name = x.to_string();
    const Covariant dx = apply_d(x, c), deltax = apply_delta(x, c);
    record(dd, "d^2 " + name, apply_d(dx, c));
    record(deltadelta, "delta^2 " + name, apply_delta(deltax, c));
    record(anti, "(d delta + delta d) " + name, apply_d(deltax, c) + apply_delta(dx, c));
  }
  PropertyResult closed{"delta Str a4^n = 0 and d Str a3^n = 0"};
  PropertyResult cartan{"delta P_n + d i_Q P_n = 0"};
  for (int n = 1; n <= 3; ++n) {
    record(closed, "delta Str a4^" + std::to_string(n), apply_delta(Covariant::str(LetterWord(n, '4')), c));
    record(closed, "d Str a3^" + std::to_string(n), apply_d(Covariant::str(LetterWord(n, '3')), c));
    const Covariant p = contracted_pontryagin(n, 0, c);
    record(cartan, "P_" + std::to_string(n), apply_delta(p, c) + apply_d(apply_iq(p, c), c));
  }
  return {free_sq, deltadelta, dd, anti, closed, cartan};
}

bool HomotopyReport::all_hold() const {
  for (const auto& l : letters)
    if (!l.holds()) return false;
  for (const auto& k : kernels)
    if (!k.holds()) return false;
  return true;
}

HomotopyReport homotopy_check(std::size_t max_len, const Convention& c) {
  const auto& t = c.tables;
  auto a = [](int i, Rational s = 1) { return letter(i, s); };
  const std::array<LetterPoly, kLetterCount> expected1 = {
      a(0),
      sum(a(1), multiply(a(0), a(0, 2))),
      a(2),
      a(3),
      LetterPoly{},
      sum(a(5), scaled(commutator(a(0), a(2)), 2)),
      sum(a(6), commutator(a(0), a(3)))};
  HomotopyReport report;
  for (int l = 0; l < kLetterCount; ++l) {
    const LetterPoly x = a(l);
    report.letters.push_back(
        {"Delta1 a" + std::to_string(l), expected1[l], sum(t.h1.apply(t.delta.apply(x)), t.delta.apply(t.h1.apply(x)))});
  }
  for (int l = 0; l < kLetterCount; ++l) {
    const LetterPoly x = a(l);
    report.letters.push_back({"Delta2 a" + std::to_string(l), l == 3 ? LetterPoly{} : x,
                              sum(t.h2.apply(t.nabla.apply(x)), t.nabla.apply(t.h2.apply(x)))});
  }
  auto delta1 = [&](const Covariant& x) {
    return trace_apply(t.h1, apply_delta(x, c)) + apply_delta(trace_apply(t.h1, x), c);
  };
  auto delta2 = [&](const Covariant& x) { return trace_apply(t.h2, apply_d(x, c)) + apply_d(trace_apply(t.h2, x), c); };
  PropertyResult k1{"ker Delta1 = span Str a4^n"}, k2{"ker Delta2 = span Str a3^n"};
  PropertyResult counting{"Delta2 Str w = (letters other than a3) Str w"};
  const int max_total = static_cast<int>(max_len);
  for (int p = 0; p <= max_total; ++p)
    for (int q = 0; p + q <= max_total; ++q) {
      const auto basis = trace_basis({p, q});
      if (basis.empty()) continue;
      std::map<VKey, std::size_t> index;
      for (std::size_t i = 0; i < basis.size(); ++i) index[{VKey::Kind::Trace, basis[i], 0, 0}] = i;
      auto kernel_dim = [&](const std::function<Covariant(const Covariant&)>& op) {
        EchelonBasis image;
        for (const LetterWord& w : basis) {
          const Covariant y = op(Covariant::str(w));
          std::map<std::size_t, Rational> row;
          for (const auto& [key, v] : y.terms()) row[index.at(key)] = v;
          image.insert(make_sparse(row));
        }
        return basis.size() - image.rank();
      };
      const std::string where = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
      const std::size_t expect1 = p == q ? 1 : 0, expect2 = q == 0 && p % 2 == 0 ? 1 : 0;
      Covariant miss1, miss2;
      if (kernel_dim(delta1) != expect1) miss1 = Covariant::str(basis.front());
      if (kernel_dim(delta2) != expect2) miss2 = Covariant::str(basis.front());
      record(k1, "kernel dimension mismatch at " + where + " on", miss1);
      record(k2, "kernel dimension mismatch at " + where + " on", miss2);
      if (expect1) record(k1, "Delta1 Str a4^" + std::to_string(p), delta1(Covariant::str(LetterWord(p, '4'))));
      if (expect2) record(k2, "Delta2 Str a3^" + std::to_string(p / 2), delta2(Covariant::str(LetterWord(p / 2, '3'))));
      for (const LetterWord& w : basis) {
        const auto others = static_cast<long>(w.size() - std::count(w.begin(), w.end(), '3'));
        record(counting, "Delta2 Str(" + w + ")", delta2(Covariant::str(w)) - Covariant::str(w, others));
      }
    }
  report.kernels = {k1, k2, counting};
  return report;
}

std::vector<BidegreeRow> small_degree_cohomology(int max_total, const Convention& c) {
  if (max_total > 4) throw BudgetError("bicomplex cohomology is computed for p + q <= 4");
  std::map<Bidegree, std::vector<LetterWord>> bases;
  auto basis = [&](Bidegree b) -> const std::vector<LetterWord>& {
    auto it = bases.find(b);
    if (it == bases.end()) it = bases.emplace(b, trace_basis(b)).first;
    return it->second;
  };
  // Rank of op: W^from -> W^to.
  auto op_rank = [&](Bidegree from, Bidegree to, bool is_delta) {
    const auto& src = basis(from);
    const auto& dst = basis(to);
    std::map<LetterWord, std::size_t> index;
    for (std::size_t i = 0; i < dst.size(); ++i) index[dst[i]] = i;
    EchelonBasis image;
    for (const LetterWord& w : src) {
      const Covariant x = Covariant::str(w);
      const Covariant y = is_delta ? apply_delta(x, c) : apply_d(x, c);
      std::map<std::size_t, Rational> row;
      for (const auto& [key, v] : y.terms()) row[index.at(key.word)] = v;
      image.insert(make_sparse(row));
    }
    return image.rank();
  };
  std::vector<BidegreeRow> rows;
  for (int total = 1; total <= max_total; ++total)
    for (int p = 0; p <= total; ++p) {
      const int q = total - p;
      BidegreeRow row;
      row.degree = {p, q};
      row.dim_chains = basis({p, q}).size();
      const std::size_t ker_delta = row.dim_chains - op_rank({p, q}, {p, q + 1}, true);
      const std::size_t ker_d = row.dim_chains - op_rank({p, q}, {p + 1, q}, false);
      const std::size_t in_delta = q > 0 ? op_rank({p, q - 1}, {p, q}, true) : 0;
      const std::size_t in_d = p > 0 ? op_rank({p - 1, q}, {p, q}, false) : 0;
      if (in_delta > ker_delta || in_d > ker_d) throw ConsistencyError("differential does not square to zero");
      row.h_delta = ker_delta - in_delta;
      row.h_d = ker_d - in_d;
      row.expected_delta = p == q ? 1 : 0;
      row.expected_d = q == 0 && p % 2 == 0 ? 1 : 0;
      rows.push_back(row);
    }
  return rows;
}

std::string status_name(RepresentativeReport::Status s) {
  switch (s) {
    case RepresentativeReport::Status::Exact: return "exact";
    case RepresentativeReport::Status::Solved: return "solved";
    case RepresentativeReport::Status::Failed: return "failed";
  }
  return {};
}

namespace {

RepresentativeTerm trace_term(bool delta_side, const LetterWord& w, const Rational& tabulated) {
  return {delta_side, {VKey::Kind::Trace, w, 0, 0}, tabulated, tabulated};
}

RepresentativeTerm f_term(bool delta_side, int n, int k, const Rational& tabulated) {
  return {delta_side, {VKey::Kind::F, "", n, k}, tabulated, tabulated};
}

std::vector<RepresentativeTerm> tabulated_identity(int n) {
  using R = Rational;
  switch (n) {
    case 1: return {f_term(true, 1, 0, R(-1, 2)), trace_term(false, "0", 1), f_term(false, 1, 1, 1)};
    case 2:
      return {trace_term(true, "30", 1), f_term(true, 2, 1, R(1, 4)), trace_term(false, "04", 1),
              trace_term(false, "02", -1), f_term(false, 2, 2, R(1, 8))};
    case 3: {
      const R q(3, 4);
      return {trace_term(true, "304", q),         trace_term(true, "340", q),
              trace_term(true, "302", -q),        trace_term(true, "320", -q),
              f_term(true, 3, 2, q * R(-1, 12)),  trace_term(false, "044", 1),
              trace_term(false, "042", R(-1, 2)), trace_term(false, "024", R(-1, 2)),
              trace_term(false, "022", 1),        trace_term(false, "3000", R(1, 2)),
              trace_term(false, "310", R(3, 8)),  trace_term(false, "130", R(3, 8)),
              f_term(false, 3, 3, R(-1, 48))};
    }
    default: throw ValidationError("representatives are tabulated for n = 1, 2, 3");
  }
}

Covariant element(const VKey& key) {
  return key.kind == VKey::Kind::Trace ? Covariant::str(key.word) : Covariant::f(key.n, key.k);
}

}  // namespace

RepresentativeReport verify_exact_representatives(int n, const Convention& c) {
  RepresentativeReport report;
  report.n = n;
  report.terms = tabulated_identity(n);
  const Covariant cn = Covariant::str(LetterWord(n, '4'));
  const Bidegree target{n, n};
  std::vector<Covariant> images;
  for (const auto& t : report.terms) {
    const Covariant x = element(t.key);
    const Covariant y = t.delta_side ? apply_delta(x, c) : apply_d(x, c) * Rational(-1);
    for (const auto& [key, v] : y.terms())
      if (key_bidegree(key) != target) throw ConsistencyError("representative term leaves bidegree (n,n)");
    images.push_back(y);
  }
  report.tabulated_residual = cn;
  for (std::size_t i = 0; i < images.size(); ++i) report.tabulated_residual += images[i] * report.terms[i].tabulated;
  if (report.tabulated_residual.is_zero()) {
    report.status = RepresentativeReport::Status::Exact;
  }
  std::map<VKey, std::size_t> index;
  auto idx = [&](const VKey& k) { return index.try_emplace(k, index.size()).first->second; };
  for (const auto& [key, v] : cn.terms()) idx(key);
  for (const auto& y : images)
    for (const auto& [key, v] : y.terms()) idx(key);
  std::vector<std::map<std::size_t, Rational>> rows(index.size());
  std::vector<Rational> rhs(index.size(), 0);
  for (std::size_t u = 0; u < images.size(); ++u)
    for (const auto& [key, v] : images[u].terms()) rows[index.at(key)][u] = v;
  for (const auto& [key, v] : cn.terms()) rhs[index.at(key)] = -v;
  LinearSystem sys;
  sys.unknowns = images.size();
  for (std::size_t r = 0; r < rows.size(); ++r) sys.add_equation(make_sparse(rows[r]), rhs[r]);
  report.unique = nullity(sys) == 0;
  if (report.status == RepresentativeReport::Status::Exact) return report;
  std::vector<Rational> defaults;
  for (const auto& t : report.terms) defaults.push_back(t.tabulated);
  const auto x = solve(sys, &defaults);
  if (!x) {
    for (auto& t : report.terms) t.computed = 0;
    return report;
  }
  for (std::size_t u = 0; u < images.size(); ++u) report.terms[u].computed = (*x)[u];
  report.status = RepresentativeReport::Status::Solved;
  return report;
}

}  // namespace qchar
