#include "qchar/superalg.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "qchar/errors.hpp"

namespace qchar {

OddDomain OddDomain::standard(std::size_t q) {
  OddDomain d;
  for (std::size_t a = 0; a < q; ++a) d.names.push_back("c" + std::to_string(a));
  return d;
}

void OddDomain::validate() const {
  if (names.size() > kMaxGenerators) throw ValidationError("odd domain too large");
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) throw ValidationError("duplicate generator names");
}

int monomial_degree(Monomial m) { return std::popcount(m); }

std::vector<int> monomial_indices(Monomial m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1u) out.push_back(i);
  return out;
}

int monomial_product_sign(Monomial m1, Monomial m2) {
  if (m1 & m2) return 0;
  int swaps = 0;
  for (Monomial rest = m2; rest; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    swaps += std::popcount(m1 >> (j + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

GrassmannPolynomial::GrassmannPolynomial(std::size_t q) : q_(q) {
  if (q > kMaxGenerators) throw ValidationError("odd domain too large");
}

GP GrassmannPolynomial::constant(std::size_t q, const Rational& value) {
  GP f(q);
  f.add_term(0, value);
  return f;
}

GP GrassmannPolynomial::generator(std::size_t q, std::size_t a) {
  if (a >= q) throw ValidationError("generator index out of range");
  GP f(q);
  f.add_term(Monomial(1) << a, 1);
  return f;
}

GP GrassmannPolynomial::monomial(std::size_t q, Monomial m, const Rational& coef) {
  GP f(q);
  f.add_term(m, coef);
  return f;
}

Rational GrassmannPolynomial::coefficient(Monomial m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void GrassmannPolynomial::add_term(Monomial m, const Rational& coef) {
  if (coef == 0) return;
  if (q_ < 32 && (m >> q_) != 0) throw ValidationError("monomial outside domain");
  auto [it, fresh] = terms_.try_emplace(m, coef);
  if (!fresh) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

int GrassmannPolynomial::parity() const {
  int p = -1;
  for (const auto& [m, c] : terms_) {
    int pm = monomial_degree(m) & 1;
    if (p == -1)
      p = pm;
    else if (p != pm)
      return -1;
  }
  return p;
}

GP GrassmannPolynomial::parity_part(int p) const {
  GP out(q_);
  for (const auto& [m, c] : terms_)
    if ((monomial_degree(m) & 1) == p) out.terms_.emplace(m, c);
  return out;
}

GP GrassmannPolynomial::degree_part(int d) const {
  GP out(q_);
  for (const auto& [m, c] : terms_)
    if (monomial_degree(m) == d) out.terms_.emplace(m, c);
  return out;
}

GP GrassmannPolynomial::derivative(std::size_t a) const {
  GP out(q_);
  const Monomial bit = Monomial(1) << a;
  for (const auto& [m, c] : terms_) {
    if (!(m & bit)) continue;
    int before = std::popcount(m & (bit - 1));
    out.add_term(m ^ bit, (before & 1) ? Rational(-c) : c);
  }
  return out;
}

GP GrassmannPolynomial::substitute(const std::vector<GP>& images) const {
  if (images.size() != q_) throw ValidationError("substitution arity mismatch");
  std::size_t target_q = images.empty() ? 0 : images[0].q();
  for (const auto& g : images) {
    if (g.q() != target_q) throw ValidationError("substitution images on different domains");
    if (!g.is_zero() && g.parity() != 1) throw ValidationError("substitution image not odd");
  }
  GP out(target_q);
  for (const auto& [m, c] : terms_) {
    GP term = GP::constant(target_q, c);
    for (int i : monomial_indices(m)) term = term * images[i];
    out += term;
  }
  return out;
}

GP& GrassmannPolynomial::operator+=(const GP& other) {
  if (other.q_ != q_) throw ValidationError("mismatched odd domains");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

GP& GrassmannPolynomial::operator-=(const GP& other) {
  if (other.q_ != q_) throw ValidationError("mismatched odd domains");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

GP& GrassmannPolynomial::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

GP GrassmannPolynomial::operator-() const {
  GP out = *this;
  return out *= Rational(-1);
}

GP operator*(const GP& a, const GP& b) {
  if (a.q_ != b.q_) throw ValidationError("mismatched odd domains");
  GP out(a.q_);
  for (const auto& [m1, c1] : a.terms_)
    for (const auto& [m2, c2] : b.terms_) {
      int s = monomial_product_sign(m1, m2);
      if (s == 0) continue;
      Rational c = c1 * c2;
      if (s < 0) c = -c;
      out.add_term(m1 | m2, c);
    }
  return out;
}

GP gp_multiply(const GP& f, const GP& g) { return f * g; }

namespace {

std::string monomial_string(Monomial m, const OddDomain* domain) {
  std::string s;
  for (int i : monomial_indices(m)) {
    if (!s.empty()) s += "*";
    s += domain ? domain->names.at(i) : "c" + std::to_string(i);
  }
  return s;
}

std::string gp_string(const GP& f, const OddDomain* domain) {
  if (f.is_zero()) return "0";
  std::vector<std::pair<Monomial, Rational>> terms(f.terms().begin(), f.terms().end());
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
    int dx = monomial_degree(x.first), dy = monomial_degree(y.first);
    if (dx != dy) return dx < dy;
    return monomial_indices(x.first) < monomial_indices(y.first);
  });
  std::string out;
  for (const auto& [m, c] : terms) {
    bool neg = c < 0;
    Rational mag = neg ? Rational(-c) : c;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (m == 0)
      out += to_string(mag);
    else if (mag == 1)
      out += monomial_string(m, domain);
    else
      out += to_string(mag) + "*" + monomial_string(m, domain);
  }
  return out;
}

}  // namespace

std::string GrassmannPolynomial::to_string(const OddDomain& domain) const { return gp_string(*this, &domain); }
std::string GrassmannPolynomial::to_string() const { return gp_string(*this, nullptr); }

int koszul_sign(const std::vector<std::size_t>& permutation, const std::vector<int>& parities) {
  const std::size_t n = permutation.size();
  if (parities.size() != n) throw ValidationError("koszul_sign: parity count mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t p : permutation) {
    if (p >= n || seen[p]) throw ValidationError("koszul_sign: not a permutation");
    seen[p] = true;
  }
  int sign = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (permutation[i] > permutation[j] && (parities[permutation[i]] & 1) &&
          (parities[permutation[j]] & 1))
        sign = -sign;
  return sign;
}

VectorField::VectorField(std::size_t q, int parity) : components_(q, GP(q)), parity_(parity & 1) {}

VectorField::VectorField(std::vector<GP> components, int parity)
    : components_(std::move(components)), parity_(parity & 1) {
  validate();
}

void VectorField::set_component(std::size_t a, GP value) {
  if (a >= components_.size() || value.q() != components_.size())
    throw ValidationError("vector field component out of range");
  components_[a] = std::move(value);
}

bool VectorField::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](const GP& f) { return f.is_zero(); });
}

void VectorField::validate() const {
  const std::size_t q = components_.size();
  for (const auto& f : components_) {
    if (f.q() != q) throw ValidationError("vector field component on wrong domain");
    if (f.is_zero()) continue;
    if (f.parity() != ((parity_ + 1) & 1))
      throw ValidationError("vector field component parity inconsistent with field parity");
  }
}

GP VectorField::apply(const GP& f) const {
  if (f.q() != q()) throw ValidationError("mismatched odd domains");
  GP out(q());
  for (std::size_t a = 0; a < q(); ++a) {
    if (components_[a].is_zero()) continue;
    GP df = f.derivative(a);
    if (!df.is_zero()) out += components_[a] * df;
  }
  return out;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  if (other.q() != q()) throw ValidationError("mismatched odd domains");
  if (other.parity_ != parity_) throw ValidationError("adding vector fields of different parity");
  for (std::size_t a = 0; a < q(); ++a) components_[a] += other.components_[a];
  return *this;
}

VectorField& VectorField::operator*=(const Rational& s) {
  for (auto& f : components_) f *= s;
  return *this;
}

std::string VectorField::to_string(const OddDomain& domain) const {
  std::string out;
  for (std::size_t a = 0; a < q(); ++a) {
    if (components_[a].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + components_[a].to_string(domain) + ")*d/d" + domain.names.at(a);
  }
  return out.empty() ? "0" : out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.q() != y.q()) throw ValidationError("mismatched odd domains");
  const int parity = (x.parity() + y.parity()) & 1;
  const bool both_odd = x.parity() && y.parity();
  VectorField out(x.q(), parity);
  for (std::size_t b = 0; b < x.q(); ++b) {
    GP c = x.apply(y.component(b));
    GP d = y.apply(x.component(b));
    if (both_odd)
      c += d;
    else
      c -= d;
    out.set_component(b, c);
  }
  return out;
}

bool is_homological(const VectorField& q) {
  if (q.parity() != 1) throw ValidationError("is_homological: field is even");
  q.validate();
  return lie_bracket(q, q).is_zero();
}

TensorField::TensorField(std::size_t q, std::size_t lower, std::size_t upper)
    : q_(q), lower_(lower), upper_(upper) {}

TensorField TensorField::scalar(const GP& f) {
  TensorField t(f.q(), 0, 0);
  t.add_component({}, f);
  return t;
}

GP TensorField::component(const TensorIndex& index) const {
  auto it = components_.find(index);
  return it == components_.end() ? GP(q_) : it->second;
}

void TensorField::add_component(const TensorIndex& index, const GP& value) {
  if (index.size() != lower_ + upper_) throw ValidationError("tensor index arity mismatch");
  if (value.q() != q_) throw ValidationError("mismatched odd domains");
  for (auto i : index)
    if (i >= q_) throw ValidationError("tensor index out of range");
  if (value.is_zero()) return;
  auto [it, fresh] = components_.try_emplace(index, value);
  if (!fresh) {
    it->second += value;
    if (it->second.is_zero()) components_.erase(it);
  }
}

int TensorField::parity() const {
  int p = -1;
  for (const auto& [idx, f] : components_) {
    int pf = f.parity();
    if (pf < 0) return -1;
    pf = (pf + static_cast<int>(lower_ + upper_)) & 1;
    if (p == -1)
      p = pf;
    else if (p != pf)
      return -1;
  }
  return p;
}

TensorField TensorField::parity_part(int p) const {
  TensorField out(q_, lower_, upper_);
  const int shift = static_cast<int>(lower_ + upper_) & 1;
  for (const auto& [idx, f] : components_) out.add_component(idx, f.parity_part((p + shift) & 1));
  return out;
}

TensorField& TensorField::operator+=(const TensorField& other) {
  if (other.q_ != q_ || other.lower_ != lower_ || other.upper_ != upper_)
    throw ValidationError("adding tensors of different type");
  for (const auto& [idx, f] : other.components_) add_component(idx, f);
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& other) { return *this += other * Rational(-1); }

TensorField& TensorField::operator*=(const Rational& s) {
  if (s == 0) {
    components_.clear();
    return *this;
  }
  for (auto& [idx, f] : components_) f *= s;
  return *this;
}

std::string TensorField::to_string(const OddDomain& domain) const {
  if (components_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, f] : components_) {
    if (!first) os << "\n";
    first = false;
    os << "[";
    for (std::size_t k = 0; k < lower_; ++k) os << (k ? "," : "") << int(idx[k]);
    os << ";";
    for (std::size_t k = 0; k < upper_; ++k) os << (k ? "," : "") << int(idx[lower_ + k]);
    os << "] " << f.to_string(domain);
  }
  return os.str();
}

TensorField lie_derivative(const VectorField& q, const TensorField& t) {
  if (q.q() != t.q()) throw ValidationError("mismatched odd domains");
  if (q.parity() != 1) throw ValidationError("lie_derivative: field must be odd");
  const std::size_t dim = q.q();
  std::vector<std::vector<GP>> dq(dim, std::vector<GP>(dim));
  for (std::size_t l = 0; l < dim; ++l)
    for (std::size_t i = 0; i < dim; ++i) dq[l][i] = q.component(i).derivative(l);
  TensorField out(dim, t.lower(), t.upper());
  const std::size_t n = t.lower();
  for (const auto& [idx, f] : t.components()) {
    out.add_component(idx, q.apply(f));
    for (int p = 0; p < 2; ++p) {
      GP fp = f.parity_part(p);
      if (fp.is_zero()) continue;
      if (p) fp *= Rational(-1);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        TensorIndex moved = idx;
        for (std::size_t l = 0; l < dim; ++l) {
          moved[k] = static_cast<std::uint8_t>(l);
          if (k < n) {
            // L_Q e^i = -(d_l Q^i) e^l
            const GP& g = dq[l][idx[k]];
            if (!g.is_zero()) out.add_component(moved, -(fp * g));
          } else {
            // L_Q d_j = (d_j Q^l) d_l
            const GP& g = dq[idx[k]][l];
            if (!g.is_zero()) out.add_component(moved, fp * g);
          }
        }
      }
    }
  }
  return out;
}

TensorField tensor_product(const TensorField& s, const TensorField& t) { return tensor_product(s, t, {}); }

TensorField tensor_product(const TensorField& s, const TensorField& t,
                           const std::vector<std::pair<std::size_t, std::size_t>>& diagonal) {
  if (s.q() != t.q()) throw ValidationError("mismatched odd domains");
  for (const auto& [i, j] : diagonal)
    if (i >= s.lower() + t.lower() || j >= s.upper() + t.upper())
      throw ValidationError("tensor_product: diagonal slot out of range");
  const std::size_t ns = s.lower(), ms = s.upper(), nt = t.lower(), mt = t.upper();
  TensorField out(s.q(), ns + nt, ms + mt);
  const int frame_sign = ((ms * nt) & 1) ? -1 : 1;
  for (const auto& [is, fs] : s.components())
    for (const auto& [it, ft] : t.components()) {
      TensorIndex idx;
      idx.insert(idx.end(), is.begin(), is.begin() + ns);
      idx.insert(idx.end(), it.begin(), it.begin() + nt);
      idx.insert(idx.end(), is.begin() + ns, is.end());
      idx.insert(idx.end(), it.begin() + nt, it.end());
      bool keep = true;
      for (const auto& [i, j] : diagonal) keep = keep && idx[i] == idx[ns + nt + j];
      if (!keep) continue;
      for (int p = 0; p < 2; ++p) {
        GP tp = ft.parity_part(p);
        if (tp.is_zero()) continue;
        int sign = frame_sign;
        if (p && ((ns + ms) & 1)) sign = -sign;
        GP prod = fs * tp;
        if (sign < 0) prod *= Rational(-1);
        out.add_component(idx, prod);
      }
    }
  return out;
}

TensorField contract(const TensorField& t, std::size_t lower_slot, std::size_t upper_slot) {
  const std::size_t n = t.lower(), m = t.upper();
  if (lower_slot >= n || upper_slot >= m) throw ValidationError("contract: slot out of range");
  TensorField out(t.q(), n - 1, m - 1);
  const bool negate = ((n - 1 - lower_slot) + upper_slot) & 1;
  for (const auto& [idx, f] : t.components()) {
    if (idx[lower_slot] != idx[n + upper_slot]) continue;
    TensorIndex reduced;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (k != lower_slot && k != n + upper_slot) reduced.push_back(idx[k]);
    out.add_component(reduced, negate ? -f : f);
  }
  return out;
}

TensorField permute_slots(const TensorField& t, const std::vector<std::size_t>& lower_perm,
                          const std::vector<std::size_t>& upper_perm) {
  const std::size_t n = t.lower(), m = t.upper();
  if (lower_perm.size() != n || upper_perm.size() != m) throw ValidationError("permute_slots: wrong arity");
  std::vector<int> odd_n(n, 1), odd_m(m, 1);
  const int sign = koszul_sign(lower_perm, odd_n) * koszul_sign(upper_perm, odd_m);
  TensorField out(t.q(), n, m);
  for (const auto& [idx, f] : t.components()) {
    TensorIndex moved(idx.size());
    for (std::size_t i = 0; i < n; ++i) moved[i] = idx[lower_perm[i]];
    for (std::size_t j = 0; j < m; ++j) moved[n + j] = idx[n + upper_perm[j]];
    out.add_component(moved, sign < 0 ? -f : f);
  }
  return out;
}

TensorField compose(const TensorField& a, const TensorField& b) {
  if (a.lower() != 1 || a.upper() != 1 || b.lower() != 1 || b.upper() != 1)
    throw ValidationError("compose: (1,1) tensors required");
  // contract pairs e^a d_b; composition pairs d_b e^a, which differs by a sign
  return contract(tensor_product(b, a), 1, 0) * Rational(-1);
}

GP supertrace(const TensorField& t) {
  if (t.lower() != 1 || t.upper() != 1) throw ValidationError("supertrace: (1,1) tensor required");
  GP out(t.q());
  for (const auto& [idx, f] : t.components())
    if (idx[0] == idx[1]) out -= f;
  return out;
}

TensorField identity_endomorphism(std::size_t q) {
  TensorField t(q, 1, 1);
  for (std::size_t a = 0; a < q; ++a)
    t.add_component({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(a)}, GP::constant(q, 1));
  return t;
}

TensorField derivative_tensor(const VectorField& q, std::size_t n) {
  const std::size_t dim = q.q();
  TensorField out(dim, n, 1);
  TensorIndex idx(n + 1, 0);
  // Odometer over the lower indices; repeated indices vanish for odd coordinates.
  std::vector<std::size_t> digits(n, 0);
  while (true) {
    bool distinct = true;
    for (std::size_t a = 0; a < n && distinct; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (digits[a] == digits[b]) distinct = false;
    if (distinct)
      for (std::size_t j = 0; j < dim; ++j) {
        GP f = q.component(j);
        for (std::size_t a = n; a-- > 0 && !f.is_zero();) f = f.derivative(digits[a]);
        if (f.is_zero()) continue;
        for (std::size_t a = 0; a < n; ++a) idx[a] = static_cast<std::uint8_t>(digits[a]);
        idx[n] = static_cast<std::uint8_t>(j);
        out.add_component(idx, f);
      }
    std::size_t pos = 0;
    while (pos < n && ++digits[pos] == dim) digits[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

}  // namespace qchar

#include "qchar/random.hpp"

namespace qchar {

GP random_polynomial(Rng& rng, std::size_t q, int parity, unsigned percent, int max_degree) {
  GP f(q);
  for (Monomial m = 0; m < (Monomial(1) << q); ++m) {
    int d = monomial_degree(m);
    if ((d & 1) != (parity & 1)) continue;
    if (max_degree >= 0 && d > max_degree) continue;
    if (!rng.chance(percent)) continue;
    long c = rng.uniform(-3, 3);
    if (c != 0) f.add_term(m, Rational(c));
  }
  return f;
}

TensorField random_tensor(Rng& rng, std::size_t q, std::size_t lower, std::size_t upper,
                          int parity, unsigned percent) {
  TensorField t(q, lower, upper);
  const std::size_t slots = lower + upper;
  const int coef_parity = (parity + static_cast<int>(slots)) & 1;
  TensorIndex idx(slots, 0);
  while (true) {
    if (rng.chance(percent)) t.add_component(idx, random_polynomial(rng, q, coef_parity, 30));
    std::size_t pos = 0;
    while (pos < slots && ++idx[pos] == q) idx[pos++] = 0;
    if (pos == slots) break;
  }
  return t;
}

VectorField random_vector_field(Rng& rng, std::size_t q, int parity, unsigned percent) {
  VectorField x(q, parity);
  for (std::size_t a = 0; a < q; ++a) x.set_component(a, random_polynomial(rng, q, (parity + 1) & 1, percent));
  return x;
}

}  // namespace qchar
