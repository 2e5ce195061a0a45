#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qchar/rational.hpp"

namespace qchar {

// Letters a0..a6: connection form, contracted curvatures, curvature and
// their covariant derivatives. Bidegree = (form degree, Q-degree).
constexpr int kLetterCount = 7;

struct Bidegree {
  int p = 0, q = 0;
  auto operator<=>(const Bidegree&) const = default;
};

Bidegree letter_bidegree(int letter);
// Total parity (p + q) mod 2, used in every Koszul sign.
int letter_parity(int letter);

// Word in the letters, written as a digit string: "304" = a3 a0 a4.
using LetterWord = std::string;
using LetterPoly = std::map<LetterWord, Rational>;

Bidegree word_bidegree(const LetterWord& w);
int word_parity(const LetterWord& w);
void validate_letter_word(const LetterWord& w);
void accumulate(LetterPoly& p, const LetterWord& w, const Rational& c);
LetterPoly letter(int i, const Rational& c = 1);
LetterPoly multiply(const LetterPoly& x, const LetterPoly& y);
// Graded commutator xy - (-1)^{|x||y|} yx on homogeneous arguments.
LetterPoly commutator(const LetterPoly& x, const LetterPoly& y);
std::string render(const LetterPoly& p);

// Graded derivation of the free algebra given on letters; a letter without
// an image makes the derivation undefined there.
struct Derivation {
  std::string name;
  int parity = 1;
  std::array<std::optional<LetterPoly>, kLetterCount> image;

  bool defined_on(const LetterWord& w) const;
  LetterPoly apply(const LetterPoly& p) const;
};

// delta = L_Q, nabla (covariant derivative, d on traces), iq = i_Q,
// h1 and h2 the homotopies.
struct DerivationTables {
  Derivation delta, nabla, iq, h1, h2;
};

// Reference derivation tables with their signs unchanged.
DerivationTables tabulated_tables();
// Tabulated derivations with the signs of the [a2, a1] term of delta a5 and the
// [a3, a1] term of delta a6 reversed. Both restore delta^2 = 0 and agree with
// the tabulated homotopy table.
DerivationTables engine_tables();

// Relations of the letters F(n,k) = i_Q^k F(n,0), Fbar(n,k) = delta F(n,k)
// with d F(n,0) = P_n = Str a3^n:
//   dF(n,k) = s k Fbar(n,k-1) + i_Q^k P_n,  delta F(n,2n-1) = t i_Q^{2n} P_n,
//   dFbar(n,k) = -delta(i_Q^k P_n).
// Tabulated: s = 1, t = 1. Derived: s = -1, t = 1/(2n), from the Cartan formula
// with the sign fixed by delta P_1 = -d i_Q P_1 in the tables.
enum class FRelations { Tabulated, Derived };

struct Convention {
  DerivationTables tables = engine_tables();
  FRelations f = FRelations::Derived;
};

// Element of the bicomplex V: traced words plus the F letters (n <= 3).
struct VKey {
  enum class Kind { Trace, F, Fbar };
  Kind kind = Kind::Trace;
  LetterWord word;  // traced word, canonical rotation
  int n = 0, k = 0;
  auto operator<=>(const VKey&) const = default;
};

Bidegree key_bidegree(const VKey& key);
std::string render(const VKey& key);

// Canonical rotation of a traced word with its sign; sign 0 when Str w = 0.
std::pair<LetterWord, int> canonical_trace(const LetterWord& w);

class Covariant {
 public:
  Covariant() = default;
  static Covariant str(const LetterWord& w, const Rational& c = 1);
  static Covariant str(const LetterPoly& p);
  static Covariant f(int n, int k, const Rational& c = 1);
  static Covariant fbar(int n, int k, const Rational& c = 1);

  const std::map<VKey, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const VKey& key) const;
  void add(const VKey& key, const Rational& c);

  Covariant& operator+=(const Covariant& other);
  Covariant& operator*=(const Rational& s);
  friend Covariant operator+(Covariant a, const Covariant& b) { return a += b; }
  friend Covariant operator-(Covariant a, const Covariant& b) { return a += b * Rational(-1); }
  friend Covariant operator*(Covariant a, const Rational& s) { return a *= s; }
  friend bool operator==(const Covariant& a, const Covariant& b) { return a.terms_ == b.terms_; }

  std::string to_string() const;

 private:
  std::map<VKey, Rational> terms_;
};

Covariant apply_delta(const Covariant& x, const Convention& c = {});
Covariant apply_d(const Covariant& x, const Convention& c = {});
// i_Q on traced words; throws ValidationError on a4..a6 and on F letters.
Covariant apply_iq(const Covariant& x, const Convention& c = {});
// i_Q^k Str a3^n.
Covariant contracted_pontryagin(int n, int k, const Convention& c = {});

// Canonical nonzero traced words of the given bidegree.
std::vector<LetterWord> trace_basis(Bidegree b);
// All canonical nonzero traced words with 1..max_len letters.
std::vector<LetterWord> trace_words(std::size_t max_len);

struct PropertyResult {
  explicit PropertyResult(std::string n = {}) : name(std::move(n)) {}
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool holds() const { return failures == 0; }
};

// delta^2, d^2, d delta + delta d on traced words up to max_len letters and on
// all F letters with n <= 3; delta Str a4^n and d Str a3^n for n <= 3; delta^2
// on letters of the free algebra.
std::vector<PropertyResult> check_bicomplex(std::size_t max_len = 4, const Convention& c = {});

struct LetterIdentity {
  std::string lhs;
  LetterPoly expected, computed;
  bool holds() const { return expected == computed; }
};

struct HomotopyReport {
  std::vector<LetterIdentity> letters;  // Delta1 a_i then Delta2 a_i
  std::vector<PropertyResult> kernels;  // ker Delta1, ker Delta2 on traces
  bool all_hold() const;
};

HomotopyReport homotopy_check(std::size_t max_len = 4, const Convention& c = {});

struct BidegreeRow {
  Bidegree degree;
  std::size_t dim_chains = 0;
  std::size_t h_delta = 0, h_d = 0;
  std::size_t expected_delta = 0, expected_d = 0;
  bool matches() const { return h_delta == expected_delta && h_d == expected_d; }
};

// Bidegrees with 1 <= p + q <= max_total; max_total <= 4.
std::vector<BidegreeRow> small_degree_cohomology(int max_total = 4, const Convention& c = {});

struct RepresentativeTerm {
  bool delta_side = true;  // term inside delta[...] or d[...]
  VKey key;
  Rational tabulated, computed;
};

struct RepresentativeReport {
  int n = 0;
  enum class Status { Exact, Solved, Failed } status = Status::Failed;
  std::vector<RepresentativeTerm> terms;
  Covariant tabulated_residual;  // C_n + delta X - d Y with tabulated coefficients
  bool unique = false;          // solution has no free coefficients
};

std::string status_name(RepresentativeReport::Status s);

// C_n + delta[X] = d[Y] on the tabulated word basis for n = 1, 2, 3. Free
// coefficients keep their tabulated values.
RepresentativeReport verify_exact_representatives(int n, const Convention& c = {});

}  // namespace qchar
