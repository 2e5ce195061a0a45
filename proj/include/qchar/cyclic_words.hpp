#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qchar/rational.hpp"

namespace qchar {

// Word over {a, b}; |a| = 1, |b| = 2.
using Word = std::string;

int word_degree(const Word& w);
// Auxiliary degree 2 * #b.
int word_weight(const Word& w);
void validate_word(const Word& w);

using NCPoly = std::map<Word, Rational>;

void add_term(NCPoly& p, const Word& w, const Rational& c);

// Graded derivation with da = a^2 + b, db = ab - ba.
NCPoly d_free(const NCPoly& p);

// Minimal rotation with sign (-1)^{|x||rest|} per step; sign 0 when the word
// equals minus one of its rotations.
std::pair<Word, int> canonical_rotation(const Word& w);

// Element of the cyclic quotient, keyed by canonical rotations.
class CyclicPoly {
 public:
  CyclicPoly() = default;
  static CyclicPoly word(const Word& w, const Rational& c = 1);

  const std::map<Word, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const Word& canonical) const;
  void add(const Word& w, const Rational& c);

  CyclicPoly& operator+=(const CyclicPoly& other);
  CyclicPoly& operator*=(const Rational& s);
  friend CyclicPoly operator+(CyclicPoly a, const CyclicPoly& b) { return a += b; }
  friend CyclicPoly operator-(CyclicPoly a, const CyclicPoly& b) { return a += b * Rational(-1); }
  friend CyclicPoly operator*(CyclicPoly a, const Rational& s) { return a *= s; }
  friend bool operator==(const CyclicPoly& a, const CyclicPoly& b) { return a.terms_ == b.terms_; }

  // "1 a^3 + 3 a.b"
  std::string to_string() const;

 private:
  std::map<Word, Rational> terms_;
};

CyclicPoly cyclic_reduce(const NCPoly& p);
CyclicPoly d_cyclic(const CyclicPoly& p);

// Canonical nonzero cyclic words of the given degree, in increasing order.
std::vector<Word> cyclic_basis(int degree);
// All words of the given degree.
std::vector<Word> free_basis(int degree);

struct Transgression {
  int n = 0;
  CyclicPoly candidate;  // a^{2n-1} + c_1 + ... + c_{n-1}
  Rational alpha;        // d^(candidate) = alpha b^n
  bool alpha_unique = false;
};

// Default degree budget 7 (n <= 4); larger n throws BudgetError.
Transgression transgress(int n, int max_degree = 7);

// Tabulated A_1..A_4 words in Lambda and R, with Lambda -> a, R -> 2b.
CyclicPoly tabulated_A_words(int n);

// True when p lies in the image of d^ (p homogeneous of positive degree).
bool is_cyclic_exact(const CyclicPoly& p);

struct DegreeCohomology {
  int degree = 0;
  std::size_t dim_chains = 0;
  std::size_t dim = 0;
};

// Cohomology of (W^, d^) in degrees 1..max_degree, excluding the empty word.
std::vector<DegreeCohomology> cyclic_cohomology(int max_degree);

// d0 a = -a^2, d0 b = 0 on the cyclic space, graded by p = 2 #b, q = #a.
struct BidegreeCohomology {
  int p = 0, q = 0;
  std::size_t dim_chains = 0;
  std::size_t dim = 0;
  std::vector<Word> representatives;  // canonical words spanning cocycles not hit, when dim > 0
};

CyclicPoly d0_cyclic(const CyclicPoly& p);
std::vector<BidegreeCohomology> d0_cohomology(int max_p, int max_q);

}  // namespace qchar
