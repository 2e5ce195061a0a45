#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qchar/rational.hpp"

namespace qchar {

// Purely odd coordinate domain R^{0|q}.
struct OddDomain {
  std::vector<std::string> names;

  static OddDomain standard(std::size_t q);  // c0, c1, ...
  std::size_t dim() const { return names.size(); }
  void validate() const;
};

// Monomial c^{i1}...c^{ik}, i1 < ... < ik, stored as a bit mask.
using Monomial = std::uint32_t;

constexpr std::size_t kMaxGenerators = 24;

int monomial_degree(Monomial m);
std::vector<int> monomial_indices(Monomial m);
// Sign of m1 * m2 after reordering, 0 when they share a generator.
int monomial_product_sign(Monomial m1, Monomial m2);

// Element of the exterior algebra on q odd generators with rational coefficients.
class GrassmannPolynomial {
 public:
  GrassmannPolynomial() = default;
  explicit GrassmannPolynomial(std::size_t q);

  static GrassmannPolynomial constant(std::size_t q, const Rational& value);
  static GrassmannPolynomial generator(std::size_t q, std::size_t a);
  static GrassmannPolynomial monomial(std::size_t q, Monomial m, const Rational& coef);

  std::size_t q() const { return q_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(Monomial m) const;

  void add_term(Monomial m, const Rational& coef);

  // -1 when inhomogeneous or zero, otherwise 0 (even) or 1 (odd).
  int parity() const;
  GrassmannPolynomial parity_part(int p) const;
  GrassmannPolynomial degree_part(int d) const;

  // Left derivative with respect to c^a.
  GrassmannPolynomial derivative(std::size_t a) const;
  // Algebra homomorphism c^a -> images[a]; images must be odd.
  GrassmannPolynomial substitute(const std::vector<GrassmannPolynomial>& images) const;

  GrassmannPolynomial& operator+=(const GrassmannPolynomial& other);
  GrassmannPolynomial& operator-=(const GrassmannPolynomial& other);
  GrassmannPolynomial& operator*=(const Rational& s);
  GrassmannPolynomial operator-() const;

  friend GrassmannPolynomial operator+(GrassmannPolynomial a, const GrassmannPolynomial& b) { return a += b; }
  friend GrassmannPolynomial operator-(GrassmannPolynomial a, const GrassmannPolynomial& b) { return a -= b; }
  friend GrassmannPolynomial operator*(GrassmannPolynomial a, const Rational& s) { return a *= s; }
  friend GrassmannPolynomial operator*(const Rational& s, GrassmannPolynomial a) { return a *= s; }
  friend GrassmannPolynomial operator*(const GrassmannPolynomial& a, const GrassmannPolynomial& b);
  friend bool operator==(const GrassmannPolynomial& a, const GrassmannPolynomial& b) {
    return a.q_ == b.q_ && a.terms_ == b.terms_;
  }

  std::string to_string(const OddDomain& domain) const;
  std::string to_string() const;

 private:
  std::size_t q_ = 0;
  std::map<Monomial, Rational> terms_;
};

using GP = GrassmannPolynomial;

GP gp_multiply(const GP& f, const GP& g);

// Sign of reordering positions by `permutation` (new position i holds old
// element permutation[i]); each inverted pair of odd elements contributes -1.
int koszul_sign(const std::vector<std::size_t>& permutation, const std::vector<int>& parities);

// X = sum_a X^a d/dc^a. Component parity equals field parity + 1.
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::size_t q, int parity);
  VectorField(std::vector<GP> components, int parity);

  std::size_t q() const { return components_.size(); }
  int parity() const { return parity_; }
  const GP& component(std::size_t a) const { return components_[a]; }
  const std::vector<GP>& components() const { return components_; }
  void set_component(std::size_t a, GP value);
  bool is_zero() const;

  GP apply(const GP& f) const;
  void validate() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator*=(const Rational& s);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a += b * Rational(-1); }
  friend VectorField operator*(VectorField a, const Rational& s) { return a *= s; }
  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.parity_ == b.parity_ && a.components_ == b.components_;
  }

  std::string to_string(const OddDomain& domain) const;

 private:
  std::vector<GP> components_;
  int parity_ = 1;
};

VectorField lie_bracket(const VectorField& x, const VectorField& y);
bool is_homological(const VectorField& q);

// Index tuple: lower indices first, then upper indices.
using TensorIndex = std::vector<std::uint8_t>;

// Tensor of type (n, m) on R^{0|q}: sum T_{i1..in}^{j1..jm} e^{i1}...e^{in} d_{j1}...d_{jm},
// coefficient written on the left, frame symbols all odd and kept in slot order.
class TensorField {
 public:
  TensorField() = default;
  TensorField(std::size_t q, std::size_t lower, std::size_t upper);

  static TensorField scalar(const GP& f);

  std::size_t q() const { return q_; }
  std::size_t lower() const { return lower_; }
  std::size_t upper() const { return upper_; }
  const std::map<TensorIndex, GP>& components() const { return components_; }
  GP component(const TensorIndex& index) const;
  void add_component(const TensorIndex& index, const GP& value);
  bool is_zero() const { return components_.empty(); }

  // Total parity of coefficient plus frame symbols; -1 when inhomogeneous.
  int parity() const;
  TensorField parity_part(int p) const;

  TensorField& operator+=(const TensorField& other);
  TensorField& operator-=(const TensorField& other);
  TensorField& operator*=(const Rational& s);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(TensorField a, const Rational& s) { return a *= s; }
  friend bool operator==(const TensorField& a, const TensorField& b) {
    return a.q_ == b.q_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
           a.components_ == b.components_;
  }

  std::string to_string(const OddDomain& domain) const;

 private:
  std::size_t q_ = 0, lower_ = 0, upper_ = 0;
  std::map<TensorIndex, GP> components_;
};

TensorField lie_derivative(const VectorField& q, const TensorField& t);
TensorField tensor_product(const TensorField& s, const TensorField& t);
// Tensor product restricted to components whose lower slot i and upper slot j
// (pairs (i, j), numbered in the product) carry the same index. Contracting
// those pairs afterwards gives the same result as with the full product.
TensorField tensor_product(const TensorField& s, const TensorField& t,
                           const std::vector<std::pair<std::size_t, std::size_t>>& diagonal);
// Pairs lower slot i with upper slot j (0-based) through e^a d_b -> delta^a_b.
TensorField contract(const TensorField& t, std::size_t lower_slot, std::size_t upper_slot);
// Reorders slots: new lower slot i is old lower slot lower_perm[i], likewise for upper.
TensorField permute_slots(const TensorField& t, const std::vector<std::size_t>& lower_perm,
                          const std::vector<std::size_t>& upper_perm);
// Endomorphism composition of (1,1) tensors: (a o b) feeds the output of b into a.
TensorField compose(const TensorField& a, const TensorField& b);
// Str T = sum_a (-1)^{eps_a} T_a^a = -sum_a T_a^a on a purely odd domain.
GP supertrace(const TensorField& t);
TensorField identity_endomorphism(std::size_t q);

// n-th partial derivatives d_{i1}...d_{in} Q^j as an (n,1) tensor.
TensorField derivative_tensor(const VectorField& q, std::size_t n);

}  // namespace qchar
