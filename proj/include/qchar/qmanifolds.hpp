#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qchar/random.hpp"
#include "qchar/series.hpp"
#include "qchar/superalg.hpp"

namespace qchar {

// [t_a, t_b] = sum_d f_{ab}^d t_d, both orientations stored.
struct LieSuperAlgebraSpec {
  struct Element {
    std::string name;
    int parity = 0;
  };
  std::vector<Element> basis;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> constants;

  std::size_t dim() const { return basis.size(); }
  Rational f(std::size_t a, std::size_t b, std::size_t d) const;
  std::size_t index_of(const std::string& name) const;
  // (ad_a)^d_b = f_{ab}^d as a dense matrix indexed [d][b].
  std::vector<std::vector<Rational>> ad_matrix(std::size_t a) const;
  // Names of the ghost coordinates: e0 -> c0, e_-1 -> c_-1, x -> c_x.
  OddDomain ghost_domain() const;
};

// JSON input; closes antisymmetry, then checks parities, antisymmetry and the
// graded Jacobi identity. Throws ValidationError naming the offending pair or triple.
LieSuperAlgebraSpec parse_algebra(const std::string& text);
// Same checks on an already assembled spec (constants given in both orientations).
void validate_algebra(const LieSuperAlgebraSpec& spec);
// First triple (a,b,c) violating graded Jacobi, if any.
std::optional<std::array<std::size_t, 3>> jacobi_violation(const LieSuperAlgebraSpec& spec);
// sl2, borel2, heisenberg3, abelian:<n>.
LieSuperAlgebraSpec builtin_algebra(const std::string& name);
bool is_builtin_algebra(const std::string& name);
std::string builtin_algebra_text(const std::string& name);

struct CEQManifold {
  OddDomain domain;
  VectorField q;
};

// Q = 1/2 c^b c^a f_{ab}^d d/dc^d without any validation.
VectorField ce_vector_field(const LieSuperAlgebraSpec& spec);
// Validated construction; rejects odd basis elements (their ghosts are even).
CEQManifold ce_field(const LieSuperAlgebraSpec& spec);

// Cocycle representatives for the coordinate connection of the odd chart.
TensorField series_A(const VectorField& q, int n);  // Str(Lambda^{2n-1}), type (0,0)
TensorField series_B(const VectorField& q, int n);  // chained d^2 Q, type (n+1,1)
TensorField series_C(const VectorField& q, int n);  // Str of B_n over its endomorphism slot, type (n,0)
TensorField series_rep(Series s, const VectorField& q, int n);

// Closed forms on Chevalley-Eilenberg fields in terms of adjoint matrices:
// A_n = (-1)^n tr(ad_{a1}...ad_{a(2n-1)}) c^{a1}...c^{a(2n-1)},
// B_n[Y,X1..Xn;d] = -(ad_{Xn}...ad_{X1})^d_Y, C_n[X1..Xn] = (-1)^n tr(ad_{Xn}...ad_{X1}).
TensorField adjoint_closed_form(const LieSuperAlgebraSpec& spec, Series s, int n);

struct ExactnessResult {
  bool exact = false;
  std::optional<TensorField> primitive;
};

// Decides whether T = L_Q S for some tensor S of the same type by an exact
// linear solve. Throws ValidationError if T is not closed.
ExactnessResult is_exact(const VectorField& q, const TensorField& t);

struct ClassReport {
  Series series = Series::A;
  int n = 1;
  TensorField representative;
  bool closed = false;
  std::optional<bool> exact;
  std::optional<TensorField> primitive;
};

ClassReport class_report(const CEQManifold& m, Series s, int n, bool decide_exact = true,
                         bool keep_primitive = false);
ClassReport modular_class(const LieSuperAlgebraSpec& spec);

struct IdentityCheck {
  std::string label;
  bool holds = false;
};

struct VerificationReport {
  std::vector<IdentityCheck> checks;
  bool all_hold() const;
};

// Homogeneous components Q~_0..Q~_order of the exponential lift on the doubled
// domain (x^a = c^a, y^a = c^{q+a}), graded by [N, Q~_m] = m Q~_m.
std::vector<VectorField> jet_components(const VectorField& q, int order);
// Checks 2[Q~_0,Q~_m] = -sum_{k=1}^{m-1} [Q~_{m-k},Q~_k] for m <= order and the
// tangent-lift form of Q~_0.
VerificationReport jet_expansion(const VectorField& q, int order);
// Checks Q^m d_m d_{i1..in} Q^j = sum_l C(n,l) (-1)^{l+1} d_{(i1..il} Q^m d_m d_{..in)} Q^j
// for n <= order with graded symmetrization.
VerificationReport gauss_chain_check(const VectorField& q, int order);

// New coordinates c' = forward(c), old coordinates c = inverse(c').
struct CoordinateChange {
  std::vector<GP> forward;
  std::vector<GP> inverse;
};

// Linear part unimodular with small integer entries plus optional cubic terms.
CoordinateChange random_coordinate_change(Rng& rng, std::size_t q, bool nonlinear = true);
CoordinateChange make_coordinate_change(std::vector<GP> forward);
// Components of Q in the new chart, as functions of c'.
VectorField push_forward(const VectorField& q, const CoordinateChange& change);
// Tensor given in the new chart, re-expressed in the old chart.
TensorField pull_back(const TensorField& t_new, const CoordinateChange& change);

// Random homological field: direct sum of small blocks (Chevalley-Eilenberg fields
// of sl2, borel2, heisenberg3, constant fields, zero) transported by a random
// coordinate change.
VectorField random_homological_field(Rng& rng, std::size_t q);

}  // namespace qchar
