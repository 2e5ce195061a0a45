#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qchar/rational.hpp"

namespace qchar {

// Sparse vector: (index, value) pairs, strictly increasing indices, no zeros.
using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

SparseVec make_sparse(const std::map<std::size_t, Rational>& entries);

// Row-echelon basis over Q. Each stored row has leading coefficient 1 at its
// pivot, which is the smallest index it touches.
class EchelonBasis {
 public:
  // Returns true when v was independent of the stored rows.
  bool insert(const SparseVec& v);
  SparseVec reduce(const SparseVec& v) const;
  bool in_span(const SparseVec& v) const { return reduce(v).empty(); }
  std::size_t rank() const { return rows_.size(); }
  const std::map<std::size_t, SparseVec>& rows() const { return rows_; }

 private:
  std::map<std::size_t, SparseVec> rows_;
};

std::size_t rank(const std::vector<SparseVec>& vectors);

// Linear system A x = b with A given row-wise over `unknowns` columns.
struct LinearSystem {
  std::size_t unknowns = 0;
  std::vector<SparseVec> rows;
  std::vector<Rational> rhs;

  void add_equation(SparseVec row, Rational value);
};

// Exact solve. Free unknowns take the values in `free_values` when given
// (indexed by unknown), zero otherwise. Returns nullopt when infeasible.
std::optional<std::vector<Rational>> solve(
    const LinearSystem& system,
    const std::vector<Rational>* free_values = nullptr);

// Some solution, by sparse elimination with Markowitz-style pivoting. Which
// unknowns end up free is unspecified; they are set to zero.
std::optional<std::vector<Rational>> solve_any(const LinearSystem& system);

// Dimension of the solution space of the homogeneous system.
std::size_t nullity(const LinearSystem& system);

}  // namespace qchar
