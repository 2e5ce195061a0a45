#include "qchar/linalg.hpp"

#include <algorithm>
#include <set>

#include "qchar/errors.hpp"

namespace qchar {

SparseVec make_sparse(const std::map<std::size_t, Rational>& entries) {
  SparseVec v;
  v.reserve(entries.size());
  for (const auto& [i, x] : entries)
    if (x != 0) v.emplace_back(i, x);
  return v;
}

namespace {

std::map<std::size_t, Rational> reduce_to_map(
    const std::map<std::size_t, SparseVec>& rows, const SparseVec& v) {
  std::map<std::size_t, Rational> acc;
  for (const auto& [i, x] : v) acc.emplace(i, x);
  auto it = acc.begin();
  while (it != acc.end()) {
    auto pivot = rows.find(it->first);
    if (pivot == rows.end()) {
      ++it;
      continue;
    }
    const Rational coef = it->second;
    const std::size_t col = it->first;
    for (const auto& [j, y] : pivot->second) {
      auto [slot, fresh] = acc.try_emplace(j, 0);
      slot->second -= coef * y;
      if (slot->second == 0 && j != col) acc.erase(slot);
    }
    it = acc.erase(acc.find(col));
  }
  return acc;
}

}  // namespace

SparseVec EchelonBasis::reduce(const SparseVec& v) const {
  return make_sparse(reduce_to_map(rows_, v));
}

bool EchelonBasis::insert(const SparseVec& v) {
  auto acc = reduce_to_map(rows_, v);
  if (acc.empty()) return false;
  const std::size_t pivot = acc.begin()->first;
  const Rational lead = acc.begin()->second;
  SparseVec row;
  row.reserve(acc.size());
  for (const auto& [i, x] : acc) row.emplace_back(i, x / lead);
  rows_.emplace(pivot, std::move(row));
  return true;
}

std::size_t rank(const std::vector<SparseVec>& vectors) {
  EchelonBasis basis;
  for (const auto& v : vectors) basis.insert(v);
  return basis.rank();
}

void LinearSystem::add_equation(SparseVec row, Rational value) {
  rows.push_back(std::move(row));
  rhs.push_back(std::move(value));
}

std::optional<std::vector<Rational>> solve(
    const LinearSystem& system, const std::vector<Rational>* free_values) {
  const std::size_t n = system.unknowns;
  EchelonBasis basis;
  // Short rows first keeps fill-in low.
  std::vector<std::size_t> order(system.rows.size());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return system.rows[a].size() < system.rows[b].size(); });
  for (std::size_t r : order) {
    SparseVec row = system.rows[r];
    for (const auto& entry : row)
      if (entry.first >= n) throw ValidationError("equation index out of range");
    if (system.rhs[r] != 0) row.emplace_back(n, system.rhs[r]);
    basis.insert(row);
  }
  if (basis.rows().count(n)) return std::nullopt;
  std::vector<Rational> x(n, 0);
  if (free_values) {
    if (free_values->size() != n) throw ValidationError("free value count mismatch");
    x = *free_values;
  }
  for (auto it = basis.rows().rbegin(); it != basis.rows().rend(); ++it) {
    const std::size_t p = it->first;
    Rational value = 0;
    for (const auto& [j, a] : it->second) {
      if (j == p) continue;
      if (j == n)
        value += a;
      else
        value -= a * x[j];
    }
    x[p] = value;
  }
  return x;
}

std::optional<std::vector<Rational>> solve_any(const LinearSystem& system) {
  const std::size_t n = system.unknowns;
  using Row = std::map<std::size_t, Rational>;  // column n holds the right-hand side
  std::vector<Row> rows(system.rows.size());
  std::vector<std::set<std::size_t>> col_rows(n);
  std::set<std::pair<std::size_t, std::size_t>> queue;  // (unknown count, row)
  auto unknown_count = [&](const Row& r) { return r.size() - r.count(n); };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [j, a] : system.rows[r]) {
      if (j >= n) throw ValidationError("equation index out of range");
      if (a != 0) {
        rows[r][j] = a;
        col_rows[j].insert(r);
      }
    }
    if (system.rhs[r] != 0) rows[r][n] = system.rhs[r];
    queue.emplace(unknown_count(rows[r]), r);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, column) in elimination order
  while (!queue.empty()) {
    const std::size_t r = queue.begin()->second;
    queue.erase(queue.begin());
    Row& row = rows[r];
    if (unknown_count(row) == 0) {
      if (!row.empty()) return std::nullopt;
      continue;
    }
    std::size_t col = n, best = 0;
    for (const auto& [j, a] : row)
      if (j < n && (col == n || col_rows[j].size() < best)) {
        col = j;
        best = col_rows[j].size();
      }
    for (const auto& [j, a] : row)
      if (j < n) col_rows[j].erase(r);
    const Rational lead = row.at(col);
    for (auto& [j, a] : row) a /= lead;
    const std::vector<std::size_t> targets(col_rows[col].begin(), col_rows[col].end());
    for (std::size_t t : targets) {
      Row& other = rows[t];
      queue.erase({unknown_count(other), t});
      const Rational f = other.at(col);
      for (const auto& [j, a] : row) {
        auto [it, fresh] = other.try_emplace(j, 0);
        it->second -= f * a;
        if (it->second == 0) {
          other.erase(it);
          if (j < n) col_rows[j].erase(t);
        } else if (fresh && j < n) {
          col_rows[j].insert(t);
        }
      }
      queue.emplace(unknown_count(other), t);
    }
    pivots.emplace_back(r, col);
  }
  std::vector<Rational> x(n, 0);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const auto [r, col] = *it;
    Rational value = 0;
    for (const auto& [j, a] : rows[r]) {
      if (j == n)
        value += a;
      else if (j != col)
        value -= a * x[j];
    }
    x[col] = value;
  }
  return x;
}

std::size_t nullity(const LinearSystem& system) {
  return system.unknowns - rank(system.rows);
}

}  // namespace qchar
