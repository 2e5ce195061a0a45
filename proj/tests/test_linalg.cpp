#include <map>
#include <vector>

#include "doctest.h"
#include "qchar/errors.hpp"
#include "qchar/linalg.hpp"
#include "qchar/random.hpp"

using namespace qchar;

namespace {

using Dense = std::vector<std::vector<Rational>>;

// Oracle: plain dense Gaussian elimination with row swaps.
std::size_t dense_rank(Dense m) {
  std::size_t r = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

Dense random_dense(Rng& rng, std::size_t rows, std::size_t cols, unsigned density) {
  Dense m(rows, std::vector<Rational>(cols, 0));
  for (auto& row : m)
    for (auto& x : row)
      if (rng.chance(density)) {
        x = Rational(rng.uniform(-3, 3), rng.uniform(1, 2));
        x.canonicalize();
      }
  // Plant dependent rows now and then.
  if (rows > 2 && rng.chance(50))
    for (std::size_t j = 0; j < cols; ++j) m[rows - 1][j] = m[0][j] * 2 - m[1][j];
  return m;
}

SparseVec to_sparse(const std::vector<Rational>& row) {
  std::map<std::size_t, Rational> e;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != 0) e[j] = row[j];
  return make_sparse(e);
}

}  // namespace

TEST_CASE("make_sparse drops zeros and keeps order") {
  const SparseVec v = make_sparse({{3, 1}, {1, 0}, {0, Rational(-2, 3)}});
  REQUIRE(v.size() == 2);
  CHECK(v[0].first == 0);
  CHECK(v[0].second == Rational(-2, 3));
  CHECK(v[1].first == 3);
}

TEST_CASE("rank agrees with dense elimination on random matrices") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = static_cast<std::size_t>(rng.uniform(1, 8));
    const std::size_t cols = static_cast<std::size_t>(rng.uniform(1, 8));
    const Dense m = random_dense(rng, rows, cols, static_cast<unsigned>(rng.uniform(20, 70)));
    std::vector<SparseVec> vs;
    for (const auto& row : m) vs.push_back(to_sparse(row));
    CHECK(rank(vs) == dense_rank(m));
  }
}

TEST_CASE("echelon basis membership") {
  EchelonBasis b;
  CHECK(b.insert(make_sparse({{0, 1}, {1, 1}})));
  CHECK(b.insert(make_sparse({{1, 1}, {2, 1}})));
  CHECK_FALSE(b.insert(make_sparse({{0, 1}, {2, -1}})));
  CHECK(b.in_span(make_sparse({{0, 2}, {1, 4}, {2, 2}})));
  CHECK_FALSE(b.in_span(make_sparse({{2, 1}})));
  CHECK(b.rank() == 2);
}

TEST_CASE("solve returns a solution for consistent systems") {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const std::size_t rows = static_cast<std::size_t>(rng.uniform(1, 7));
    const std::size_t cols = static_cast<std::size_t>(rng.uniform(1, 7));
    const Dense a = random_dense(rng, rows, cols, 50);
    std::vector<Rational> x0(cols);
    for (auto& x : x0) x = rng.uniform(-4, 4);
    LinearSystem sys;
    sys.unknowns = cols;
    for (const auto& row : a) {
      Rational b = 0;
      for (std::size_t j = 0; j < cols; ++j) b += row[j] * x0[j];
      sys.add_equation(to_sparse(row), b);
    }
    const auto x = solve(sys);
    REQUIRE(x.has_value());
    for (std::size_t i = 0; i < rows; ++i) {
      Rational lhs = 0;
      for (std::size_t j = 0; j < cols; ++j) lhs += a[i][j] * (*x)[j];
      CHECK(lhs == sys.rhs[i]);
    }
    CHECK(nullity(sys) == cols - dense_rank(a));
  }
}

TEST_CASE("solve detects inconsistent systems") {
  LinearSystem sys;
  sys.unknowns = 2;
  sys.add_equation(make_sparse({{0, 1}, {1, 1}}), 1);
  sys.add_equation(make_sparse({{0, 2}, {1, 2}}), 3);
  CHECK_FALSE(solve(sys).has_value());
}

TEST_CASE("free unknowns take the supplied values") {
  LinearSystem sys;
  sys.unknowns = 3;
  sys.add_equation(make_sparse({{0, 1}, {2, -1}}), 0);
  const std::vector<Rational> free = {0, 5, 7};
  const auto x = solve(sys, &free);
  REQUIRE(x.has_value());
  CHECK((*x)[2] == 7);
  CHECK((*x)[0] == 7);
  CHECK((*x)[1] == 5);
  CHECK(nullity(sys) == 2);
}

TEST_CASE("solve rejects out-of-range columns") {
  LinearSystem sys;
  sys.unknowns = 1;
  sys.add_equation(make_sparse({{3, 1}}), 0);
  CHECK_THROWS_AS(solve(sys), ValidationError);
}

TEST_CASE("rational helpers") {
  Rational r(6, 4), s(-4, 2);
  r.canonicalize();
  s.canonicalize();
  CHECK(to_string(r) == "3/2");
  CHECK(to_string(s) == "-2");
  CHECK(to_string(Rational(1, 3) * 3) == "1");
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("x"), ValidationError);
  CHECK(binomial(7, 4) == 35);
  CHECK(factorial(5) == 120);
}
