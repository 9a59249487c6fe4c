#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "perdist/perdist.hpp"

using namespace perdist;

namespace {

CMatrix diag2(Complex x, Complex y) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = x;
  d(1, 1) = y;
  return d;
}

FactorList<double> block_list(Complex a, Index m, Index p, Index q) {
  const auto b = ea_block(a, m, p, q);
  return {b.begin(), b.end()};
}

// Left product of a pivot stage: R_{m-1} ... R_1 E_a.
CMatrix stage_left(Index m, const PivotReduction<double>& s) {
  FactorList<double> left(s.row_factors.rbegin(), s.row_factors.rend());
  left.insert(left.end(), s.ea_factors.begin(), s.ea_factors.end());
  return oracle::dense_product(m, left);
}

// Every signed permutation matrix of size m with determinant sign `sign`.
std::vector<CMatrix> signed_permutations(int m, int sign) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<CMatrix> out;
  do {
    for (int mask = 0; mask < (1 << m); ++mask) {
      CMatrix p = CMatrix::Zero(m, m);
      for (int i = 0; i < m; ++i) p(i, perm[static_cast<std::size_t>(i)]) = (mask >> i) & 1 ? -1.0 : 1.0;
      if (std::lround(p.determinant().real()) == sign) out.push_back(p);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TEST_CASE("ea_block examples") {
  {
    const auto b = ea_block(Complex(1), 2, 0);
    CHECK(b[0].coeff == Complex(1));
    CHECK(b[1].coeff == Complex(0));
    CHECK(b[2].coeff == Complex(-1));
    CHECK(b[3].coeff == Complex(0));
    CHECK(oracle::dense_product(2, {b.begin(), b.end()}) == CMatrix::Identity(2, 2));
  }
  CHECK(oracle::max_abs(oracle::dense_product(2, block_list(2.0, 2, 0, 1)) - diag2(0.5, 2.0)) <= 1e-15);
  CHECK(oracle::dense_product(2, block_list(-1.0, 2, 0, 1)) == diag2(-1.0, -1.0));
  CHECK_THROWS_AS(ea_block(Complex(0), 2, 0), PreconditionError);
  CHECK_THROWS_AS(ea_block(Complex(2), 2, 1), PreconditionError);
}

TEST_CASE("ea_block on arbitrary row pairs") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Complex a = oracle::random_complex(rng);
    for (auto [p, q] : {std::pair<Index, Index>{0, 3}, {3, 1}, {2, 0}}) {
      CMatrix expect = CMatrix::Identity(4, 4);
      expect(p, p) = 1.0 / a;
      expect(q, q) = a;
      const CMatrix got = oracle::dense_product(4, block_list(a, 4, p, q));
      CHECK(oracle::max_abs(got - expect) <= 1e-14 * (1 + std::abs(a) + 1 / std::abs(a)));
      for (const auto& f : block_list(a, 4, p, q)) CHECK(f.norm() <= 1 + std::max(std::abs(a), 1 / std::abs(a)));
    }
  }
}

TEST_CASE("min_entry_bound") {
  CHECK(min_entry_bound(1) == 1);
  CHECK(min_entry_bound(2) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  CHECK(min_entry_bound(3) == doctest::Approx(std::pow(6.0, -1.0 / 3)).epsilon(1e-15));
  CHECK(min_entry_bound(2) == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(min_entry_bound(3) == doctest::Approx(0.55032).epsilon(1e-5));
  CHECK_THROWS_AS(min_entry_bound(0), PreconditionError);
}

TEST_CASE("bound constants") {
  for (int m = 1; m <= 8; ++m) {
    int nu = 3 * (m - 1) + 3 * (m - 1);
    for (int j = 2; j <= m; ++j) nu += 2 * (j - 1) + 4;
    CHECK(bound_constants(m).nu == nu);
    CHECK(bound_constants(m).nu == m * m + 9 * m - 10);
    CHECK(bound_constants(m).k == (m == 1 ? 0 : 1 << (m - 1)));
  }
  CHECK(bound_constants(1) == BoundConstants{1, 0, 0});
  CHECK(bound_constants(2).nu == 12);
  CHECK(bound_constants(3) == bound_constants(3));
}

TEST_CASE("pivot_reduce examples") {
  {
    const CMatrix id = CMatrix::Identity(2, 2);
    const auto s = pivot_reduce<double>(id);
    CHECK(s.pivot_row == 0);
    CHECK(s.pivot_col == 0);
    CHECK(s.reduced.rows() == 1);
    CHECK(s.reduced(0, 0) == Complex(1));
    CHECK(stage_left(2, s) * id * oracle::dense_product(2, s.col_factors) == s.bordered);
  }
  {
    CMatrix a(2, 2);
    a << 0, 1, -1, 0;
    const auto s = pivot_reduce<double>(a);
    CHECK(std::abs(s.pivot) == 1);
    CHECK(oracle::max_abs(stage_left(2, s) * a * oracle::dense_product(2, s.col_factors) - s.bordered) <= 1e-14);
  }
  CMatrix bad(2, 2);
  bad << 2, 0, 0, 2;
  CHECK_THROWS_AS(pivot_reduce<double>(bad), PreconditionError);
  CHECK_THROWS_AS(pivot_reduce<double>(CMatrix::Identity(1, 1)), PreconditionError);
}

TEST_CASE("pivot_reduce on random SL_3: bordered form and stage bounds") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = oracle::random_sl(3, rng);
    const double norm = oracle::max_abs(a);
    CHECK(norm >= min_entry_bound(3));
    const auto s = pivot_reduce<double>(a);
    CHECK(std::abs(s.pivot) == doctest::Approx(norm));
    const CMatrix w = stage_left(3, s) * a * oracle::dense_product(3, s.col_factors);
    CHECK(oracle::max_abs(w - s.bordered) <= 1e-12 * (1 + norm) * (1 + norm));
    CHECK(std::abs(s.bordered(s.pivot_row, s.pivot_col) - 1.0) <= 1e-14);
    for (Index j = 0; j < 3; ++j) {
      if (j != s.pivot_col) CHECK(s.bordered(s.pivot_row, j) == Complex(0));
      if (j != s.pivot_row) CHECK(s.bordered(j, s.pivot_col) == Complex(0));
    }
    CHECK(std::abs(std::abs(s.reduced.determinant()) - 1) <= 1e-10);
    const double cap = 1 + std::max(norm, 1 / min_entry_bound(3));
    for (const auto& f : s.ea_factors) CHECK(f.norm() <= cap);
    for (const auto* list : {&s.row_factors, &s.col_factors})
      for (const auto& f : *list) CHECK(f.norm() <= norm * 81 * std::pow(cap, 4));
  }
}

TEST_CASE("factor_permutation_even examples") {
  CHECK(factor_permutation_even<double>(CMatrix::Identity(3, 3)).empty());
  {
    CMatrix p(2, 2);
    p << 0, 1, -1, 0;
    const auto f = factor_permutation_even<double>(p);
    REQUIRE(f.size() == 3);
    CHECK(f[0].type == FactorType{1, 0});
    CHECK(f[0].coeff == Complex(-1));
    CHECK(f[1].type == FactorType{0, 1});
    CHECK(f[1].coeff == Complex(1));
    CHECK(f[2].type == FactorType{1, 0});
    CHECK(f[2].coeff == Complex(-1));
    CHECK(oracle::dense_product(2, f) == p);
  }
  {
    CMatrix cycle(3, 3);
    cycle << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    CHECK(oracle::dense_product(3, factor_permutation_even<double>(cycle)) == cycle);
  }
  CMatrix odd(2, 2);
  odd << 0, 1, 1, 0;
  CHECK_THROWS_AS(factor_permutation_even<double>(odd), PreconditionError);
  CMatrix notperm(2, 2);
  notperm << 1, 1, 0, 1;
  CHECK_THROWS_AS(factor_permutation_even<double>(notperm), PreconditionError);
}

TEST_CASE("factor_permutation_even on every signed permutation of det 1") {
  for (int m = 2; m <= 4; ++m) {
    for (const auto& p : signed_permutations(m, 1)) {
      const auto f = factor_permutation_even<double>(p);
      CHECK(oracle::dense_product(m, f) == p);  // exact integer arithmetic
      CHECK(static_cast<int>(f.size()) <= permutation_budget(m));
      for (const auto& e : f) CHECK((e.coeff == Complex(1) || e.coeff == Complex(-1)));
    }
    for (const auto& p : signed_permutations(m, -1)) CHECK_THROWS_AS(factor_permutation_even<double>(p), PreconditionError);
  }
}

TEST_CASE("factor_slm examples") {
  for (Index m = 1; m <= 4; ++m) {
    const auto rep = factor_slm<double>(CMatrix::Identity(m, m));
    CHECK(rep.factors.empty());
    CHECK(rep.reconstruction_residual == 0);
  }
  {
    const CMatrix a = diag2(2.0, 0.5);
    const auto rep = factor_slm<double>(a);
    CHECK(oracle::max_abs(oracle::dense_product(2, rep.factors) - a) <= 1e-14);
    CHECK(rep.within_bounds());
  }
  {
    CMatrix e = CMatrix::Identity(3, 3);
    e(0, 2) = Complex(5, -1);
    const auto rep = factor_slm<double>(e);
    REQUIRE(rep.factors.size() == 1);
    CHECK(rep.factors[0].type == FactorType{0, 2});
    CHECK(rep.factors[0].coeff == Complex(5, -1));
  }
  CMatrix det2(2, 2);
  det2 << 2, 0, 0, 1;
  CHECK_THROWS_AS(factor_slm<double>(det2), PreconditionError);
}

TEST_CASE("factor_slm on random SL_m: replay and bound law") {
  std::mt19937_64 rng(99);
  for (Index m = 2; m <= 6; ++m) {
    const auto constants = bound_constants(static_cast<int>(m));
    for (int trial = 0; trial < 40; ++trial) {
      CMatrix a = oracle::random_sl(m, rng);
      // Mix in some larger dynamic range.
      if (trial % 4 == 1) {
        CMatrix d = CMatrix::Identity(m, m);
        d(0, 0) = 30.0;
        d(m - 1, m - 1) = 1.0 / 30.0;
        a = d * a;
      }
      const auto rep = factor_slm<double>(a);
      const double norm = oracle::max_abs(a);
      CHECK(rep.constants == constants);
      CHECK(static_cast<int>(rep.factors.size()) <= constants.nu);
      const double residual = oracle::max_abs(oracle::dense_product(m, rep.factors) - a);
      CHECK(residual <= 1e-9 * std::pow(1 + norm, constants.k));
      for (const auto& f : rep.factors) CHECK(f.norm() <= constants.C * std::pow(1 + norm, constants.k));
      CHECK(rep.within_bounds());
    }
  }
}

TEST_CASE("factor_near_identity examples") {
  CHECK(factor_near_identity<double>(CMatrix::Identity(3, 3), 0.01).empty());
  {
    CMatrix c = CMatrix::Identity(2, 2);
    c(0, 1) = 0.01;
    const auto f = factor_near_identity<double>(c, 0.01);
    REQUIRE(f.size() == 1);
    CHECK(f[0].type == FactorType{0, 1});
    CHECK(f[0].coeff == Complex(0.01));
  }
  CHECK(near_identity_radius(2) == 1.0 / 16);
  CMatrix far = CMatrix::Identity(2, 2);
  far(0, 1) = 0.1;
  CHECK_THROWS_AS(factor_near_identity<double>(far, 0.1), PreconditionError);  // above 1/16
  CHECK_THROWS_AS(factor_near_identity<double>(far, 0.05), PreconditionError);  // ||C - I|| > rho
  CMatrix det(2, 2);
  det << 1.01, 0, 0, 1;
  CHECK_THROWS_AS(factor_near_identity<double>(det, 0.05), PreconditionError);
}

TEST_CASE("factor_near_identity on random perturbations") {
  std::mt19937_64 rng(5);
  for (Index m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 40; ++trial) {
      CMatrix r(m, m);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) r(i, j) = oracle::random_complex(rng);
      // Scale so the perturbation fills a random fraction of the admissible radius.
      const double target = near_identity_radius(static_cast<int>(m)) * (trial % 2 ? 0.9 : 0.01);
      CMatrix c = CMatrix::Identity(m, m) + r * (0.5 * target / oracle::max_abs(r));
      c /= std::pow(c.determinant(), 1.0 / static_cast<double>(m));
      const double rho = oracle::max_abs(c - CMatrix::Identity(m, m));
      REQUIRE(rho <= near_identity_radius(static_cast<int>(m)));
      const auto f = factor_near_identity<double>(c, rho);
      CHECK(oracle::max_abs(oracle::dense_product(m, f) - c) <= 1e-12);
      const auto bounds = near_identity_bounds(static_cast<int>(m), rho);
      for (const auto& e : f) CHECK(std::abs(e.coeff) <= std::max(bounds.triangular, bounds.diagonal));
      CHECK(static_cast<Index>(f.size()) <= m * (m - 1) + 4 * (m - 1));
    }
  }
}
