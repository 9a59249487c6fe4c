#pragma once

// Factorization of A in SL_m(C) into elementary matrices I + alpha e_ij with
// factor norms bounded by C(m) (1 + ||A||_inf)^{k(m)}, where ||A||_inf is the
// largest entry modulus and C, k, and the factor count nu depend on m only.
//
// Reduction: pick the largest entry as pivot, normalize it to 1 with the
// four-factor block diag(a^-1, a), clear its row and column, and recurse on
// the remaining (m-1) x (m-1) block. What is left is a signed permutation
// matrix of determinant 1, which factors with coefficients in {-1, 0, 1}.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "perdist/errors.hpp"
#include "perdist/ring_core.hpp"

namespace perdist {

/// An ordered pair (row, col), row != col, zero-based. Printed one-based.
struct FactorType {
  Index row{0};
  Index col{1};
  friend bool operator==(const FactorType&, const FactorType&) = default;
};

/// I_m + coeff * e_{row,col}.
template <typename Scalar>
struct ElementaryFactor {
  Index m{2};
  FactorType type;
  std::complex<Scalar> coeff;

  ComplexMatrix<Scalar> dense() const {
    ComplexMatrix<Scalar> e = ComplexMatrix<Scalar>::Identity(m, m);
    e(type.row, type.col) = coeff;
    return e;
  }
  ElementaryFactor inverse() const { return {m, type, -coeff}; }
  /// ||E||_inf = max(1, |coeff|).
  Scalar norm() const { return std::max(Scalar(1), std::abs(coeff)); }
};

template <typename Scalar>
using FactorList = std::vector<ElementaryFactor<Scalar>>;

/// M <- M * E, in place (adds coeff * column row to column col).
template <typename Scalar, typename Derived>
void apply_right(Eigen::MatrixBase<Derived>& m, const ElementaryFactor<Scalar>& e) {
  m.col(e.type.col) += e.coeff * m.col(e.type.row);
}

/// M <- E * M, in place (adds coeff * row col to row row).
template <typename Scalar, typename Derived>
void apply_left(const ElementaryFactor<Scalar>& e, Eigen::MatrixBase<Derived>& m) {
  m.row(e.type.row) += e.coeff * m.row(e.type.col);
}

/// Product of the factors in listed order (identity for an empty list).
template <typename Scalar>
ComplexMatrix<Scalar> ordered_product(Index m, const FactorList<Scalar>& factors) {
  ComplexMatrix<Scalar> p = ComplexMatrix<Scalar>::Identity(m, m);
  for (const auto& f : factors) apply_right(p, f);
  return p;
}

/// Inverse of a listed product: reversed order, negated coefficients.
template <typename Scalar>
FactorList<Scalar> inverse_list(const FactorList<Scalar>& factors) {
  FactorList<Scalar> out;
  out.reserve(factors.size());
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) out.push_back(it->inverse());
  return out;
}

/// max |m_ij|.
template <typename Derived>
auto max_entry_norm(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

/// (m!)^{-1/m}: a matrix with determinant +-1 has some entry at least this large.
inline double min_entry_bound(int m) {
  if (m < 1) throw PreconditionError("min_entry_bound: m must be >= 1");
  double log_fact = 0;
  for (int j = 2; j <= m; ++j) log_fact += std::log(static_cast<double>(j));
  return std::exp(-log_fact / m);
}

/// Constants of the bound law max ||E|| <= C (1 + ||A||)^k and |factors| <= nu.
struct BoundConstants {
  double C{1};
  int k{0};
  int nu{0};
  friend bool operator==(const BoundConstants&, const BoundConstants&) = default;
};

/// Budget for the signed-permutation tail: 3(m-1) for one signed swap per
/// position, plus s(m) = 3(m-1) for sign corrections (a position that needs
/// no swap but carries -1 costs two swaps).
inline int permutation_budget(int m) { return m < 2 ? 0 : 6 * (m - 1); }

/// nu(m) = sum_{j=2}^m (2(j-1) + 4) + permutation_budget(m).
///
/// C(m), k(m) follow from one reduction stage on an active block of size j
/// with entry norm mu (all magnitudes below are exact bounds):
///   E_a coefficients  <= 1 + max(mu, 1/mu) <= (1 + (j!)^{1/j}) (1 + mu),
///   row clearing      <= mu^2,  column clearing <= 1,
///   next block        mu' <= 2 max(mu, mu^2), so 1 + mu' <= 3 (1 + mu)^2.
/// Writing 1 + mu_j <= c_j t^{e_j} with t = 1 + ||A||, c_m = e_m = 1 gives
/// c_{j-1} = 3 c_j^2, e_{j-1} = 2 e_j, and stage-j factors are bounded by
/// max((1 + (j!)^{1/j}) c_j, c_j^2) t^{2 e_j}.
inline BoundConstants bound_constants(int m) {
  if (m < 1) throw PreconditionError("bound_constants: m must be >= 1");
  BoundConstants b;
  b.nu = permutation_budget(m);
  double c = 1;
  int e = 1;
  for (int j = m; j >= 2; --j) {
    b.nu += 2 * (j - 1) + 4;
    const double rho = 1 / min_entry_bound(j);
    b.C = std::max({b.C, (1 + rho) * c, c * c});
    b.k = std::max(b.k, 2 * e);
    c = 3 * c * c;
    e *= 2;
  }
  return b;
}

/// Four factors whose ordered product is diag(a^-1, a) on rows/cols (p, q),
/// identity elsewhere:
///   E_qp(a) E_pq(1 - a^-1) E_qp(-1) E_pq(1 - a).
/// Each coefficient is bounded by 1 + max(|a|, |a^-1|).
template <typename Scalar>
std::array<ElementaryFactor<Scalar>, 4> ea_block(std::complex<Scalar> a, Index m, Index p, Index q) {
  using C = std::complex<Scalar>;
  if (a == C(0)) throw PreconditionError("ea_block: a must be nonzero");
  if (p == q || p < 0 || q < 0 || p >= m || q >= m) throw PreconditionError("ea_block: bad positions");
  const C inv = C(1) / a;
  return {{{m, {q, p}, a}, {m, {p, q}, C(1) - inv}, {m, {q, p}, C(-1)}, {m, {p, q}, C(1) - a}}};
}

/// Adjacent form: diag(a^-1, a) on (p, p+1).
template <typename Scalar>
std::array<ElementaryFactor<Scalar>, 4> ea_block(std::complex<Scalar> a, Index m, Index p) {
  return ea_block(a, m, p, p + 1);
}

/// Determinant tolerance: |det A - target| <= tol * max(1, H) with H the
/// Hadamard bound prod_i ||row_i||_2, the scale of rounding in det A.
template <typename Scalar>
bool determinant_close(const ComplexMatrix<Scalar>& a, std::complex<Scalar> target, Scalar tol) {
  Scalar hadamard = 1;
  for (Index i = 0; i < a.rows(); ++i) hadamard *= a.row(i).norm();
  return std::abs(a.determinant() - target) <= tol * std::max(Scalar(1), hadamard);
}

/// One reduction stage.
///   row_factors: R_1..R_{m-1}, ea_factors: the block E_a, col_factors: C_1..C_{m-1}
/// satisfy R_{m-1} ... R_1 E_a A C_1 ... C_{m-1} = bordered, where bordered
/// has a 1 at (pivot_row, pivot_col), zeros in the rest of that row and
/// column, and reduced = bordered minus that row and column.
template <typename Scalar>
struct PivotReduction {
  Index pivot_row{0};
  Index pivot_col{0};
  std::complex<Scalar> pivot;
  FactorList<Scalar> row_factors;
  FactorList<Scalar> ea_factors;
  FactorList<Scalar> col_factors;
  ComplexMatrix<Scalar> bordered;
  ComplexMatrix<Scalar> reduced;
};

namespace detail {

// Stage without the determinant check; used inside the recursion where the
// active block has det +-1 only up to rounding.
template <typename Scalar>
PivotReduction<Scalar> pivot_stage(const ComplexMatrix<Scalar>& a) {
  using C = std::complex<Scalar>;
  const Index m = a.rows();
  PivotReduction<Scalar> out;
  // Largest modulus; ties resolved by smallest (row, col) in row-major order.
  Scalar best = -1;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (std::abs(a(i, j)) > best) {
        best = std::abs(a(i, j));
        out.pivot_row = i;
        out.pivot_col = j;
      }
  const Index ip = out.pivot_row;
  const Index jp = out.pivot_col;
  out.pivot = a(ip, jp);
  ComplexMatrix<Scalar> w = a;

  if (m >= 2 && out.pivot != C(1)) {
    const Index partner = ip + 1 < m ? ip + 1 : ip - 1;
    const auto block = ea_block(out.pivot, m, ip, partner);
    out.ea_factors.assign(block.begin(), block.end());
    for (auto it = out.ea_factors.rbegin(); it != out.ea_factors.rend(); ++it) apply_left(*it, w);
  }
  w(ip, jp) = C(1);

  for (Index r = 0; r < m; ++r) {
    if (r == ip || w(r, jp) == C(0)) continue;
    ElementaryFactor<Scalar> e{m, {r, ip}, -w(r, jp)};
    apply_left(e, w);
    w(r, jp) = C(0);
    out.row_factors.push_back(e);
  }
  for (Index c = 0; c < m; ++c) {
    if (c == jp || w(ip, c) == C(0)) continue;
    ElementaryFactor<Scalar> e{m, {jp, c}, -w(ip, c)};
    apply_right(w, e);
    w(ip, c) = C(0);
    out.col_factors.push_back(e);
  }
  out.bordered = w;
  out.reduced.resize(m - 1, m - 1);
  for (Index i = 0, ri = 0; i < m; ++i) {
    if (i == ip) continue;
    for (Index j = 0, rj = 0; j < m; ++j) {
      if (j == jp) continue;
      out.reduced(ri, rj++) = w(i, j);
    }
    ++ri;
  }
  return out;
}

}  // namespace detail

/// One pivot stage on A with det A = +-1 (within tol).
template <typename Scalar>
PivotReduction<Scalar> pivot_reduce(const ComplexMatrix<Scalar>& a, Scalar tol = Scalar(1e-9)) {
  using C = std::complex<Scalar>;
  const Index m = a.rows();
  if (m < 2 || a.cols() != m) throw PreconditionError("pivot_reduce: need a square matrix of size >= 2");
  if (!determinant_close<Scalar>(a, C(1), tol) && !determinant_close<Scalar>(a, C(-1), tol)) {
    throw PreconditionError("pivot_reduce: determinant is not +-1 within tolerance");
  }
  if (max_entry_norm(a) < min_entry_bound(static_cast<int>(m)) * (1 - tol)) {
    throw PreconditionError("pivot_reduce: ||A||_inf below (m!)^{-1/m}");
  }
  return detail::pivot_stage<Scalar>(a);
}

/// Factors a signed permutation matrix of determinant 1 (one entry of +-1 per
/// row and column, zeros elsewhere; plain even permutations included) into
/// elementary matrices with coefficients in {-1, 1}. Each signed swap
/// S_ij = E_ji(-1) E_ij(1) E_ji(-1) sends row j to row i and -row i to row j.
template <typename Scalar>
FactorList<Scalar> factor_permutation_even(const ComplexMatrix<Scalar>& p) {
  using C = std::complex<Scalar>;
  const Index m = p.rows();
  if (p.cols() != m) throw PreconditionError("permutation matrix must be square");
  for (Index i = 0; i < m; ++i) {
    int nonzeros = 0;
    for (Index j = 0; j < m; ++j) {
      const C v = p(i, j);
      if (v == C(0)) continue;
      if (v != C(1) && v != C(-1)) throw PreconditionError("not a (signed) permutation matrix");
      ++nonzeros;
    }
    if (nonzeros != 1 || (p.col(i).array() != C(0)).count() != 1) {
      throw PreconditionError("not a (signed) permutation matrix");
    }
  }
  if (p.determinant().real() < 0) throw PreconditionError("odd permutation: det P = -1");

  // Left-reduce Q to I with signed swaps; P is the product of their inverses
  // in application order.
  ComplexMatrix<Scalar> q = p;
  FactorList<Scalar> out;
  auto swap_factors = [m](Index i, Index j) {
    return std::array<ElementaryFactor<Scalar>, 3>{
        {{m, {j, i}, C(-1)}, {m, {i, j}, C(1)}, {m, {j, i}, C(-1)}}};
  };
  // Applies S_ij to q and appends S_ij^{-1} = S_ji.
  auto apply_swap = [&](Index i, Index j) {
    const auto row_i = q.row(i).eval();
    q.row(i) = q.row(j);
    q.row(j) = -row_i;
    const auto inv = swap_factors(j, i);
    out.insert(out.end(), inv.begin(), inv.end());
  };
  for (Index c = 0; c + 1 < m; ++c) {
    Index r = c;
    while (q(r, c) == C(0)) ++r;
    if (r != c) {
      if (q(r, c) == C(1)) {
        apply_swap(c, r);
      } else {
        apply_swap(r, c);
      }
    } else if (q(c, c) == C(-1)) {
      apply_swap(c, c + 1);
      apply_swap(c, c + 1);
    }
  }
  return out;
}

/// Result of factor_slm.
template <typename Scalar>
struct FactorizationReport {
  Index m{0};
  FactorList<Scalar> factors;
  Scalar input_norm{0};
  Scalar max_factor_norm{1};
  Scalar reconstruction_residual{0};  // max entry of |product - A|
  BoundConstants constants;

  Scalar residual_bound(Scalar tol = Scalar(1e-9)) const {
    return tol * std::pow(1 + input_norm, constants.k);
  }
  Scalar norm_bound() const { return Scalar(constants.C) * std::pow(1 + input_norm, constants.k); }
  bool within_bounds(Scalar tol = Scalar(1e-9)) const {
    return reconstruction_residual <= residual_bound(tol) &&
           static_cast<int>(factors.size()) <= constants.nu && max_factor_norm <= norm_bound();
  }
};

/// A = E_1 ... E_K with K <= nu(m) and max ||E_i|| <= C(m) (1 + ||A||)^{k(m)}.
/// The identity gives an empty list and an elementary matrix gives itself.
template <typename Scalar>
FactorizationReport<Scalar> factor_slm(const ComplexMatrix<Scalar>& a, Scalar tol = Scalar(1e-9)) {
  using C = std::complex<Scalar>;
  const Index m = a.rows();
  if (m < 1 || a.cols() != m) throw PreconditionError("factor_slm: need a nonempty square matrix");
  if (!determinant_close<Scalar>(a, C(1), tol)) {
    std::ostringstream os;
    os << "factor_slm: det A = " << a.determinant() << " is not 1 within tolerance";
    throw PreconditionError(os.str());
  }
  FactorizationReport<Scalar> rep;
  rep.m = m;
  rep.input_norm = max_entry_norm(a);
  rep.constants = bound_constants(static_cast<int>(m));

  // Off-diagonal support of A - I, when the diagonal is exactly 1.
  std::vector<FactorType> off;
  bool unit_diagonal = true;
  for (Index i = 0; i < m; ++i) {
    unit_diagonal = unit_diagonal && a(i, i) == C(1);
    for (Index j = 0; j < m; ++j)
      if (i != j && a(i, j) != C(0)) off.push_back({i, j});
  }
  if (unit_diagonal && off.size() <= 1) {
    if (off.size() == 1) rep.factors.push_back({m, off.front(), a(off.front().row, off.front().col)});
  } else {
    std::vector<Index> rows(static_cast<std::size_t>(m)), cols(static_cast<std::size_t>(m));
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    FactorList<Scalar> left;   // W = (left[0] left[1] ...) A (right[0] right[1] ...)
    FactorList<Scalar> right;
    std::vector<std::pair<Index, Index>> pivots;
    ComplexMatrix<Scalar> active = a;
    auto lift = [m](ElementaryFactor<Scalar> e, const std::vector<Index>& ri, const std::vector<Index>& ci) {
      e.m = m;
      e.type = {ri[static_cast<std::size_t>(e.type.row)], ci[static_cast<std::size_t>(e.type.col)]};
      return e;
    };
    while (active.rows() >= 2) {
      auto stage = detail::pivot_stage<Scalar>(active);
      FactorList<Scalar> block;
      for (auto it = stage.row_factors.rbegin(); it != stage.row_factors.rend(); ++it)
        block.push_back(lift(*it, rows, rows));
      for (const auto& f : stage.ea_factors) block.push_back(lift(f, rows, rows));
      left.insert(left.begin(), block.begin(), block.end());
      for (const auto& f : stage.col_factors) right.push_back(lift(f, cols, cols));
      pivots.emplace_back(rows[static_cast<std::size_t>(stage.pivot_row)],
                          cols[static_cast<std::size_t>(stage.pivot_col)]);
      rows.erase(rows.begin() + stage.pivot_row);
      cols.erase(cols.begin() + stage.pivot_col);
      active = std::move(stage.reduced);
    }
    pivots.emplace_back(rows.front(), cols.front());

    // The residual is a signed permutation; its last entry is +-1 as forced
    // by det = 1.
    ComplexMatrix<Scalar> perm = ComplexMatrix<Scalar>::Zero(m, m);
    for (const auto& [i, j] : pivots) perm(i, j) = C(1);
    if (perm.determinant().real() < 0) perm(pivots.back().first, pivots.back().second) = C(-1);

    rep.factors = inverse_list(left);
    const auto tail = factor_permutation_even<Scalar>(perm);
    rep.factors.insert(rep.factors.end(), tail.begin(), tail.end());
    const auto back = inverse_list(right);
    rep.factors.insert(rep.factors.end(), back.begin(), back.end());
  }

  for (const auto& f : rep.factors) rep.max_factor_norm = std::max(rep.max_factor_norm, f.norm());
  rep.reconstruction_residual = max_entry_norm((ordered_product(m, rep.factors) - a).eval());
  return rep;
}

/// rho_max(m) = 1/(4 m^2): radius up to which factor_near_identity applies.
inline double near_identity_radius(int m) { return 1.0 / (4.0 * m * m); }

/// Coefficient bounds for factor_near_identity at radius rho: triangular
/// factors <= 2 rho, diagonal factors <= 2 sqrt(m rho). The square root is
/// unavoidable: a product of elementary factors with coefficients of size
/// eps moves the diagonal only at order eps^2.
struct NearIdentityBounds {
  double triangular;
  double diagonal;
};
inline NearIdentityBounds near_identity_bounds(int m, double rho) {
  return {2 * rho, 2 * std::sqrt(m * rho)};
}

/// Four factors with product diag(x^-1, x) on (p, p+1) and coefficients
/// of size about sqrt|x - 1|:
///   E_{p+1,p}((x-1)/t) E_{p,p+1}(t) E_{p+1,p}((1-x)/(x t)) E_{p,p+1}(-t x),  t = sqrt|x-1|.
template <typename Scalar>
FactorList<Scalar> small_diagonal_block(std::complex<Scalar> x, Index m, Index p) {
  using C = std::complex<Scalar>;
  if (x == C(1)) return {};
  const Scalar t = std::sqrt(std::abs(x - C(1)));
  return {{m, {p + 1, p}, (x - C(1)) / t},
          {m, {p, p + 1}, C(t)},
          {m, {p + 1, p}, (C(1) - x) / (x * t)},
          {m, {p, p + 1}, -t * x}};
}

/// Factors C with det C = 1 and max |C - I| <= rho <= rho_max(m) by
/// elimination without pivoting: C = L D U, L and U unit triangular (one
/// factor per nonzero entry), D split into chained diag(x^-1, x) blocks.
template <typename Scalar>
FactorList<Scalar> factor_near_identity(const ComplexMatrix<Scalar>& c, Scalar rho,
                                        Scalar tol = Scalar(1e-9)) {
  using Cx = std::complex<Scalar>;
  const Index m = c.rows();
  if (m < 1 || c.cols() != m) throw PreconditionError("factor_near_identity: need a square matrix");
  if (!(rho >= 0) || rho > near_identity_radius(static_cast<int>(m))) {
    throw PreconditionError("factor_near_identity: radius exceeds 1/(4 m^2)");
  }
  const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(m, m);
  if (max_entry_norm((c - id).eval()) > rho) {
    throw PreconditionError("factor_near_identity: ||C - I||_inf exceeds the radius");
  }
  if (!determinant_close<Scalar>(c, Cx(1), tol)) {
    throw PreconditionError("factor_near_identity: det C is not 1 within tolerance");
  }

  ComplexMatrix<Scalar> s = c;
  ComplexMatrix<Scalar> lower = id;
  for (Index k = 0; k + 1 < m; ++k) {
    for (Index i = k + 1; i < m; ++i) {
      const Cx l = s(i, k) / s(k, k);
      lower(i, k) = l;
      s.row(i).tail(m - k) -= l * s.row(k).tail(m - k);
      s(i, k) = Cx(0);
    }
  }

  FactorList<Scalar> out;
  for (Index k = 0; k + 1 < m; ++k)
    for (Index i = k + 1; i < m; ++i)
      if (lower(i, k) != Cx(0)) out.push_back({m, {i, k}, lower(i, k)});

  Cx x(1);
  for (Index k = 0; k + 1 < m; ++k) {
    x /= s(k, k);
    const auto block = small_diagonal_block(x, m, k);
    out.insert(out.end(), block.begin(), block.end());
  }

  for (Index k = m - 1; k-- > 0;) {
    for (Index j = k + 1; j < m; ++j) {
      const Cx u = s(k, j) / s(k, k);
      if (u != Cx(0)) out.push_back({m, {k, j}, u});
    }
  }
  return out;
}

}  // namespace perdist
