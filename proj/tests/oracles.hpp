#pragma once

// Independent reference computations for tests. Nothing here calls into the
// algorithms under test beyond plain data types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <vector>

#include "perdist/elem_factor.hpp"
#include "perdist/ring_core.hpp"

namespace oracle {

using perdist::CMatrix;
using perdist::Complex;
using perdist::CVector;
using Eigen::Index;

/// Lattice points with |n|_1 <= radius, by filtering the cube and sorting.
inline std::vector<std::vector<int>> window_points(int d, int radius) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(static_cast<std::size_t>(d), -radius);
  while (true) {
    int s = 0;
    for (int c : p) s += std::abs(c);
    if (s <= radius) out.push_back(p);
    int axis = d - 1;
    while (axis >= 0 && p[static_cast<std::size_t>(axis)] == radius) p[static_cast<std::size_t>(axis--)] = -radius;
    if (axis < 0) break;
    ++p[static_cast<std::size_t>(axis)];
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Minimum-norm solution through the SVD pseudoinverse (relative cutoff 1e-10).
inline CVector pinv_solve(const CMatrix& a, const CVector& b) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() ? 1e-10 * s[0] : 0;
  CVector ub = svd.matrixU().adjoint() * b;
  CVector z = CVector::Zero(a.cols());
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) z[i] = ub[i] / s[i];
  return svd.matrixV() * z;
}

inline int svd_rank(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Index i = 0; i < s.size(); ++i) r += s[i] > 1e-10 * s[0];
  return r;
}

/// Product of factors as explicit dense matrices.
inline CMatrix dense_product(Index m, const perdist::FactorList<double>& factors) {
  CMatrix p = CMatrix::Identity(m, m);
  for (const auto& f : factors) {
    CMatrix e = CMatrix::Identity(m, m);
    e(f.type.row, f.type.col) += f.coeff;
    p = p * e;
  }
  return p;
}

inline Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

/// Gaussian matrix rescaled to determinant 1.
inline CMatrix random_sl(Index m, std::mt19937_64& rng) {
  CMatrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = random_complex(rng);
  const Complex det = a.determinant();
  a /= std::pow(det, 1.0 / static_cast<double>(m));
  return a;
}

inline double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace oracle
