#pragma once

// Solvability of A x = b over the sequence ring. At a single point the
// margin of (A, b) is the largest delta with ||A* y||_2 >= delta |<y, b>|
// for all y, which equals 1 / ||x_min||_2 (x_min the least-norm solution).
// A sequence system is solvable with polynomial growth iff the margins decay
// at most polynomially: delta_n >= delta (1 + |n|_1)^{-k}.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "perdist/parallel.hpp"
#include "perdist/ring_core.hpp"

namespace perdist {

/// x_min if b lies in the range of A; otherwise a certificate y with
/// A* y = 0 and <y, b> != 0.
template <typename Scalar>
struct LeastNormResult {
  bool consistent{true};
  ComplexVector<Scalar> x;   // minimum-norm solution (when consistent)
  ComplexVector<Scalar> y0;  // A* y0 = x (when consistent)
  ComplexVector<Scalar> y;   // range-failure certificate (when inconsistent)
};

/// Relative rank threshold of the orthogonal decompositions.
template <typename Scalar>
constexpr Scalar rank_threshold() {
  return Scalar(1e-10);
}

/// Relative residual above which b is declared outside range A.
template <typename Scalar>
constexpr Scalar range_tolerance() {
  return Scalar(1e-8);
}

/// Least-norm solve of A x = b. Rows are scaled to unit norm first (this
/// keeps the solution set, and so x_min, unchanged), then a complete
/// orthogonal decomposition gives the minimum-norm least-squares solution.
template <typename Scalar>
LeastNormResult<Scalar> least_norm_solve(const ComplexMatrix<Scalar>& a, const ComplexVector<Scalar>& b) {
  using Matrix = ComplexMatrix<Scalar>;
  using Vector = ComplexVector<Scalar>;
  if (a.rows() != b.size()) throw PreconditionError("least_norm_solve: b length differs from row count");
  if (a.rows() == 0 || a.cols() == 0) throw PreconditionError("least_norm_solve: empty matrix");
  LeastNormResult<Scalar> out;
  if (b.isZero(0)) {
    out.x = Vector::Zero(a.cols());
    out.y0 = Vector::Zero(a.rows());
    return out;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scale(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    const Scalar r = a.row(i).norm();
    scale[i] = r > 0 ? 1 / r : Scalar(1);
  }
  const Matrix as = scale.asDiagonal() * a;
  const Vector bs = scale.asDiagonal() * b;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(rank_threshold<Scalar>());
  cod.compute(as);
  out.x = cod.solve(bs);
  const Vector r = bs - as * out.x;
  if (r.norm() > range_tolerance<Scalar>() * bs.norm()) {
    out.consistent = false;
    out.y = scale.asDiagonal() * r;
    out.x.resize(0);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> adj;
  adj.setThreshold(rank_threshold<Scalar>());
  adj.compute(as.adjoint());
  out.y0 = scale.asDiagonal() * adj.solve(out.x);
  return out;
}

/// +inf if b = 0, 0 if b is outside range A, else 1 / ||x_min||_2.
template <typename Scalar>
Scalar corona_margin(const ComplexMatrix<Scalar>& a, const ComplexVector<Scalar>& b) {
  if (b.isZero(0)) return std::numeric_limits<Scalar>::infinity();
  const auto r = least_norm_solve(a, b);
  if (!r.consistent) return 0;
  return 1 / r.x.norm();
}

enum class Verdict { solvable, unsolvable };

inline const char* to_string(Verdict v) { return v == Verdict::solvable ? "solvable" : "unsolvable"; }

template <typename Scalar>
struct CoronaCertificate {
  Scalar delta{0};  // min_n delta_n (1 + |n|_1)^k; +inf when b vanishes everywhere
  int k{0};
  std::vector<Scalar> per_point_margin;  // delta_n, +inf where b(n) = 0
  Verdict verdict{Verdict::unsolvable};
  std::optional<Index> witness_point;    // range failure, or where delta is attained
  ComplexVector<Scalar> witness_y;       // A(n)* y = 0, <y, b(n)> != 0 on range failure
  bool range_failure{false};
  // delta below the floor, or delta on the window less than half of delta on
  // the half-radius subwindow: the weighted margins are still collapsing.
  bool margin_degenerate{false};
  std::string reason;
};

/// Floor under which a fitted delta counts as zero.
template <typename Scalar>
constexpr Scalar delta_floor() {
  return Scalar(1e-9);
}

/// A sequence system: A is m x n, b is m x 1, both on one window.
template <typename Scalar>
CoronaCertificate<Scalar> corona_check_sequence(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b,
                                                int k) {
  require_same_window(a.window(), b.window());
  if (b.cols() != 1 || b.rows() != a.rows()) throw PreconditionError("b must be an m x 1 sequence matrix");
  if (k < 0) throw PreconditionError("k must be nonnegative");
  const auto& window = a.window();
  const Index points = window.size();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  CoronaCertificate<Scalar> cert;
  cert.k = k;
  cert.per_point_margin.assign(static_cast<std::size_t>(points), inf);
  std::vector<char> failed(static_cast<std::size_t>(points), 0);
  parallel_for(points, [&](Index i) {
    const ComplexVector<Scalar> bi = b.at(i).col(0);
    if (bi.isZero(0)) return;
    const auto r = least_norm_solve<Scalar>(a.at(i), bi);
    if (!r.consistent) {
      failed[static_cast<std::size_t>(i)] = 1;
      cert.per_point_margin[static_cast<std::size_t>(i)] = 0;
    } else {
      cert.per_point_margin[static_cast<std::size_t>(i)] = 1 / r.x.norm();
    }
  });

  for (Index i = 0; i < points; ++i) {
    if (!failed[static_cast<std::size_t>(i)]) continue;
    cert.range_failure = true;
    cert.delta = 0;
    cert.witness_point = i;
    cert.witness_y = least_norm_solve<Scalar>(a.at(i), b.at(i).col(0)).y;
    cert.reason = "b(n) is not in the range of A(n) at " + window.point_string(i);
    return cert;
  }

  const int half = window.radius() / 2;
  Scalar delta = inf;
  Scalar delta_half = inf;
  for (Index i = 0; i < points; ++i) {
    const Scalar margin = cert.per_point_margin[static_cast<std::size_t>(i)];
    if (std::isinf(margin)) continue;
    const Scalar weighted = margin * std::pow(Scalar(1 + window.norm1_at(i)), k);
    if (weighted < delta) {
      delta = weighted;
      cert.witness_point = i;
    }
    if (window.norm1_at(i) <= half) delta_half = std::min(delta_half, weighted);
  }
  cert.delta = delta;
  cert.verdict = delta > 0 ? Verdict::solvable : Verdict::unsolvable;
  cert.margin_degenerate =
      !std::isinf(delta) && (delta < delta_floor<Scalar>() || (!std::isinf(delta_half) && delta < delta_half / 2));
  if (cert.margin_degenerate) {
    cert.reason = "weighted margin collapses toward 0 at " + window.point_string(*cert.witness_point);
  }
  return cert;
}

/// Smallest k in [0, k_max] whose certificate is solvable and not degenerate.
/// On failure returns the last certificate computed with verdict unsolvable.
template <typename Scalar>
CoronaCertificate<Scalar> find_certificate(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b, int k_max = 8) {
  if (k_max < 0) throw PreconditionError("k_max must be nonnegative");
  CoronaCertificate<Scalar> cert;
  for (int k = 0; k <= k_max; ++k) {
    cert = corona_check_sequence(a, b, k);
    if (cert.range_failure) return cert;
    if (cert.verdict == Verdict::solvable && !cert.margin_degenerate) return cert;
  }
  cert.verdict = Verdict::unsolvable;
  cert.reason = "no k <= " + std::to_string(k_max) + " gives a stable margin; " + cert.reason;
  return cert;
}

/// Pointwise least-norm solution with the envelope (1/delta, k) on ||x(n)||_2.
template <typename Scalar>
struct SeqSolution {
  SeqMatrix<Scalar> x;  // n x 1
  GrowthEnvelope<Scalar> envelope;
  Scalar max_residual{0};  // max_n ||A(n) x(n) - b(n)||_2 / max(1, ||b(n)||_2)
};

template <typename Scalar>
SeqSolution<Scalar> solve_sequence(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b,
                                   const CoronaCertificate<Scalar>& cert) {
  if (cert.verdict != Verdict::solvable) throw PreconditionError("solve_sequence: certificate is not solvable");
  require_same_window(a.window(), b.window());
  const auto& window = a.window();
  const Index points = window.size();
  const Index n = a.cols();
  const GrowthEnvelope<Scalar> env{std::isinf(cert.delta) ? Scalar(0) : 1 / cert.delta, cert.k};

  std::vector<ComplexVector<Scalar>> cols(static_cast<std::size_t>(n), ComplexVector<Scalar>::Zero(points));
  std::vector<Scalar> residual(static_cast<std::size_t>(points), 0);
  std::vector<char> bad(static_cast<std::size_t>(points), 0);
  parallel_for(points, [&](Index i) {
    const auto ai = a.at(i);
    const ComplexVector<Scalar> bi = b.at(i).col(0);
    const auto r = least_norm_solve<Scalar>(ai, bi);
    if (!r.consistent) {
      bad[static_cast<std::size_t>(i)] = 1;
      return;
    }
    for (Index j = 0; j < n; ++j) cols[static_cast<std::size_t>(j)][i] = r.x[j];
    residual[static_cast<std::size_t>(i)] = (ai * r.x - bi).norm() / std::max(Scalar(1), bi.norm());
    const Scalar bound = env.bound(window.norm1_at(i));
    if (r.x.norm() > bound + GrowthEnvelope<Scalar>::default_tolerance() * std::max(Scalar(1), bound)) {
      bad[static_cast<std::size_t>(i)] = 2;
    }
  });
  SeqSolution<Scalar> out{SeqMatrix<Scalar>(1, 1, {PolyGrowthSeq<Scalar>::zero(window)}), env, 0};
  for (Index i = 0; i < points; ++i) {
    if (bad[static_cast<std::size_t>(i)]) {
      throw Error("solve_sequence: certificate contradicted at " + window.point_string(i));
    }
    out.max_residual = std::max(out.max_residual, residual[static_cast<std::size_t>(i)]);
  }
  std::vector<PolyGrowthSeq<Scalar>> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (auto& c : cols) entries.emplace_back(window, std::move(c), env);
  out.x = SeqMatrix<Scalar>(n, 1, std::move(entries));
  return out;
}

/// A certificate together with the solution it licenses.
template <typename Scalar>
struct CoronaResult {
  CoronaCertificate<Scalar> certificate;
  std::optional<SeqSolution<Scalar>> solution;
};

/// Certificate search plus solve.
template <typename Scalar>
CoronaResult<Scalar> solve(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b, int k_max = 8) {
  CoronaResult<Scalar> out{find_certificate(a, b, k_max), std::nullopt};
  if (out.certificate.verdict == Verdict::solvable) out.solution = solve_sequence(a, b, out.certificate);
  return out;
}

/// Bounded variant: inputs carry k = 0 envelopes and k is pinned to 0, so
/// ||x(n)||_2 <= 1/delta uniformly. A degenerate margin counts as unsolvable.
template <typename Scalar>
CoronaResult<Scalar> solve_bounded(const SeqMatrix<Scalar>& a, const SeqMatrix<Scalar>& b) {
  if (a.envelope().k != 0 || b.envelope().k != 0) {
    throw PreconditionError("solve_bounded: entries must carry k = 0 envelopes");
  }
  CoronaResult<Scalar> out{corona_check_sequence(a, b, 0), std::nullopt};
  if (out.certificate.margin_degenerate) out.certificate.verdict = Verdict::unsolvable;
  if (out.certificate.verdict == Verdict::solvable) out.solution = solve_sequence(a, b, out.certificate);
  return out;
}

}  // namespace perdist
