#pragma once

// Windowed elements of the ring of polynomially bounded sequences on Z^d.
//
// A sequence is stored by its values on the finite window
// {n in Z^d : |n|_1 <= N} together with a growth envelope (M, k) certifying
// |a(n)| <= M (1 + |n|_1)^k at every stored point. All ring operations are
// pointwise and propagate envelopes in closed form.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "perdist/errors.hpp"

namespace perdist {

using Eigen::Index;

/// |n|_1 = |n_1| + ... + |n_d|.
inline int norm1(std::span<const int> n) {
  int s = 0;
  for (int c : n) s += std::abs(c);
  return s;
}

/// The lattice ball {n in Z^d : |n|_1 <= N}, enumerated in lexicographic
/// order of coordinates. Copies share the point table.
class LatticeWindow {
 public:
  LatticeWindow(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  Index size() const { return static_cast<Index>(table_->norms.size()); }

  std::span<const int> point(Index i) const {
    return {table_->coords.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  int norm1_at(Index i) const { return table_->norms[static_cast<std::size_t>(i)]; }

  /// Enumeration index of n, or nullopt when n lies outside the window.
  std::optional<Index> index_of(std::span<const int> n) const;

  std::string point_string(Index i) const;

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.dim_ == b.dim_ && a.radius_ == b.radius_;
  }

 private:
  struct Table {
    std::vector<int> coords;  // size() * dim, row-major
    std::vector<int> norms;
  };
  int dim_;
  int radius_;
  std::shared_ptr<const Table> table_;
};

inline void require_same_window(const LatticeWindow& a, const LatticeWindow& b) {
  if (!(a == b)) {
    std::ostringstream os;
    os << "window mismatch: (d=" << a.dim() << ", N=" << a.radius() << ") vs (d=" << b.dim()
       << ", N=" << b.radius() << ")";
    throw WindowMismatch(os.str());
  }
}

/// Certificate |a(n)| <= M (1 + |n|_1)^k.
template <typename Scalar>
struct GrowthEnvelope {
  Scalar M{0};
  int k{0};

  Scalar bound(int n1) const { return M * std::pow(Scalar(1 + n1), k); }

  /// Slack absorbed when checking floating-point values: a violation must
  /// exceed the bound by more than tol * max(1, bound).
  static constexpr Scalar default_tolerance() { return Scalar(1e-12); }

  friend bool operator==(const GrowthEnvelope&, const GrowthEnvelope&) = default;
};

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// First window point at which env fails to certify values, if any.
template <typename Scalar>
std::optional<Index> envelope_violation(const LatticeWindow& window,
                                        const ComplexVector<Scalar>& values,
                                        const GrowthEnvelope<Scalar>& env,
                                        Scalar tol = GrowthEnvelope<Scalar>::default_tolerance()) {
  for (Index i = 0; i < values.size(); ++i) {
    const Scalar b = env.bound(window.norm1_at(i));
    const Scalar v = std::abs(values[i]);
    if (!(v <= b + tol * std::max(Scalar(1), b))) return i;
  }
  return std::nullopt;
}

/// Smallest M such that (M, k) certifies values: M = max |a(n)| / (1+|n|_1)^k.
template <typename Scalar>
GrowthEnvelope<Scalar> fit_envelope(const LatticeWindow& window,
                                    const ComplexVector<Scalar>& values, int k) {
  if (k < 0) throw PreconditionError("fit_envelope: k must be nonnegative");
  Scalar m = 0;
  for (Index i = 0; i < values.size(); ++i) {
    m = std::max(m, std::abs(values[i]) / std::pow(Scalar(1 + window.norm1_at(i)), k));
  }
  return {m, k};
}

/// Limits for searching an envelope: exponents 0..k_max, multiplier at most
/// m_cap. A sequence that needs more is reported as a growth blow-up.
template <typename Scalar>
struct FitPolicy {
  int k_max = 8;
  Scalar m_cap = Scalar(1e9);
};

/// Smallest k <= k_max whose minimal multiplier is within the cap. On
/// failure, names the point that dominates the k_max fit.
template <typename Scalar>
Outcome<GrowthEnvelope<Scalar>> fit_envelope_capped(const LatticeWindow& window,
                                                    const ComplexVector<Scalar>& values,
                                                    const FitPolicy<Scalar>& policy = {}) {
  for (int k = 0; k <= policy.k_max; ++k) {
    auto env = fit_envelope(window, values, k);
    if (std::isfinite(env.M) && env.M <= policy.m_cap) return env;
  }
  Index worst = 0;
  Scalar worst_ratio = -1;
  for (Index i = 0; i < values.size(); ++i) {
    const Scalar r = std::abs(values[i]) / std::pow(Scalar(1 + window.norm1_at(i)), policy.k_max);
    if (!(r <= worst_ratio)) {
      worst_ratio = r;
      worst = i;
    }
  }
  std::ostringstream os;
  os << "growth exceeds (M <= " << policy.m_cap << ", k <= " << policy.k_max << ") at "
     << window.point_string(worst);
  return Failure{os.str(), worst};
}

/// An element of the sequence ring, sampled on a window with a certified
/// growth envelope. Immutable.
template <typename Scalar>
class PolyGrowthSeq {
 public:
  using Complex = std::complex<Scalar>;
  using Values = ComplexVector<Scalar>;
  using Envelope = GrowthEnvelope<Scalar>;

  /// Throws EnvelopeViolation when env does not certify the values.
  PolyGrowthSeq(LatticeWindow window, Values values, Envelope env)
      : window_(std::move(window)), values_(std::move(values)), env_(env) {
    if (values_.size() != window_.size()) {
      throw PreconditionError("sequence length " + std::to_string(values_.size()) +
                              " does not match window size " + std::to_string(window_.size()));
    }
    if (env_.M < 0 || env_.k < 0) throw EnvelopeViolation("envelope must have M >= 0, k >= 0");
    if (auto bad = envelope_violation(window_, values_, env_)) {
      std::ostringstream os;
      os << "envelope (M=" << env_.M << ", k=" << env_.k << ") violated at "
         << window_.point_string(*bad) << ": |a(n)| = " << std::abs(values_[*bad]);
      throw EnvelopeViolation(os.str());
    }
  }

  /// Attaches the minimal envelope with exponent k.
  static PolyGrowthSeq fitted(LatticeWindow window, Values values, int k = 0) {
    auto env = fit_envelope(window, values, k);
    return {std::move(window), std::move(values), env};
  }

  static PolyGrowthSeq constant(LatticeWindow window, Complex c) {
    Values v = Values::Constant(window.size(), c);
    return {std::move(window), std::move(v), Envelope{std::abs(c), 0}};
  }
  static PolyGrowthSeq zero(LatticeWindow window) { return constant(std::move(window), Complex(0)); }
  static PolyGrowthSeq one(LatticeWindow window) { return constant(std::move(window), Complex(1)); }

  /// Samples f(n) for every window point n; envelope fitted with exponent k.
  template <typename F>
  static PolyGrowthSeq generate(const LatticeWindow& window, F&& f, int k = 0) {
    Values v(window.size());
    for (Index i = 0; i < window.size(); ++i) v[i] = Complex(f(window.point(i)));
    return fitted(window, std::move(v), k);
  }

  const LatticeWindow& window() const { return window_; }
  const Values& values() const { return values_; }
  const Envelope& envelope() const { return env_; }
  Index size() const { return values_.size(); }
  Complex operator[](Index i) const { return values_[i]; }

  /// Same values, different certificate (verified).
  PolyGrowthSeq with_envelope(Envelope env) const { return {window_, values_, env}; }

 private:
  LatticeWindow window_;
  Values values_;
  Envelope env_;
};

template <typename Scalar>
PolyGrowthSeq<Scalar> add(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) {
  require_same_window(a.window(), b.window());
  return {a.window(), a.values() + b.values(),
          {a.envelope().M + b.envelope().M, std::max(a.envelope().k, b.envelope().k)}};
}

template <typename Scalar>
PolyGrowthSeq<Scalar> mul(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) {
  require_same_window(a.window(), b.window());
  return {a.window(), a.values().cwiseProduct(b.values()),
          {a.envelope().M * b.envelope().M, a.envelope().k + b.envelope().k}};
}

template <typename Scalar>
PolyGrowthSeq<Scalar> operator+(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
PolyGrowthSeq<Scalar> operator*(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) {
  return mul(a, b);
}

/// |a|(n) = |a(n)|.
template <typename Scalar>
PolyGrowthSeq<Scalar> modulus(const PolyGrowthSeq<Scalar>& a) {
  using C = std::complex<Scalar>;
  typename PolyGrowthSeq<Scalar>::Values v =
      a.values().unaryExpr([](const C& z) { return C(std::abs(z)); });
  return {a.window(), std::move(v), a.envelope()};
}

/// a*(n) = conj(a(n)).
template <typename Scalar>
PolyGrowthSeq<Scalar> conjugate(const PolyGrowthSeq<Scalar>& a) {
  return {a.window(), a.values().conjugate(), a.envelope()};
}

/// u_a(n) = a(n)/|a(n)| where a(n) != 0, and 1 where a(n) = 0.
template <typename Scalar>
PolyGrowthSeq<Scalar> unimodular_part(const PolyGrowthSeq<Scalar>& a) {
  using C = std::complex<Scalar>;
  typename PolyGrowthSeq<Scalar>::Values v = a.values().unaryExpr([](const C& z) {
    const Scalar r = std::abs(z);
    return r == 0 ? C(1) : C(z.real() / r, z.imag() / r);
  });
  return {a.window(), std::move(v), {Scalar(1), 0}};
}

/// Indicator of the zero set Z(a). With tau = 0 the test is exact equality.
template <typename Scalar>
PolyGrowthSeq<Scalar> zero_indicator(const PolyGrowthSeq<Scalar>& a, Scalar tau = 0) {
  using C = std::complex<Scalar>;
  typename PolyGrowthSeq<Scalar>::Values v = a.values().unaryExpr(
      [tau](const C& z) { return (tau == 0 ? z == C(0) : std::abs(z) <= tau) ? C(1) : C(0); });
  return {a.window(), std::move(v), {Scalar(1), 0}};
}

/// Enumeration indices of Z(a).
template <typename Scalar>
std::vector<Index> zero_set(const PolyGrowthSeq<Scalar>& a, Scalar tau = 0) {
  std::vector<Index> out;
  for (Index i = 0; i < a.size(); ++i) {
    if (tau == 0 ? a[i] == std::complex<Scalar>(0) : std::abs(a[i]) <= tau) out.push_back(i);
  }
  return out;
}

/// max over points of |x(n) - y(n)| / max(|x(n)|, |y(n)|), with 0/0 := 0.
template <typename Scalar>
Scalar max_relative_residual(const ComplexVector<Scalar>& x, const ComplexVector<Scalar>& y) {
  Scalar worst = 0;
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar diff = std::abs(x[i] - y[i]);
    if (diff == 0) continue;
    worst = std::max(worst, diff / std::max(std::abs(x[i]), std::abs(y[i])));
  }
  return worst;
}

/// m x n matrix over the sequence ring; all entries share one window.
template <typename Scalar>
class SeqMatrix {
 public:
  using Seq = PolyGrowthSeq<Scalar>;
  using Matrix = ComplexMatrix<Scalar>;

  SeqMatrix(Index rows, Index cols, std::vector<Seq> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ < 1 || cols_ < 1) throw PreconditionError("matrix dimensions must be positive");
    if (static_cast<Index>(entries_.size()) != rows_ * cols_) {
      throw PreconditionError("matrix needs " + std::to_string(rows_ * cols_) + " entries, got " +
                              std::to_string(entries_.size()));
    }
    for (const auto& e : entries_) require_same_window(entries_.front().window(), e.window());
  }

  /// Entry (r, c) of f(n) for every window point; each entry gets the
  /// minimal envelope with exponent k.
  template <typename F>
  static SeqMatrix generate(const LatticeWindow& window, Index rows, Index cols, F&& f, int k = 0) {
    std::vector<typename Seq::Values> vals(static_cast<std::size_t>(rows * cols),
                                           typename Seq::Values(window.size()));
    for (Index i = 0; i < window.size(); ++i) {
      const Matrix a = f(window.point(i));
      if (a.rows() != rows || a.cols() != cols) throw PreconditionError("generator shape mismatch");
      for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) vals[static_cast<std::size_t>(r * cols + c)][i] = a(r, c);
    }
    std::vector<Seq> entries;
    entries.reserve(vals.size());
    for (auto& v : vals) entries.push_back(Seq::fitted(window, std::move(v), k));
    return {rows, cols, std::move(entries)};
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const LatticeWindow& window() const { return entries_.front().window(); }
  const Seq& operator()(Index r, Index c) const { return entries_[static_cast<std::size_t>(r * cols_ + c)]; }
  const std::vector<Seq>& entries() const { return entries_; }

  /// The complex matrix A(n) at enumeration index i.
  Matrix at(Index i) const {
    Matrix a(rows_, cols_);
    for (Index r = 0; r < rows_; ++r)
      for (Index c = 0; c < cols_; ++c) a(r, c) = (*this)(r, c)[i];
    return a;
  }

  /// Entrywise max M with the common exponent max k; certifies every entry.
  GrowthEnvelope<Scalar> envelope() const {
    GrowthEnvelope<Scalar> env;
    for (const auto& e : entries_) {
      env.M = std::max(env.M, e.envelope().M);
      env.k = std::max(env.k, e.envelope().k);
    }
    return env;
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<Seq> entries_;
};

using Envelope = GrowthEnvelope<double>;
using Seq = PolyGrowthSeq<double>;
using SeqMat = SeqMatrix<double>;
using Complex = std::complex<double>;
using CVector = ComplexVector<double>;
using CMatrix = ComplexMatrix<double>;

}  // namespace perdist
