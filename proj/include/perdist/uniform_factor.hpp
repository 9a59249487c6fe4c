#pragma once

// Factorization of A in SL_m over the sequence ring. Pointwise factor lists
// have varying length and types; padding them into a fixed "long word"
// (nu(m) groups, each listing every type once) gives one list of elementary
// matrices over the ring whose types do not depend on n.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "perdist/elem_factor.hpp"
#include "perdist/parallel.hpp"
#include "perdist/ring_core.hpp"

namespace perdist {

/// All ordered pairs (i, j), i != j, in row-major order.
inline std::vector<FactorType> type_enumeration(Index m) {
  if (m < 2) throw PreconditionError("type_enumeration: m must be >= 2");
  std::vector<FactorType> out;
  out.reserve(static_cast<std::size_t>(m * m - m));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (i != j) out.push_back({i, j});
  return out;
}

/// nu(m) groups, each a copy of type_enumeration(m).
struct TypeSchedule {
  Index m{2};
  Index group_count{0};
  std::vector<FactorType> slots;

  static TypeSchedule for_size(Index m) {
    TypeSchedule s;
    s.m = m;
    s.group_count = bound_constants(static_cast<int>(m)).nu;
    const auto types = type_enumeration(m);
    s.slots.reserve(static_cast<std::size_t>(s.group_count) * types.size());
    for (Index g = 0; g < s.group_count; ++g) s.slots.insert(s.slots.end(), types.begin(), types.end());
    return s;
  }

  Index group_size() const { return m * m - m; }
  Index size() const { return static_cast<Index>(slots.size()); }

  /// Slot of `type` within group g.
  Index slot_of(Index group, FactorType type) const {
    const Index within = type.row * (m - 1) + (type.col < type.row ? type.col : type.col - 1);
    return group * group_size() + within;
  }
};

template <typename Scalar>
struct SeqElementaryFactor {
  FactorType type;
  PolyGrowthSeq<Scalar> coefficient;
};

template <typename Scalar>
struct UniformFactorization {
  TypeSchedule schedule;
  std::vector<SeqElementaryFactor<Scalar>> factors;  // one per schedule slot
  BoundConstants constants;
  GrowthEnvelope<Scalar> input_envelope;

  /// Certified coefficient law: if A has envelope (M_A, k_A), every
  /// coefficient is bounded by C (1 + M_A)^k (1 + |n|_1)^{k_A k}.
  GrowthEnvelope<Scalar> coefficient_bound() const {
    return {Scalar(constants.C) * std::pow(1 + input_envelope.M, constants.k),
            input_envelope.k * constants.k};
  }
};

/// Pointwise ordered product of the factor values at enumeration index i.
template <typename Scalar>
ComplexMatrix<Scalar> product_at(Index m, const std::vector<SeqElementaryFactor<Scalar>>& factors, Index i) {
  ComplexMatrix<Scalar> p = ComplexMatrix<Scalar>::Identity(m, m);
  for (const auto& f : factors) {
    const auto c = f.coefficient[i];
    if (c != std::complex<Scalar>(0)) apply_right(p, ElementaryFactor<Scalar>{m, f.type, c});
  }
  return p;
}

/// Factors A(n) at every window point and pads factor l of A(n) into group l
/// at the slot of its type. Unused slots carry coefficient 0.
template <typename Scalar>
UniformFactorization<Scalar> factor_slm_sequence(const SeqMatrix<Scalar>& a, Scalar tol = Scalar(1e-9)) {
  const Index m = a.rows();
  if (a.cols() != m) throw PreconditionError("factor_slm_sequence: matrix must be square");
  const auto& window = a.window();
  UniformFactorization<Scalar> out;
  out.schedule = TypeSchedule::for_size(m);
  out.constants = bound_constants(static_cast<int>(m));
  out.input_envelope = a.envelope();

  const Index points = window.size();
  std::vector<FactorList<Scalar>> pointwise(static_cast<std::size_t>(points));
  std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(points));
  parallel_for(points, [&](Index i) {
    try {
      pointwise[static_cast<std::size_t>(i)] = factor_slm<Scalar>(a.at(i), tol).factors;
    } catch (const PreconditionError& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });
  for (Index i = 0; i < points; ++i) {
    if (const auto& e = errors[static_cast<std::size_t>(i)]) {
      throw PreconditionError("at " + window.point_string(i) + ": " + *e);
    }
  }

  std::vector<ComplexVector<Scalar>> coeffs(static_cast<std::size_t>(out.schedule.size()),
                                            ComplexVector<Scalar>::Zero(points));
  for (Index i = 0; i < points; ++i) {
    const auto& list = pointwise[static_cast<std::size_t>(i)];
    if (static_cast<Index>(list.size()) > out.schedule.group_count) {
      throw Error("factor_slm_sequence: pointwise factor count exceeds nu(m)");
    }
    for (std::size_t l = 0; l < list.size(); ++l) {
      const Index slot = out.schedule.slot_of(static_cast<Index>(l), list[l].type);
      coeffs[static_cast<std::size_t>(slot)][i] = list[l].coeff;
    }
  }
  const int k = out.coefficient_bound().k;
  out.factors.reserve(coeffs.size());
  for (Index s = 0; s < out.schedule.size(); ++s) {
    out.factors.push_back({out.schedule.slots[static_cast<std::size_t>(s)],
                           PolyGrowthSeq<Scalar>::fitted(window, std::move(coeffs[static_cast<std::size_t>(s)]), k)});
  }
  return out;
}

template <typename Scalar>
struct UniformReport {
  Scalar max_residual{0};          // max over n of |product(n) - A(n)|_inf / (1 + ||A(n)||)^k
  std::optional<Index> worst_point;
  bool residual_ok{true};
  bool envelopes_ok{true};
  std::optional<Index> bad_envelope;  // factor index
  bool types_ok{true};
  std::optional<Index> bad_type;      // slot index
  bool bound_ok{true};                // fitted envelopes inside coefficient_bound()

  bool passed() const { return residual_ok && envelopes_ok && types_ok && bound_ok; }
};

/// Independent check of a UniformFactorization against A. Residual
/// threshold: tol (1 + ||A(n)||_inf)^{k(m)} at every point.
template <typename Scalar>
UniformReport<Scalar> verify_uniform_factorization(const SeqMatrix<Scalar>& a,
                                                   const UniformFactorization<Scalar>& f,
                                                   Scalar tol = Scalar(1e-9)) {
  UniformReport<Scalar> rep;
  const Index m = a.rows();
  const auto& window = a.window();
  const auto& slots = f.schedule.slots;
  if (f.factors.size() != slots.size()) {
    rep.types_ok = false;
    rep.bad_type = static_cast<Index>(std::min(f.factors.size(), slots.size()));
  }
  for (std::size_t s = 0; s < std::min(f.factors.size(), slots.size()); ++s) {
    if (!(f.factors[s].type == slots[s]) && rep.types_ok) {
      rep.types_ok = false;
      rep.bad_type = static_cast<Index>(s);
    }
  }
  const auto law = f.coefficient_bound();
  for (std::size_t s = 0; s < f.factors.size(); ++s) {
    const auto& c = f.factors[s].coefficient;
    const bool valid = c.window() == window && !envelope_violation(window, c.values(), c.envelope());
    if (!valid && rep.envelopes_ok) {
      rep.envelopes_ok = false;
      rep.bad_envelope = static_cast<Index>(s);
    }
    if (valid && envelope_violation(window, c.values(), law)) rep.bound_ok = false;
  }
  if (!rep.envelopes_ok) return rep;

  std::vector<Scalar> scaled(static_cast<std::size_t>(window.size()));
  parallel_for(window.size(), [&](Index i) {
    const auto ai = a.at(i);
    const Scalar err = max_entry_norm((product_at(m, f.factors, i) - ai).eval());
    scaled[static_cast<std::size_t>(i)] = err / std::pow(1 + max_entry_norm(ai), f.constants.k);
  });
  for (Index i = 0; i < window.size(); ++i) {
    if (!rep.worst_point || scaled[static_cast<std::size_t>(i)] > rep.max_residual) {
      rep.max_residual = scaled[static_cast<std::size_t>(i)];
      rep.worst_point = i;
    }
  }
  rep.residual_ok = rep.max_residual <= tol;
  return rep;
}

}  // namespace perdist
