#pragma once

// Principal-ideal constructions with checkable witnesses:
//   <a, b> = <|a| + |b|>             (every finitely generated ideal is principal)
//   ann(a) = <1_{Z(a)}>               (annihilators are finitely generated)
//   gcd(a, b) = |a| + |b|, and any gcd d is a combination d = a x + b y.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "perdist/ring_core.hpp"

namespace perdist {

/// Witnesses for <a, b> = <g>:  a = alpha_a g,  b = alpha_b g  and
/// g = a comb_a + b comb_b.
template <typename Scalar>
struct BezoutCertificate {
  PolyGrowthSeq<Scalar> g;
  PolyGrowthSeq<Scalar> alpha_a;
  PolyGrowthSeq<Scalar> alpha_b;
  PolyGrowthSeq<Scalar> comb_a;
  PolyGrowthSeq<Scalar> comb_b;

  /// Worst pointwise relative residual over both inclusions.
  Scalar max_residual(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) const {
    const auto ga = alpha_a.values().cwiseProduct(g.values());
    const auto gb = alpha_b.values().cwiseProduct(g.values());
    const ComplexVector<Scalar> comb =
        a.values().cwiseProduct(comb_a.values()) + b.values().cwiseProduct(comb_b.values());
    return std::max({max_relative_residual<Scalar>(a.values(), ga),
                     max_relative_residual<Scalar>(b.values(), gb),
                     max_relative_residual<Scalar>(g.values(), comb)});
  }

  bool verified(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b,
                Scalar tol = Scalar(1e-12)) const {
    return max_residual(a, b) <= tol;
  }
};

/// z, shrunk by a few ulps if rounding pushed |z| above 1.
template <typename Scalar>
std::complex<Scalar> clamp_to_unit_disk(std::complex<Scalar> z) {
  while (std::abs(z) > 1) z *= 1 - std::numeric_limits<Scalar>::epsilon();
  return z;
}

/// g = |a| + |b| with alpha_a = a/g (1 where g = 0) and comb_a = (u_a)*.
template <typename Scalar>
BezoutCertificate<Scalar> bezout_generator(const PolyGrowthSeq<Scalar>& a,
                                           const PolyGrowthSeq<Scalar>& b) {
  using C = std::complex<Scalar>;
  require_same_window(a.window(), b.window());
  auto g = add(modulus(a), modulus(b));
  const auto n = a.size();
  typename PolyGrowthSeq<Scalar>::Values alpha_a(n), alpha_b(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar gi = g[i].real();
    if (gi == 0) {
      alpha_a[i] = C(1);
      alpha_b[i] = C(1);
    } else {
      alpha_a[i] = clamp_to_unit_disk(a[i] / gi);
      alpha_b[i] = clamp_to_unit_disk(b[i] / gi);
    }
  }
  const GrowthEnvelope<Scalar> unit{Scalar(1), 0};
  return {std::move(g),
          PolyGrowthSeq<Scalar>(a.window(), std::move(alpha_a), unit),
          PolyGrowthSeq<Scalar>(a.window(), std::move(alpha_b), unit),
          conjugate(unimodular_part(a)),
          conjugate(unimodular_part(b))};
}

/// Finds w with c = w g on the window: w = 1 where c = g (including
/// c = g = 0), else w = c/g. Fails at the first point with g(n) = 0 != c(n), or when w
/// needs more growth than the policy allows.
template <typename Scalar>
Outcome<PolyGrowthSeq<Scalar>> ideal_membership(const PolyGrowthSeq<Scalar>& c,
                                                const PolyGrowthSeq<Scalar>& g,
                                                const FitPolicy<Scalar>& policy = {}) {
  using C = std::complex<Scalar>;
  require_same_window(c.window(), g.window());
  typename PolyGrowthSeq<Scalar>::Values w(c.size());
  for (Index i = 0; i < c.size(); ++i) {
    if (c[i] == g[i]) {
      w[i] = C(1);
    } else if (g[i] == C(0)) {
      return Failure{"zero-divisor obstruction: g vanishes but c does not at " + c.window().point_string(i), i};
    } else {
      w[i] = c[i] / g[i];
    }
  }
  auto env = fit_envelope_capped(c.window(), w, policy);
  if (!env) return env.failure();
  return PolyGrowthSeq<Scalar>(c.window(), std::move(w), *env);
}

/// Generator 1_{Z(a)} of the annihilator {b : a b = 0}.
template <typename Scalar>
PolyGrowthSeq<Scalar> kernel_generator(const PolyGrowthSeq<Scalar>& a, Scalar tau = 0) {
  return zero_indicator(a, tau);
}

/// A gcd of a and b: |a| + |b|. Its zero set is Z(a) n Z(b).
template <typename Scalar>
PolyGrowthSeq<Scalar> gcd(const PolyGrowthSeq<Scalar>& a, const PolyGrowthSeq<Scalar>& b) {
  require_same_window(a.window(), b.window());
  return add(modulus(a), modulus(b));
}

/// Principal argument in (-pi, pi], with Arg(0) = 0.
template <typename Scalar>
Scalar principal_arg(std::complex<Scalar> z) {
  if (z == std::complex<Scalar>(0)) return 0;
  Scalar t = std::arg(z);
  // std::arg maps the negative real axis with -0 imaginary part to -pi.
  if (t <= -std::numbers::pi_v<Scalar>) t = std::numbers::pi_v<Scalar>;
  return t;
}

/// Witnesses for d = a x + b y, where d is a claimed gcd of a and b.
template <typename Scalar>
struct PreBezoutCertificate {
  PolyGrowthSeq<Scalar> x;
  PolyGrowthSeq<Scalar> y;
  PolyGrowthSeq<Scalar> d;
  PolyGrowthSeq<Scalar> alpha;  // a = alpha d, zero off Y
  PolyGrowthSeq<Scalar> beta;   // b = beta d, zero off Y
  GrowthEnvelope<Scalar> q_envelope;  // certificate of q = 1/(sqrt|alpha| + sqrt|beta|) on Y
  Scalar max_residual{0};  // of d = a x + b y, pointwise relative

  /// The envelope (2 M_q^2, 2 k_q) that bounds x and y.
  GrowthEnvelope<Scalar> combination_envelope() const {
    return {2 * q_envelope.M * q_envelope.M, 2 * q_envelope.k};
  }

  bool verified(Scalar tol = Scalar(1e-12)) const { return max_residual <= tol; }
};

/// Writes d = a x + b y. On Y = window \ Z(d):
///   alpha = a/d, beta = b/d, delta = sqrt|alpha| + sqrt|beta|, q = 1/delta,
///   x = e^{-i Arg alpha} / (|alpha| + |beta|),  y = e^{-i Arg beta} / (|alpha| + |beta|);
/// x = y = 0 off Y. Since |alpha| + |beta| >= delta^2 / 2, any envelope
/// (M_q, k_q) of q yields the envelope (2 M_q^2, 2 k_q) for x and y.
template <typename Scalar>
Outcome<PreBezoutCertificate<Scalar>> pre_bezout(const PolyGrowthSeq<Scalar>& a,
                                                 const PolyGrowthSeq<Scalar>& b,
                                                 const PolyGrowthSeq<Scalar>& d,
                                                 const FitPolicy<Scalar>& policy = {}) {
  using C = std::complex<Scalar>;
  using Values = typename PolyGrowthSeq<Scalar>::Values;
  require_same_window(a.window(), b.window());
  require_same_window(a.window(), d.window());
  const auto& w = a.window();

  auto alpha_w = ideal_membership(a, d, policy);
  if (!alpha_w) return Failure{"d does not divide a: " + alpha_w.failure().reason, alpha_w.failure().point};
  auto beta_w = ideal_membership(b, d, policy);
  if (!beta_w) return Failure{"d does not divide b: " + beta_w.failure().reason, beta_w.failure().point};

  const Index n = w.size();
  Values alpha = Values::Zero(n), beta = Values::Zero(n), q = Values::Zero(n);
  Values x = Values::Zero(n), y = Values::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (d[i] == C(0)) continue;
    alpha[i] = (*alpha_w)[i];
    beta[i] = (*beta_w)[i];
    const Scalar delta = std::sqrt(std::abs(alpha[i])) + std::sqrt(std::abs(beta[i]));
    if (delta == 0) {
      return Failure{"Z(d) is strictly smaller than Z(a) n Z(b) at " + w.point_string(i) +
                         "; d is not a gcd",
                     i};
    }
    q[i] = C(1 / delta);
    const Scalar s = std::abs(alpha[i]) + std::abs(beta[i]);
    x[i] = std::polar(1 / s, -principal_arg(alpha[i]));
    y[i] = std::polar(1 / s, -principal_arg(beta[i]));
  }
  auto q_env = fit_envelope_capped(w, q, policy);
  if (!q_env) return Failure{"no envelope for q: " + q_env.failure().reason, q_env.failure().point};

  const GrowthEnvelope<Scalar> xy_env{2 * q_env->M * q_env->M, 2 * q_env->k};
  PolyGrowthSeq<Scalar> xs(w, std::move(x), xy_env);
  PolyGrowthSeq<Scalar> ys(w, std::move(y), xy_env);
  const Values recon = a.values().cwiseProduct(xs.values()) + b.values().cwiseProduct(ys.values());
  const Scalar residual = max_relative_residual<Scalar>(d.values(), recon);
  return PreBezoutCertificate<Scalar>{std::move(xs),
                                      std::move(ys),
                                      d,
                                      PolyGrowthSeq<Scalar>::fitted(w, std::move(alpha), alpha_w->envelope().k),
                                      PolyGrowthSeq<Scalar>::fitted(w, std::move(beta), beta_w->envelope().k),
                                      *q_env,
                                      residual};
}

}  // namespace perdist
