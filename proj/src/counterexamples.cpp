#include "perdist/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "perdist/corona.hpp"
#include "perdist/parallel.hpp"

namespace perdist {

bool CounterexampleReport::overall() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void CounterexampleReport::add(std::string description, bool passed, double evidence) {
  checks.push_back({std::move(description), passed, evidence});
}

Seq chain_generator(const LatticeWindow& window, int k) {
  return Seq::generate(window, [k](std::span<const int> n) {
    const bool hit = n[0] == k && std::all_of(n.begin() + 1, n.end(), [](int c) { return c == 0; });
    return hit ? 1.0 : 0.0;
  });
}

bool in_chain_ideal(const Seq& a, int k) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a.window().norm1_at(i) > k && a[i] != Complex(0)) return false;
  }
  return true;
}

CounterexampleReport noetherian_chain(int k_max, const LatticeWindow& window) {
  if (k_max < 1) throw PreconditionError("noetherian_chain: k_max must be >= 1");
  if (window.radius() < k_max) throw PreconditionError("noetherian_chain: window radius must be >= k_max");
  CounterexampleReport rep;
  rep.name = "noetherian_chain";
  rep.parameters = {{"k_max", k_max}, {"d", window.dim()}, {"N", window.radius()}};
  std::vector<int> witness(static_cast<std::size_t>(window.dim()), 0);
  for (int k = 1; k <= k_max; ++k) {
    const Seq e = chain_generator(window, k);
    Index support = 0;
    for (Index i = 0; i < e.size(); ++i) support += e[i] != Complex(0);
    witness[0] = k;
    const Index at = *window.index_of(witness);
    const std::string ks = std::to_string(k);
    rep.add("e_" + ks + " has support exactly {(" + ks + ",0,...)}", support == 1 && e[at] == Complex(1),
            static_cast<double>(support));
    rep.add("e_" + ks + " lies in I_" + ks, in_chain_ideal(e, k), 0);
    rep.add("e_" + ks + " is outside I_" + std::to_string(k - 1) + ": e(" + ks + ",0,...) = 1 with |n|_1 = " + ks,
            !in_chain_ideal(e, k - 1) && window.norm1_at(at) == k, e[at].real());
    rep.add("e_" + ks + " lies in I_" + std::to_string(k + 1), in_chain_ideal(e, k + 1), 0);
  }
  return rep;
}

Seq parity_sequence(const LatticeWindow& window) {
  return Seq::generate(window, [](std::span<const int> n) { return norm1(n) % 2 == 0 ? 1.0 : 0.0; });
}

ParityResult parity_idempotent(const LatticeWindow& window) {
  Seq p = parity_sequence(window);
  CounterexampleReport rep;
  rep.name = "parity_idempotent";
  rep.parameters = {{"d", window.dim()}, {"N", window.radius()}};

  const Seq sq = mul(p, p);
  double defect = 0;
  for (Index i = 0; i < p.size(); ++i) defect = std::max(defect, std::abs(sq[i] - p[i]));
  rep.add("p*p - p vanishes exactly", defect == 0, defect);

  std::optional<Index> one_at;
  std::optional<Index> zero_at;
  for (Index i = 0; i < p.size() && !(one_at && zero_at); ++i) {
    if (p[i] == Complex(1) && !one_at) one_at = i;
    if (p[i] == Complex(0) && !zero_at) zero_at = i;
  }
  rep.add("p != 0: p = 1 at " + (one_at ? window.point_string(*one_at) : std::string("no point")),
          one_at.has_value(), one_at ? 1.0 : 0.0);
  rep.add("p != 1: p = 0 at " + (zero_at ? window.point_string(*zero_at) : std::string("no point")),
          zero_at.has_value(), zero_at ? 1.0 : 0.0);
  // In the 1 x 1 case any S^-1 D S equals D in {0, 1}, a constant; the two
  // points above have different values, so p is not of that form.
  rep.add("p is not a constant idempotent (values differ at the two witnesses)", one_at && zero_at,
          one_at && zero_at ? 1.0 : 0.0);

  const Seq ind = zero_indicator(p);
  double mismatch = 0;
  for (Index i = 0; i < p.size(); ++i) mismatch = std::max(mismatch, std::abs(ind[i] - (Complex(1) - p[i])));
  rep.add("zero_indicator(p) = 1 - p", mismatch == 0, mismatch);
  return {std::move(p), std::move(rep)};
}

double frac_sqrt2(long n) {
  const double x = static_cast<double>(n) * std::numbers::sqrt2;
  const double f = x - std::floor(x);
  return f < 1 ? f : 0.0;
}

namespace {

struct Band {
  long lo;
  long hi;
};

std::optional<OscillationWitness> closest(Band band, double target, double eps) {
  std::optional<OscillationWitness> best;
  for (long n = band.lo; n <= band.hi; ++n) {
    const double f = frac_sqrt2(n);
    const double gap = std::abs(f - target);
    if (gap < eps && (!best || gap < std::abs(best->frac - target))) best = OscillationWitness{n, f, 1 / (1 + f)};
  }
  return best;
}

}  // namespace

CExampleResult c_counterexample(int radius, double eps) {
  if (radius < 100) throw PreconditionError("c_counterexample: N must be >= 100");
  if (!(eps > 0 && eps < 0.25)) throw PreconditionError("c_counterexample: eps must lie in (0, 0.25)");
  const LatticeWindow window(1, radius);
  const Index points = window.size();

  CExampleResult out;
  auto& rep = out.report;
  rep.name = "c_counterexample";
  rep.parameters = {{"d", 1}, {"N", radius}, {"eps", eps}};

  std::vector<double> sum_sq(static_cast<std::size_t>(points)), prod(static_cast<std::size_t>(points)),
      diff(static_cast<std::size_t>(points)), quarter_disc(static_cast<std::size_t>(points)),
      margin(static_cast<std::size_t>(points)), closed_gap(static_cast<std::size_t>(points));
  parallel_for(points, [&](Index i) {
    const long n = window.point(i)[0];
    const double f = frac_sqrt2(n);
    const double w = 1 + static_cast<double>(n) * static_cast<double>(n);
    const double a = 1 / w;
    const double b = -f / w;
    const auto s = static_cast<std::size_t>(i);
    sum_sq[s] = a * a + b * b;
    prod[s] = a * b;
    diff[s] = a - b;
    // Delta/4 maximized over theta (cos^2 = 1), minus its bound 2ab.
    quarter_disc[s] = (a + b) * (a + b) - (a * a + b * b) - 2 * a * b;
    CMatrix am(2, 2);
    am << 1, 1, a, b;
    CVector bv(2);
    bv << 1, 0;
    const auto sol = least_norm_solve<double>(am, bv);
    if (!sol.consistent) {
      margin[s] = 0;
      closed_gap[s] = std::numeric_limits<double>::infinity();
      return;
    }
    margin[s] = 1 / sol.x.norm();
    closed_gap[s] = std::max(std::abs(sol.x[1] - Complex(1 / (1 + f))),
                             std::abs(sol.x[0] - Complex(b / (b - a))));
  });

  const double min_sum_sq = *std::min_element(sum_sq.begin(), sum_sq.end());
  const double max_prod = *std::max_element(prod.begin(), prod.end());
  const double min_diff = *std::min_element(diff.begin(), diff.end());
  double max_disc_excess = 0;
  for (Index i = 0; i < points; ++i) {
    // Rounding in (a+b)^2 - (a^2+b^2) is relative to a^2 + b^2.
    max_disc_excess = std::max(max_disc_excess, quarter_disc[static_cast<std::size_t>(i)] / sum_sq[static_cast<std::size_t>(i)]);
  }
  out.min_margin = *std::min_element(margin.begin(), margin.end());
  const double max_gap = *std::max_element(closed_gap.begin(), closed_gap.end());

  rep.add("a(n)^2 + b(n)^2 > 0 at every point (min reported)", min_sum_sq > 0, min_sum_sq);
  rep.add("a(n) b(n) <= 0 at every point (max reported)", max_prod <= 0, max_prod);
  rep.add("a(n) - b(n) > 0 at every point, so b(n) - a(n) != 0 (min reported)", min_diff > 0, min_diff);
  rep.add("Delta/4 <= 2 a(n) b(n) <= 0 at every point (max relative excess reported)",
          max_disc_excess <= 1e-12 && max_prod <= 0, max_disc_excess);
  rep.add("corona margin >= 1 - 1e-9 at every point (min reported)", out.min_margin >= 1 - 1e-9, out.min_margin);
  rep.add("least-norm solution matches x(n) = (b/(b-a), 1/(1+{n sqrt 2})) (max deviation reported)", max_gap <= 1e-9,
          max_gap);

  // Witnesses in the bands (s/2, s] for s = N/8, N/4, N/2, N, so each scale
  // contributes fresh points further out.
  bool all_found = true;
  double min_spread = std::numeric_limits<double>::infinity();
  for (int div : {8, 4, 2, 1}) {
    const int s = radius / div;
    const Band band{s / 2 + 1, s};
    out.scales.push_back(s);
    out.near_one.push_back(closest(band, 0.0, eps));
    auto half = closest(band, 0.5, eps);
    out.near_two_thirds.push_back(half);
    if (!out.near_one.back() || !half) {
      all_found = false;
      continue;
    }
    min_spread = std::min(min_spread, out.near_one.back()->x2 - half->x2);
  }
  if (!all_found) min_spread = 0;
  rep.add(all_found ? "subsequence witnesses with {n sqrt 2} within eps of 0 and of 1/2 found at every scale"
                    : "subsequence witnesses missing at some scale; increase N",
          all_found, all_found ? 1.0 : 0.0);
  double worst_one = 0;
  double worst_two_thirds = 0;
  for (std::size_t j = 0; j < out.scales.size(); ++j) {
    if (out.near_one[j]) worst_one = std::max(worst_one, std::abs(out.near_one[j]->x2 - 1));
    if (out.near_two_thirds[j]) worst_two_thirds = std::max(worst_two_thirds, std::abs(out.near_two_thirds[j]->x2 - 2.0 / 3));
  }
  rep.add("x2 within 0.05 of 1 along the first subsequence (max gap reported)", all_found && worst_one <= 0.05, worst_one);
  rep.add("x2 within 0.05 of 2/3 along the second subsequence (max gap reported)",
          all_found && worst_two_thirds <= 0.05, worst_two_thirds);
  rep.add("x2 oscillates: witnesses differ by >= 0.25 at every scale (min spread reported)",
          all_found && min_spread >= 0.25, min_spread);
  return out;
}

}  // namespace perdist
