#pragma once

// Executable negative results:
//   noetherian_chain   I_{k-1} strictly inside I_k, I_k = {a : a(n) = 0 for |n|_1 > k}
//   parity_idempotent  p(n) = [|n|_1 even] is idempotent but neither 0 nor 1
//   c_counterexample   a 2 x 2 system over c(Z) that satisfies the pointwise
//                      margin condition with delta = 1 but whose unique
//                      solution oscillates (limits 1 and 2/3 along subsequences)

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perdist/ring_core.hpp"

namespace perdist {

struct Check {
  std::string description;
  bool passed{false};
  double evidence{0};  // the measured quantity behind the verdict
};

struct CounterexampleReport {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<Check> checks;

  bool overall() const;
  void add(std::string description, bool passed, double evidence);
};

/// e_k(n) = 1 at n = (k, 0, ..., 0), 0 elsewhere.
Seq chain_generator(const LatticeWindow& window, int k);

/// True iff a vanishes at every window point with |n|_1 > k.
bool in_chain_ideal(const Seq& a, int k);

CounterexampleReport noetherian_chain(int k_max, const LatticeWindow& window);

Seq parity_sequence(const LatticeWindow& window);

struct ParityResult {
  Seq p;
  CounterexampleReport report;
};

ParityResult parity_idempotent(const LatticeWindow& window);

/// Fractional part {n sqrt 2} in [0, 1).
double frac_sqrt2(long n);

struct OscillationWitness {
  long n{0};
  double frac{0};
  double x2{0};
};

struct CExampleResult {
  CounterexampleReport report;
  // Per scale N/8, N/4, N/2, N: best witness near frac = 0 (x2 near 1) and
  // near frac = 1/2 (x2 near 2/3).
  std::vector<int> scales;
  std::vector<std::optional<OscillationWitness>> near_one;
  std::vector<std::optional<OscillationWitness>> near_two_thirds;
  double min_margin{0};
};

/// N >= 100 required; eps is the subsequence tolerance on {n sqrt 2}.
CExampleResult c_counterexample(int radius, double eps = 0.05);

}  // namespace perdist
