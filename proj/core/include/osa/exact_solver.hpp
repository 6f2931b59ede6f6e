#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "osa/instance.hpp"
#include "osa/policy.hpp"

namespace osa {

// Discount convention. Inside every recursion the current slot's reward is
// undiscounted and each step to the next slot multiplies by beta, so
// recursion_value = sum_t beta^(t-1) E[R_t]. The objective-style total
// applies one more factor: value = beta * recursion_value
// = sum_{t=1..T} beta^t E[R_t].

struct ValueReport {
  /// sum_{t=1..T} beta^t E[R_t].
  double value = 0.0;
  /// sum_{t=1..T} beta^(t-1) E[R_t]; comparable with auxiliary_value.
  double recursion_value = 0.0;
  /// E[R_t] for t = 1..T, undiscounted.
  std::vector<double> per_slot;
  std::uint64_t nodes_expanded = 0;
};

struct OptimalReport : ValueReport {
  Action first_action;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  /// Upper bound on (C(N,k) 2^k)^T for optimal_value.
  double expansion_budget = 1e8;
  /// Reuse values of belief nodes that agree after rounding to 1e-9.
  bool memoize = false;
};

/// (C(N,k) 2^k)^T, the size of the full decision/outcome tree.
double expansion_cost(std::size_t n_channels, std::size_t k, std::size_t horizon);

/// Every k-subset of {0..n-1} in lexicographic order.
std::vector<std::vector<ChannelId>> k_subsets(std::size_t n, std::size_t k);

/// Exact expected reward of a deterministic policy, by expanding the
/// outcome tree. Stochastic policies are rejected.
ValueReport evaluate_policy(const Instance& inst, Policy& policy);

/// Backward induction over every k-subset at every reachable belief.
/// Throws BudgetError when expansion_cost exceeds options.expansion_budget.
OptimalReport optimal_value(const Instance& inst, const SolverOptions& options = {});

/// Optimal minus myopic value, in the recursion convention. Never below
/// -1e-9 up to rounding.
double optimality_gap(const Instance& inst, const SolverOptions& options = {});

/// Deliberate model faults for mutation testing of the lemma verifiers.
struct Perturbation {
  /// Multiplies epsilon inside the no-ACK posterior only.
  double phi_epsilon_factor = 1.0;
};

/// Auxiliary value W of the "sense the first k positions, move ACKed
/// channels to the front and silent ones to the back" policy, starting from
/// the position-ordered beliefs with `slots` slots to go (1 = last slot).
/// Positions may hold any value in [0, 1].
double auxiliary_value(const Instance& inst, std::span<const double> positions,
                       std::size_t slots, const Perturbation& fault = {});

/// W over the whole horizon with position j holding channel ordering[j].
double auxiliary_value(const Instance& inst, std::span<const ChannelId> ordering,
                       const Perturbation& fault = {});

}  // namespace osa
