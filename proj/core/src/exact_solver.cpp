#include "osa/exact_solver.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

namespace osa {
namespace {

/// Per-depth scratch buffers so the recursions allocate nothing per node.
struct Scratch {
  Scratch(std::size_t depth, std::size_t n, std::size_t k)
      : beliefs(depth + 1, std::vector<double>(n)), sensed(depth + 1, std::vector<double>(k)) {}
  std::vector<std::vector<double>> beliefs;
  std::vector<std::vector<double>> sensed;
};

double outcome_probability(std::span<const double> sensed, std::uint64_t mask, double eps) {
  double p = 1.0;
  for (std::size_t j = 0; j < sensed.size(); ++j) {
    const double ack = (1.0 - eps) * sensed[j];
    p *= ((mask >> j) & 1U) ? ack : 1.0 - ack;
  }
  return p;
}

void fill_successor(std::span<const double> current, std::span<const ChannelId> action,
                    std::uint64_t mask, const Instance& inst, std::span<double> next) {
  for (std::size_t i = 0; i < current.size(); ++i) next[i] = tau(current[i], inst.params());
  for (std::size_t j = 0; j < action.size(); ++j) {
    const ChannelId c = action[j];
    next[c] = ((mask >> j) & 1U) ? inst.params().p11()
                                 : tau(phi(current[c], inst.sensing()), inst.params());
  }
}

class PolicyEvaluator {
 public:
  PolicyEvaluator(const Instance& inst, Policy& policy)
      : inst_(inst),
        policy_(policy),
        scratch_(inst.horizon(), inst.n_channels(), inst.k()),
        per_slot_(inst.horizon(), 0.0) {}

  ValueReport run() {
    const auto& init = inst_.initial().values();
    std::copy(init.begin(), init.end(), scratch_.beliefs[0].begin());
    ValueReport report;
    report.recursion_value = expand(0, 1.0);
    report.value = inst_.beta() * report.recursion_value;
    report.per_slot = per_slot_;
    report.nodes_expanded = nodes_;
    return report;
  }

 private:
  double expand(std::size_t depth, double reach) {
    ++nodes_;
    const auto& belief = scratch_.beliefs[depth];
    const Action action = policy_.act(BeliefVector(belief), depth + 1);
    if (action.size() != inst_.k()) {
      throw std::logic_error("policy returned an action of the wrong size");
    }
    auto& sensed = scratch_.sensed[depth];
    const auto ids = action.channels();
    for (std::size_t j = 0; j < ids.size(); ++j) sensed[j] = belief[ids[j]];
    const double immediate = inst_.reward().evaluate(sensed);
    per_slot_[depth] += reach * immediate;
    if (depth + 1 == inst_.horizon()) return immediate;

    double future = 0.0;
    const std::uint64_t outcomes = std::uint64_t{1} << ids.size();
    for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
      const double p = outcome_probability(sensed, mask, inst_.sensing().epsilon());
      fill_successor(belief, ids, mask, inst_, scratch_.beliefs[depth + 1]);
      future += p * expand(depth + 1, reach * p);
    }
    return immediate + inst_.beta() * future;
  }

  const Instance& inst_;
  Policy& policy_;
  Scratch scratch_;
  std::vector<double> per_slot_;
  std::uint64_t nodes_ = 0;
};

class BellmanSolver {
 public:
  BellmanSolver(const Instance& inst, const SolverOptions& options)
      : inst_(inst),
        options_(options),
        subsets_(k_subsets(inst.n_channels(), inst.k())),
        scratch_(inst.horizon(), inst.n_channels(), inst.k()),
        memo_(inst.horizon()) {}

  OptimalReport run() {
    const auto& init = inst_.initial().values();
    std::copy(init.begin(), init.end(), scratch_.beliefs[0].begin());
    std::size_t best = 0;
    OptimalReport report;
    report.recursion_value = solve(0, &best);
    report.value = inst_.beta() * report.recursion_value;
    report.first_action = Action(subsets_[best], inst_.n_channels());
    report.nodes_expanded = nodes_;
    return report;
  }

 private:
  using Key = std::vector<std::int64_t>;

  Key quantize(std::span<const double> belief) const {
    Key key(belief.size());
    for (std::size_t i = 0; i < belief.size(); ++i) {
      key[i] = static_cast<std::int64_t>(std::llround(belief[i] * 1e9));
    }
    return key;
  }

  double solve(std::size_t depth, std::size_t* best_index) {
    const auto& belief = scratch_.beliefs[depth];
    Key key;
    if (options_.memoize && best_index == nullptr) {
      key = quantize(belief);
      if (auto it = memo_[depth].find(key); it != memo_[depth].end()) return it->second;
    }
    ++nodes_;
    const bool last = depth + 1 == inst_.horizon();
    const double eps = inst_.sensing().epsilon();
    auto& sensed = scratch_.sensed[depth];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < subsets_.size(); ++a) {
      const auto& ids = subsets_[a];
      for (std::size_t j = 0; j < ids.size(); ++j) sensed[j] = belief[ids[j]];
      double value = inst_.reward().evaluate(sensed);
      if (!last) {
        double future = 0.0;
        const std::uint64_t outcomes = std::uint64_t{1} << ids.size();
        for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
          const double p = outcome_probability(sensed, mask, eps);
          fill_successor(belief, ids, mask, inst_, scratch_.beliefs[depth + 1]);
          future += p * solve(depth + 1, nullptr);
        }
        // Recursion below overwrote deeper buffers only; this node's sensed
        // buffer is intact.
        value += inst_.beta() * future;
      }
      if (value > best) {
        best = value;
        if (best_index != nullptr) *best_index = a;
      }
    }
    if (options_.memoize && best_index == nullptr) memo_[depth].emplace(std::move(key), best);
    return best;
  }

  const Instance& inst_;
  SolverOptions options_;
  std::vector<std::vector<ChannelId>> subsets_;
  Scratch scratch_;
  std::vector<std::map<Key, double>> memo_;
  std::uint64_t nodes_ = 0;
};

class AuxiliaryRecursion {
 public:
  AuxiliaryRecursion(const Instance& inst, const Perturbation& fault, std::size_t slots)
      : inst_(inst),
        faulty_(inst.sensing().epsilon() * fault.phi_epsilon_factor < 1.0
                    ? SensingModel(inst.sensing().epsilon() * fault.phi_epsilon_factor)
                    : SensingModel(std::nextafter(1.0, 0.0))),
        scratch_(slots, inst.n_channels(), inst.k()) {}

  double run(std::span<const double> positions, std::size_t slots) {
    std::copy(positions.begin(), positions.end(), scratch_.beliefs[0].begin());
    return value(0, slots);
  }

 private:
  double value(std::size_t depth, std::size_t slots) {
    const auto& w = scratch_.beliefs[depth];
    const std::size_t k = inst_.k();
    const std::size_t n = inst_.n_channels();
    const std::span<const double> sensed(w.data(), k);
    const double immediate = inst_.reward().evaluate(sensed);
    if (slots == 1) return immediate;

    const double eps = inst_.sensing().epsilon();
    const double p11 = inst_.params().p11();
    auto& next = scratch_.beliefs[depth + 1];
    double future = 0.0;
    const std::uint64_t outcomes = std::uint64_t{1} << k;
    for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
      const double p = outcome_probability(sensed, mask, eps);
      // ACKed channels first, then the unsensed ones in order, then the
      // silent sensed channels in their original order.
      std::size_t pos = 0;
      const auto acked = static_cast<std::size_t>(std::popcount(mask));
      for (; pos < acked; ++pos) next[pos] = p11;
      for (std::size_t i = k; i < n; ++i) next[pos++] = tau(w[i], inst_.params());
      for (std::size_t j = 0; j < k; ++j) {
        if (!((mask >> j) & 1U)) next[pos++] = tau(phi(w[j], faulty_), inst_.params());
      }
      future += p * value(depth + 1, slots - 1);
    }
    return immediate + inst_.beta() * future;
  }

  const Instance& inst_;
  SensingModel faulty_;
  Scratch scratch_;
};

}  // namespace

double expansion_cost(std::size_t n_channels, std::size_t k, std::size_t horizon) {
  double subsets = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    subsets = subsets * static_cast<double>(n_channels - i) / static_cast<double>(i + 1);
  }
  return std::pow(subsets * std::pow(2.0, static_cast<double>(k)), static_cast<double>(horizon));
}

std::vector<std::vector<ChannelId>> k_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<ChannelId>> out;
  if (k > n) return out;
  std::vector<ChannelId> idx(k);
  std::iota(idx.begin(), idx.end(), ChannelId{0});
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

ValueReport evaluate_policy(const Instance& inst, Policy& policy) {
  if (!policy.deterministic()) {
    throw std::invalid_argument("exact evaluation needs a deterministic policy; '" +
                                std::string(policy.name()) + "' is simulation-only");
  }
  if (policy.arity() != inst.k()) {
    throw std::invalid_argument("policy senses " + std::to_string(policy.arity()) +
                                " channels but the instance has k=" + std::to_string(inst.k()));
  }
  return PolicyEvaluator(inst, policy).run();
}

OptimalReport optimal_value(const Instance& inst, const SolverOptions& options) {
  const double cost = expansion_cost(inst.n_channels(), inst.k(), inst.horizon());
  if (cost > options.expansion_budget) {
    std::ostringstream msg;
    msg << "exact solve needs (C(N,k)*2^k)^T = " << cost << " expansions, over the budget of "
        << options.expansion_budget << " (N=" << inst.n_channels() << ", k=" << inst.k()
        << ", T=" << inst.horizon() << ")";
    throw BudgetError(msg.str());
  }
  return BellmanSolver(inst, options).run();
}

double optimality_gap(const Instance& inst, const SolverOptions& options) {
  const OptimalReport best = optimal_value(inst, options);
  MyopicPolicy myopic(inst.k());
  const ValueReport mine = evaluate_policy(inst, myopic);
  return best.recursion_value - mine.recursion_value;
}

double auxiliary_value(const Instance& inst, std::span<const double> positions,
                       std::size_t slots, const Perturbation& fault) {
  if (positions.size() != inst.n_channels()) {
    throw std::invalid_argument("auxiliary value needs one belief per channel");
  }
  if (slots < 1) throw std::invalid_argument("auxiliary value needs at least one slot");
  return AuxiliaryRecursion(inst, fault, slots).run(positions, slots);
}

double auxiliary_value(const Instance& inst, std::span<const ChannelId> ordering,
                       const Perturbation& fault) {
  const std::size_t n = inst.n_channels();
  if (ordering.size() != n) throw std::invalid_argument("ordering must list every channel");
  std::vector<char> seen(n, 0);
  std::vector<double> positions(n);
  for (std::size_t j = 0; j < n; ++j) {
    const ChannelId c = ordering[j];
    if (c >= n || seen[c]) throw std::invalid_argument("ordering is not a permutation");
    seen[c] = 1;
    positions[j] = inst.initial()[c];
  }
  return auxiliary_value(inst, positions, inst.horizon(), fault);
}

}  // namespace osa
