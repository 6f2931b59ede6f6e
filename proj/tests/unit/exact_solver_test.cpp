#include <gtest/gtest.h>

#include <numeric>

#include "../oracle/joint_oracle.hpp"
#include "helpers.hpp"
#include "osa/osa.hpp"

using namespace osa;
using testing_support::conditioned_instance;
using testing_support::simple_instance;

namespace {

double to_double(const oracle::Rat& r) { return r.convert_to<double>(); }

Instance random_instance(Rng& rng, std::size_t n, std::size_t k, std::size_t horizon) {
  const double p01 = uniform(rng, 0.02, 0.9);
  const ChannelParams params(p01, uniform(rng, p01 + 0.01, 0.98));
  std::vector<double> w(n);
  for (double& x : w) x = uniform01(rng);
  const RewardKind kind = bernoulli(rng, 0.5) ? RewardKind::SumThroughput : RewardKind::AnySuccess;
  return make_instance(n, k, horizon, uniform01(rng), params, SensingModel(uniform(rng, 0.0, 0.6)),
                       kind, BeliefVector(w));
}

}  // namespace

TEST(EvaluatePolicy, SingleSlotIsDiscountedImmediateReward) {
  const Instance inst = simple_instance(3, 2, 1, 0.8, 0.3, 0.7, 0.1).with_initial(
      BeliefVector({0.4, 0.6, 0.5}));
  MyopicPolicy p(2);
  const ValueReport r = evaluate_policy(inst, p);
  EXPECT_NEAR(r.recursion_value, 0.9 * (0.6 + 0.5), 1e-15);
  EXPECT_NEAR(r.value, 0.8 * 0.9 * 1.1, 1e-15);
  ASSERT_EQ(r.per_slot.size(), 1U);
}

TEST(EvaluatePolicy, ZeroDiscountGivesZero) {
  MyopicPolicy p(1);
  EXPECT_EQ(evaluate_policy(simple_instance(3, 1, 3, 0.0, 0.3, 0.7, 0.1), p).value, 0.0);
}

TEST(EvaluatePolicy, TwoSlotTreeByHand) {
  // Slot 1 senses channel 0 (tie). ACK w.p. 0.45 -> beliefs (0.7, 0.5), reward
  // 0.63; no ACK w.p. 0.55 -> (tau(1/11), 0.5), channel 1 sensed, reward 0.45.
  const Instance inst = simple_instance(2, 1, 2, 0.5, 0.3, 0.7, 0.1);
  MyopicPolicy p(1);
  const ValueReport r = evaluate_policy(inst, p);
  const double recursion = 0.45 + 0.5 * (0.45 * 0.63 + 0.55 * 0.45);
  EXPECT_NEAR(r.recursion_value, recursion, 1e-15);
  EXPECT_NEAR(r.value, 0.5 * recursion, 1e-15);
  EXPECT_NEAR(r.per_slot[0], 0.45, 1e-15);
  EXPECT_NEAR(r.per_slot[1], 0.45 * 0.63 + 0.55 * 0.45, 1e-15);
  EXPECT_NEAR(to_double(oracle::myopic_value(oracle::from_instance(inst))), recursion, 1e-15);
}

TEST(EvaluatePolicy, MatchesJointStateOracle) {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 3);
    const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(2, n));
    const std::size_t horizon = 1 + uniform_index(rng, 4);
    const Instance inst = random_instance(rng, n, k, horizon);
    MyopicPolicy p(k);
    const double lib = evaluate_policy(inst, p).recursion_value;
    const double ref = to_double(oracle::myopic_value(oracle::from_instance(inst)));
    ASSERT_NEAR(lib, ref, 1e-12) << to_json(inst);
  }
}

TEST(EvaluatePolicy, FixedPolicyMatchesOracle) {
  Rng rng(32);
  for (int i = 0; i < 20; ++i) {
    const Instance inst = random_instance(rng, 3, 2, 3);
    FixedPolicy p(Action({0, 2}, 3));
    ASSERT_NEAR(evaluate_policy(inst, p).recursion_value,
                to_double(oracle::fixed_value(oracle::from_instance(inst), {0, 2})), 1e-12);
  }
}

TEST(EvaluatePolicy, RejectsStochasticAndMismatchedPolicies) {
  const Instance inst = simple_instance(3, 2, 2, 0.9, 0.3, 0.7, 0.1);
  RandomPolicy r(2, 1);
  EXPECT_THROW(evaluate_policy(inst, r), std::invalid_argument);
  MyopicPolicy wrong(1);
  EXPECT_THROW(evaluate_policy(inst, wrong), std::invalid_argument);
}

TEST(OptimalValue, MatchesJointStateOracle) {
  Rng rng(33);
  for (int i = 0; i < 12; ++i) {
    const std::size_t k = 1 + uniform_index(rng, 2);
    const std::size_t horizon = 1 + uniform_index(rng, 3);
    const Instance inst = random_instance(rng, 3, k, horizon);
    const double lib = optimal_value(inst).recursion_value;
    const double ref = to_double(oracle::optimal_value(oracle::from_instance(inst)));
    ASSERT_NEAR(lib, ref, 1e-12) << to_json(inst);
  }
}

TEST(OptimalValue, SingleSlotEqualsMyopic) {
  Rng rng(34);
  for (int i = 0; i < 50; ++i) {
    const Instance inst = random_instance(rng, 4, 2, 1);
    EXPECT_EQ(optimality_gap(inst), 0.0);
  }
}

TEST(OptimalValue, DominatesMyopic) {
  Rng rng(35);
  for (int i = 0; i < 60; ++i) {
    const Instance inst = random_instance(rng, 2 + uniform_index(rng, 3), 1, 1 + uniform_index(rng, 4));
    ASSERT_GE(optimality_gap(inst), -1e-9);
  }
}

TEST(OptimalValue, ConditionedInstanceHasNoGap) {
  const Instance inst = simple_instance(3, 1, 3, 0.9, 0.3, 0.7, 0.1);
  ASSERT_TRUE(check_conditions(inst).all_ok);
  EXPECT_LE(optimality_gap(inst), 1e-9);
}

TEST(OptimalValue, MonotoneInBeta) {
  Rng rng(36);
  for (int i = 0; i < 20; ++i) {
    const Instance inst = random_instance(rng, 3, 1, 3);
    double prev = -1.0;
    for (double beta : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      const double v = optimal_value(inst.with_beta(beta)).recursion_value;
      ASSERT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(OptimalValue, PermutationEquivariant) {
  Rng rng(37);
  for (int i = 0; i < 15; ++i) {
    const Instance inst = random_instance(rng, 4, 2, 3);
    std::vector<double> w(inst.initial().begin(), inst.initial().end());
    std::shuffle(w.begin(), w.end(), rng);
    ASSERT_NEAR(optimal_value(inst).recursion_value,
                optimal_value(inst.with_initial(BeliefVector(w))).recursion_value, 1e-12);
  }
}

TEST(OptimalValue, MemoizedAgrees) {
  Rng rng(38);
  for (int i = 0; i < 10; ++i) {
    const Instance inst = random_instance(rng, 4, 2, 3);
    SolverOptions memo;
    memo.memoize = true;
    const OptimalReport a = optimal_value(inst);
    const OptimalReport b = optimal_value(inst, memo);
    ASSERT_NEAR(a.recursion_value, b.recursion_value, 1e-9);
    ASSERT_LE(b.nodes_expanded, a.nodes_expanded);
  }
}

TEST(OptimalValue, BudgetIsEnforced) {
  EXPECT_DOUBLE_EQ(expansion_cost(4, 2, 4), 331776.0);
  const Instance big = simple_instance(4, 2, 12, 0.9, 0.3, 0.7, 0.1);
  EXPECT_THROW(optimal_value(big), BudgetError);
  SolverOptions tight;
  tight.expansion_budget = 1000;
  EXPECT_THROW(optimal_value(simple_instance(4, 2, 3, 0.9, 0.3, 0.7, 0.1), tight), BudgetError);
}

TEST(KSubsets, LexicographicOrder) {
  const auto s = k_subsets(4, 2);
  const std::vector<std::vector<ChannelId>> expected = {{0, 1}, {0, 2}, {0, 3},
                                                        {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(s, expected);
}

TEST(AuxiliaryValue, LastSlotIsImmediateReward) {
  const Instance inst = simple_instance(4, 2, 3, 0.9, 0.3, 0.7, 0.1);
  const std::vector<double> w = {0.4, 0.6, 0.5, 0.35};
  EXPECT_NEAR(auxiliary_value(inst, w, 1), 0.9 * (0.4 + 0.6), 1e-15);
  const std::vector<ChannelId> order = {3, 1, 0, 2};
  const Instance start = inst.with_horizon(1).with_initial(BeliefVector(w));
  EXPECT_NEAR(auxiliary_value(start, order), 0.9 * (0.35 + 0.6), 1e-15);
}

TEST(AuxiliaryValue, MatchesDefinition) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 3);
    const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(2, n));
    const Instance inst = random_instance(rng, n, k, 4);
    std::vector<double> w(n);
    for (double& x : w) x = uniform01(rng);
    const std::size_t slots = 1 + uniform_index(rng, 4);
    ASSERT_NEAR(auxiliary_value(inst, w, slots), oracle::w_value(inst, w, slots), 1e-12);
  }
}

TEST(AuxiliaryValue, EqualsMyopicOnSortedBeliefs) {
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 3);
    const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(2, n));
    Instance inst = conditioned_instance(rng, n, k, 1 + uniform_index(rng, 4),
                                         bernoulli(rng, 0.5) ? RewardKind::SumThroughput
                                                             : RewardKind::AnySuccess);
    std::vector<double> w(inst.initial().begin(), inst.initial().end());
    std::sort(w.begin(), w.end(), std::greater<>());
    inst = inst.with_initial(BeliefVector(w));
    MyopicPolicy p(k);
    ASSERT_NEAR(auxiliary_value(inst, w, inst.horizon()), evaluate_policy(inst, p).recursion_value,
                1e-9);
  }
}

TEST(AuxiliaryValue, SwappingSensedPositionsIsNeutralWithinTwoSlots) {
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const Instance inst = conditioned_instance(rng, 4, 2, 2, RewardKind::SumThroughput);
    std::vector<double> w(inst.initial().begin(), inst.initial().end());
    auto swapped = w;
    std::swap(swapped[0], swapped[1]);
    for (std::size_t slots : {1, 2}) {
      ASSERT_NEAR(auxiliary_value(inst, w, slots), auxiliary_value(inst, swapped, slots), 1e-12);
    }
  }
}

TEST(AuxiliaryValue, SwappingSensedPositionsCanChangeValueFromThreeSlots) {
  // The silent channels re-enter at the back in position order, so swapping
  // two sensed positions reorders that block.
  const ChannelParams params(0.6918822030113582, 0.8604372646611668);
  const std::vector<double> w = {0.7895200915300784, 0.7870399004079449, 0.7165617182087766,
                                 0.7171933299458912};
  const Instance inst = make_instance(4, 2, 4, 1.0, params, SensingModel(0.2736735427639782),
                                      RewardKind::SumThroughput, BeliefVector(w));
  auto swapped = w;
  std::swap(swapped[0], swapped[1]);
  const double diff = auxiliary_value(inst, w, 4) - auxiliary_value(inst, swapped, 4);
  EXPECT_NEAR(diff, oracle::w_value(inst, w, 4) - oracle::w_value(inst, swapped, 4), 1e-15);
  EXPECT_NEAR(diff, 6.6043e-6, 1e-9);
}

TEST(AuxiliaryValue, AffineAndMonotoneInEachPosition) {
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    const Instance inst = conditioned_instance(rng, 4, 2, 4,
                                               bernoulli(rng, 0.5) ? RewardKind::SumThroughput
                                                                   : RewardKind::AnySuccess);
    std::vector<double> w(4);
    for (double& x : w) x = uniform(rng, inst.params().p01(), inst.params().p11());
    const std::size_t slots = 1 + uniform_index(rng, 4);
    const std::size_t pos = uniform_index(rng, 4);
    auto one = w;
    auto zero = w;
    one[pos] = 1.0;
    zero[pos] = 0.0;
    const double v = auxiliary_value(inst, w, slots);
    ASSERT_NEAR(v,
                w[pos] * auxiliary_value(inst, one, slots) +
                    (1 - w[pos]) * auxiliary_value(inst, zero, slots),
                1e-9);
    auto up = w;
    up[pos] = uniform(rng, w[pos], inst.params().p11());
    ASSERT_GE(auxiliary_value(inst, up, slots), v - 1e-12);
  }
}

TEST(OptimalityGap, NonNegativeOutsideConditions) {
  const Instance inst = simple_instance(3, 2, 4, 1.0, 0.1, 0.9, 0.4, RewardKind::AnySuccess);
  ASSERT_FALSE(check_conditions(inst).all_ok);
  EXPECT_GE(optimality_gap(inst), -1e-9);
}
