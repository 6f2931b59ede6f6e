#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "osa/osa.hpp"

using namespace osa;
using testing_support::conditioned_instance;
using testing_support::simple_instance;

TEST(RunEpisode, PerfectSensingOfGoodChannels) {
  const ChannelParams params(0.3, 1.0);
  const Instance inst = make_instance(3, 2, 5, 0.9, params, SensingModel(0.0),
                                      RewardKind::SumThroughput, BeliefVector({1.0, 1.0, 1.0}));
  MyopicPolicy policy(2);
  const EpisodeTrace tr = run_episode(inst, policy, 11);
  double expected = 0.0;
  for (int t = 1; t <= 5; ++t) expected += std::pow(0.9, t) * 2.0;
  EXPECT_NEAR(tr.discounted_return, expected, 1e-12);
  for (const SlotRecord& s : tr.slots) EXPECT_EQ(s.acks.size(), 2U);
}

TEST(RunEpisode, SameSeedSameTrace) {
  const Instance inst = simple_instance(4, 2, 6, 0.9, 0.3, 0.7, 0.2);
  RandomPolicy a(2, 3);
  RandomPolicy b(2, 3);
  std::ostringstream x;
  std::ostringstream y;
  write_trace_csv(x, run_episode(inst, a, 77));
  write_trace_csv(y, run_episode(inst, b, 77));
  EXPECT_EQ(x.str(), y.str());
}

TEST(RunEpisode, BeliefsFollowTheUpdateRule) {
  const Instance inst = simple_instance(4, 2, 8, 0.9, 0.2, 0.8, 0.3);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    MyopicPolicy policy(2);
    const EpisodeTrace tr = run_episode(inst, policy, seed);
    BeliefVector belief = inst.initial();
    for (const SlotRecord& s : tr.slots) {
      ASSERT_EQ(s.belief_before, belief);
      Observation obs;
      obs.sensed.assign(s.action.channels().begin(), s.action.channels().end());
      obs.acks = s.acks;
      belief = update_belief(belief, obs, inst.params(), inst.sensing());
      ASSERT_EQ(s.belief_after, belief);
    }
  }
}

TEST(RunEpisode, AcksOnlyFromSensedGoodChannels) {
  const Instance inst = simple_instance(5, 3, 10, 0.9, 0.2, 0.8, 0.3);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomPolicy policy(3, seed);
    for (const SlotRecord& s : run_episode(inst, policy, seed).slots) {
      for (ChannelId c : s.acks) {
        ASSERT_TRUE(s.action.contains(c));
        ASSERT_EQ(s.states[c], 1);
      }
      ASSERT_EQ(s.reward, static_cast<double>(s.acks.size()));
    }
  }
}

TEST(RunEpisode, AnySuccessRewardIsIndicator) {
  EXPECT_EQ(realized_reward(RewardKind::AnySuccess, 0), 0.0);
  EXPECT_EQ(realized_reward(RewardKind::AnySuccess, 3), 1.0);
  EXPECT_EQ(realized_reward(RewardKind::SumThroughput, 3), 3.0);
  EXPECT_THROW(realized_reward(RewardKind::Custom, 1), std::invalid_argument);
}

TEST(RunEpisode, RejectsMismatchedPolicy) {
  const Instance inst = simple_instance(4, 2, 3, 0.9, 0.3, 0.7, 0.1);
  MyopicPolicy policy(1);
  EXPECT_THROW(run_episode(inst, policy, 1), std::invalid_argument);
}

TEST(SimulateEpisode, ReproducesEstimatorEpisode) {
  const Instance inst = simple_instance(4, 2, 4, 0.9, 0.3, 0.7, 0.1);
  const RandomPolicy proto(2, 8);
  const EpisodeTrace a = simulate_episode(inst, proto, 5, 17);
  const EpisodeTrace b = simulate_episode(inst, proto, 5, 17);
  EXPECT_EQ(a.seed, episode_seed(5, 17));
  EXPECT_EQ(a.discounted_return, b.discounted_return);
}

TEST(EstimateValue, AgreesWithExactEvaluation) {
  Rng rng(61);
  for (int i = 0; i < 4; ++i) {
    const RewardKind kind = i % 2 ? RewardKind::AnySuccess : RewardKind::SumThroughput;
    const Instance inst = conditioned_instance(rng, 3, 2, 4, kind);
    MyopicPolicy policy(2);
    const double exact = evaluate_policy(inst, policy).value;
    const SimResult mc = estimate_value(inst, MyopicPolicy(2), 40000, 100 + i, 4);
    EXPECT_LT(std::abs(mc.mean - exact), 3 * mc.std_error + 1e-12)
        << mc.mean << " vs " << exact << " se " << mc.std_error;
  }
}

TEST(EstimateValue, ZeroDiscountGivesZero) {
  const Instance inst = simple_instance(4, 2, 4, 0.0, 0.3, 0.7, 0.1);
  const SimResult r = estimate_value(inst, MyopicPolicy(2), 1000, 1);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(EstimateValue, StandardErrorShrinksWithEpisodes) {
  const Instance inst = simple_instance(4, 2, 4, 0.9, 0.3, 0.7, 0.1);
  const SimResult a = estimate_value(inst, MyopicPolicy(2), 20000, 9, 4);
  const SimResult b = estimate_value(inst, MyopicPolicy(2), 40000, 9, 4);
  EXPECT_NEAR(b.std_error / a.std_error, 1.0 / std::sqrt(2.0), 0.05);
}

TEST(EstimateValue, IndependentOfThreadCount) {
  const Instance inst = simple_instance(4, 2, 5, 0.9, 0.3, 0.7, 0.1, RewardKind::AnySuccess);
  const SimResult one = estimate_value(inst, RandomPolicy(2, 4), 5000, 33, 1);
  const SimResult many = estimate_value(inst, RandomPolicy(2, 4), 5000, 33, 7);
  EXPECT_EQ(one.mean, many.mean);
  EXPECT_EQ(one.std_error, many.std_error);
}

TEST(EstimateValue, RejectsCustomReward) {
  const auto f = RewardSpec::custom(2, [](std::span<const double> w) { return w[0] + w[1]; });
  const ChannelParams params(0.3, 0.7);
  const Instance inst(3, 2, 2, 0.9, params, SensingModel(0.1), f, initial_belief(params, 3));
  EXPECT_THROW(estimate_value(inst, MyopicPolicy(2), 10, 1), std::invalid_argument);
}

TEST(PairwiseSum, MatchesNaiveSumOnExactInputs) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(xs), 499500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(TraceCsv, Format) {
  const Instance inst = simple_instance(3, 1, 2, 0.9, 0.3, 0.7, 0.1);
  MyopicPolicy policy(1);
  const EpisodeTrace tr = run_episode(inst, policy, 4);
  std::ostringstream out;
  write_trace_csv(out, tr);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,state_bits,action_ids,ack_ids,reward,beliefs_after");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",", 0), 0U) << line;
    const std::string beliefs = line.substr(line.rfind(',') + 1);
    std::istringstream parts(beliefs);
    std::string b;
    int count = 0;
    while (std::getline(parts, b, ';')) {
      ++count;
      const double v = std::stod(b);
      const std::size_t i = static_cast<std::size_t>(count - 1);
      EXPECT_EQ(v, tr.slots[static_cast<std::size_t>(rows - 1)].belief_after[i]);
    }
    EXPECT_EQ(count, 3);
  }
  EXPECT_EQ(rows, 2);
}
