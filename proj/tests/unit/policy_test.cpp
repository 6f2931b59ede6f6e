#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "osa/exact_solver.hpp"
#include "osa/policy.hpp"
#include "osa/random.hpp"

using namespace osa;

namespace {

std::vector<ChannelId> ids(const Action& a) { return {a.channels().begin(), a.channels().end()}; }

}  // namespace

TEST(MyopicAction, TopK) {
  EXPECT_EQ(ids(myopic_action(BeliefVector({0.5, 0.9, 0.7}), 2)), (std::vector<ChannelId>{1, 2}));
  EXPECT_EQ(ids(myopic_action(BeliefVector({0.3, 0.3, 0.8}), 1)), (std::vector<ChannelId>{2}));
}

TEST(MyopicAction, TiesGoToLowerIds) {
  EXPECT_EQ(ids(myopic_action(BeliefVector({0.4, 0.4, 0.4, 0.4}), 2)),
            (std::vector<ChannelId>{0, 1}));
  EXPECT_EQ(ids(myopic_action(BeliefVector({0.2, 0.4, 0.4, 0.4}), 2)),
            (std::vector<ChannelId>{1, 2}));
}

TEST(MyopicAction, RejectsKAboveN) {
  EXPECT_THROW(myopic_action(BeliefVector({0.1, 0.2}), 3), std::invalid_argument);
}

TEST(MyopicAction, MaximizesSumOverAllSubsets) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + uniform_index(rng, 10);
    const std::size_t k = 1 + uniform_index(rng, n);
    std::vector<double> w(n);
    for (double& x : w) x = uniform01(rng);
    const BeliefVector b(w);
    const Action a = myopic_action(b, k);
    double chosen = 0.0;
    for (ChannelId c : a.channels()) chosen += w[c];
    double best = -1.0;
    for (const auto& s : k_subsets(n, k)) {
      double sum = 0.0;
      for (ChannelId c : s) sum += w[c];
      best = std::max(best, sum);
    }
    ASSERT_NEAR(chosen, best, 1e-12);
  }
}

TEST(MyopicAction, PermutationEquivariant) {
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 7);
    const std::size_t k = 1 + uniform_index(rng, n);
    std::vector<double> w(n);
    for (double& x : w) x = uniform01(rng);
    std::vector<ChannelId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(n);
    for (std::size_t j = 0; j < n; ++j) permuted[perm[j]] = w[j];
    const Action a = myopic_action(BeliefVector(w), k);
    std::vector<ChannelId> mapped;
    for (ChannelId c : a.channels()) mapped.push_back(perm[c]);
    std::sort(mapped.begin(), mapped.end());
    ASSERT_EQ(ids(myopic_action(BeliefVector(permuted), k)), mapped);
  }
}

TEST(Action, ValidatesIds) {
  EXPECT_THROW(Action({0, 0}, 3), std::invalid_argument);
  EXPECT_THROW(Action({3}, 3), std::invalid_argument);
  EXPECT_EQ(ids(Action({2, 0}, 3)), (std::vector<ChannelId>{0, 2}));
}

TEST(RandomPolicy, SameSeedSameSequence) {
  RandomPolicy a(2, 99);
  RandomPolicy b(2, 99);
  const BeliefVector w({0.1, 0.2, 0.3, 0.4, 0.5});
  for (std::size_t t = 1; t <= 200; ++t) ASSERT_EQ(a.act(w, t), b.act(w, t));
}

TEST(RandomPolicy, OnlySubsetWhenKEqualsN) {
  RandomPolicy p(3, 5);
  const BeliefVector w({0.1, 0.2, 0.3});
  for (std::size_t t = 1; t <= 50; ++t) {
    EXPECT_EQ(ids(p.act(w, t)), (std::vector<ChannelId>{0, 1, 2}));
  }
}

TEST(RandomPolicy, UniformOverSubsets) {
  const std::size_t n = 5;
  const std::size_t k = 2;
  const int draws = 100000;
  RandomPolicy p(k, 2024);
  const BeliefVector w(std::vector<double>(n, 0.5));
  std::map<std::vector<ChannelId>, int> counts;
  for (int i = 0; i < draws; ++i) ++counts[ids(p.act(w, 1))];
  ASSERT_EQ(counts.size(), 10U);
  const double expected = draws / 10.0;
  double chi2 = 0.0;
  for (const auto& [s, c] : counts) {
    const double sigma = std::sqrt(expected * (1.0 - 0.1));
    EXPECT_LT(std::abs(c - expected), 3 * sigma + 1) << "subset count " << c;
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 9 degrees of freedom; 27.9 is the 0.999 quantile.
  EXPECT_LT(chi2, 27.9);
}

TEST(FixedPolicy, ConstantAndValidated) {
  auto p = fixed_policy({0}, 3, 1);
  EXPECT_EQ(ids(p->act(BeliefVector({0.1, 0.9, 0.5}), 1)), (std::vector<ChannelId>{0}));
  EXPECT_THROW(fixed_policy({3}, 3, 1), std::invalid_argument);
  EXPECT_THROW(fixed_policy({0, 1}, 3, 1), std::invalid_argument);
}

TEST(PolicyKindNames, RoundTrip) {
  for (PolicyKind k : {PolicyKind::Myopic, PolicyKind::Random, PolicyKind::Fixed}) {
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_policy_kind("greedy").has_value());
}
