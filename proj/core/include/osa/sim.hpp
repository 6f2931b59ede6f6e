#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "osa/channel_model.hpp"
#include "osa/instance.hpp"
#include "osa/policy.hpp"

namespace osa {

struct SlotRecord {
  std::size_t slot = 0;  // 1-based
  /// True channel states S(t), 1 = good.
  std::vector<std::uint8_t> states;
  Action action;
  std::vector<ChannelId> acks;
  /// Realized, undiscounted reward of the slot.
  double reward = 0.0;
  BeliefVector belief_before;
  BeliefVector belief_after;
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::vector<SlotRecord> slots;
  /// sum_t beta^t * reward_t.
  double discounted_return = 0.0;
};

struct SimResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t episodes = 0;
  std::uint64_t seed = 0;
};

/// Realized reward of a slot given the ACKs: one unit per ACK for
/// sum-throughput, one unit if any ACK arrived for any-success. Both have
/// conditional expectation F(beliefs of the sensed channels).
double realized_reward(RewardKind kind, std::size_t ack_count);

/// Simulates one episode. Initial states are drawn independently from the
/// initial belief; a sensed good channel ACKs with probability 1 - epsilon
/// and a bad one never does. `policy` is used as-is; the trace depends only
/// on (inst, policy state, seed).
EpisodeTrace run_episode(const Instance& inst, Policy& policy, std::uint64_t seed);

/// Seed of episode i under root seed `root`.
std::uint64_t episode_seed(std::uint64_t root, std::size_t episode);

/// Episode i of estimate_value(inst, prototype, ., root, .), with the same
/// seed and policy fork, so its trace can be reproduced on its own.
EpisodeTrace simulate_episode(const Instance& inst, const Policy& prototype, std::uint64_t root,
                              std::size_t episode);

/// Mean and standard error of the discounted return over `episodes`
/// independent episodes. Episode i uses episode_seed(seed, i) and a fork of
/// `prototype`, so results do not depend on `threads`.
SimResult estimate_value(const Instance& inst, const Policy& prototype, std::size_t episodes,
                         std::uint64_t seed, std::size_t threads = 1);

/// Sum by recursive halving; same result for the same input order.
double pairwise_sum(std::span<const double> xs);

inline constexpr const char* kTraceCsvHeader = "t,state_bits,action_ids,ack_ids,reward,beliefs_after";

/// One row per slot. state_bits lists S_i for i = 0..N-1; id and belief
/// lists are ';'-separated; beliefs use 17 significant digits.
void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);

}  // namespace osa
