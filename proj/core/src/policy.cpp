#include "osa/policy.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace osa {

Action::Action(std::vector<ChannelId> channels, std::size_t n_channels)
    : channels_(std::move(channels)) {
  std::sort(channels_.begin(), channels_.end());
  if (std::adjacent_find(channels_.begin(), channels_.end()) != channels_.end()) {
    throw std::invalid_argument("action contains a duplicate channel id");
  }
  if (!channels_.empty() && channels_.back() >= n_channels) {
    throw std::invalid_argument("channel id " + std::to_string(channels_.back()) +
                                " out of range for N=" + std::to_string(n_channels));
  }
}

bool Action::contains(ChannelId id) const {
  return std::binary_search(channels_.begin(), channels_.end(), id);
}

Action myopic_action(const BeliefVector& belief, std::size_t k) {
  const std::size_t n = belief.size();
  if (k > n) {
    throw std::invalid_argument("cannot sense k=" + std::to_string(k) + " of N=" +
                                std::to_string(n) + " channels");
  }
  std::vector<ChannelId> order(n);
  std::iota(order.begin(), order.end(), ChannelId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](ChannelId a, ChannelId b) { return belief[a] > belief[b]; });
  order.resize(k);
  return Action(std::move(order), n);
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Myopic: return "myopic";
    case PolicyKind::Random: return "random";
    case PolicyKind::Fixed: return "fixed";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "myopic") return PolicyKind::Myopic;
  if (name == "random") return PolicyKind::Random;
  if (name == "fixed") return PolicyKind::Fixed;
  return std::nullopt;
}

MyopicPolicy::MyopicPolicy(std::size_t k) : k_(k) {
  if (k == 0) throw std::invalid_argument("policy must sense at least one channel");
}

Action MyopicPolicy::act(const BeliefVector& belief, std::size_t) {
  return myopic_action(belief, k_);
}

std::unique_ptr<Policy> MyopicPolicy::fork(std::uint64_t) const {
  return std::make_unique<MyopicPolicy>(*this);
}

RandomPolicy::RandomPolicy(std::size_t k, std::uint64_t seed) : k_(k), rng_(seed) {
  if (k == 0) throw std::invalid_argument("policy must sense at least one channel");
}

Action RandomPolicy::act(const BeliefVector& belief, std::size_t) {
  const std::size_t n = belief.size();
  if (k_ > n) throw std::invalid_argument("random policy arity exceeds channel count");
  std::vector<ChannelId> ids(n);
  std::iota(ids.begin(), ids.end(), ChannelId{0});
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k_; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng_, n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k_);
  return Action(std::move(ids), n);
}

std::unique_ptr<Policy> RandomPolicy::fork(std::uint64_t seed) const {
  return std::make_unique<RandomPolicy>(k_, seed);
}

FixedPolicy::FixedPolicy(Action action) : action_(std::move(action)) {
  if (action_.size() == 0) throw std::invalid_argument("fixed policy needs at least one channel");
}

Action FixedPolicy::act(const BeliefVector& belief, std::size_t) {
  if (!action_.channels().empty() && action_.channels().back() >= belief.size()) {
    throw std::invalid_argument("fixed policy refers to a channel beyond the belief vector");
  }
  return action_;
}

std::unique_ptr<Policy> FixedPolicy::fork(std::uint64_t) const {
  return std::make_unique<FixedPolicy>(*this);
}

std::unique_ptr<Policy> myopic_policy(std::size_t k) { return std::make_unique<MyopicPolicy>(k); }

std::unique_ptr<Policy> random_policy(std::size_t k, std::uint64_t seed) {
  return std::make_unique<RandomPolicy>(k, seed);
}

std::unique_ptr<Policy> fixed_policy(std::vector<ChannelId> channels, std::size_t n_channels,
                                     std::size_t k) {
  if (channels.size() != k) {
    throw std::invalid_argument("fixed policy lists " + std::to_string(channels.size()) +
                                " channels but the instance senses k=" + std::to_string(k));
  }
  return std::make_unique<FixedPolicy>(Action(std::move(channels), n_channels));
}

}  // namespace osa
