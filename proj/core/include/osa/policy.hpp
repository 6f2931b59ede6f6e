#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osa/channel_model.hpp"
#include "osa/random.hpp"

namespace osa {

/// A set of k distinct channel ids, stored in ascending order.
class Action {
 public:
  Action() = default;
  /// Validates ids < n_channels and the absence of duplicates.
  Action(std::vector<ChannelId> channels, std::size_t n_channels);

  std::size_t size() const noexcept { return channels_.size(); }
  std::span<const ChannelId> channels() const noexcept { return channels_; }
  bool contains(ChannelId id) const;

  friend bool operator==(const Action&, const Action&) = default;

 private:
  std::vector<ChannelId> channels_;
};

/// k channels with the largest beliefs; ties go to the lower channel id.
Action myopic_action(const BeliefVector& belief, std::size_t k);

enum class PolicyKind { Myopic, Random, Fixed };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

/// Maps the belief at slot t (1-based) to the set of channels to sense.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Action act(const BeliefVector& belief, std::size_t slot) = 0;
  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t arity() const noexcept = 0;
  /// False for policies that consume random numbers.
  virtual bool deterministic() const noexcept = 0;
  /// Independent copy for one episode. Stochastic policies restart their
  /// generator from `seed`; deterministic ones ignore it.
  virtual std::unique_ptr<Policy> fork(std::uint64_t seed) const = 0;
};

class MyopicPolicy final : public Policy {
 public:
  explicit MyopicPolicy(std::size_t k);

  Action act(const BeliefVector& belief, std::size_t slot) override;
  std::string_view name() const noexcept override { return "myopic"; }
  std::size_t arity() const noexcept override { return k_; }
  bool deterministic() const noexcept override { return true; }
  std::unique_ptr<Policy> fork(std::uint64_t seed) const override;

 private:
  std::size_t k_;
};

class RandomPolicy final : public Policy {
 public:
  RandomPolicy(std::size_t k, std::uint64_t seed);

  Action act(const BeliefVector& belief, std::size_t slot) override;
  std::string_view name() const noexcept override { return "random"; }
  std::size_t arity() const noexcept override { return k_; }
  bool deterministic() const noexcept override { return false; }
  std::unique_ptr<Policy> fork(std::uint64_t seed) const override;

 private:
  std::size_t k_;
  Rng rng_;
};

class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(Action action);

  Action act(const BeliefVector& belief, std::size_t slot) override;
  std::string_view name() const noexcept override { return "fixed"; }
  std::size_t arity() const noexcept override { return action_.size(); }
  bool deterministic() const noexcept override { return true; }
  std::unique_ptr<Policy> fork(std::uint64_t seed) const override;

 private:
  Action action_;
};

std::unique_ptr<Policy> myopic_policy(std::size_t k);
std::unique_ptr<Policy> random_policy(std::size_t k, std::uint64_t seed);
/// Throws std::invalid_argument when an id is >= n_channels or when the
/// number of channels differs from the expected arity k.
std::unique_ptr<Policy> fixed_policy(std::vector<ChannelId> channels, std::size_t n_channels,
                                     std::size_t k);

}  // namespace osa
