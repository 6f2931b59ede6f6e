#pragma once

#include <cstddef>
#include <string>

#include "osa/channel_model.hpp"
#include "osa/reward.hpp"

namespace osa {

/// Everything needed to solve or simulate one access problem: N channels,
/// k sensed per slot, T slots, discount beta.
class Instance {
 public:
  Instance(std::size_t n_channels, std::size_t k, std::size_t horizon, double beta,
           ChannelParams params, SensingModel sensing, RewardSpec reward, BeliefVector initial);

  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t horizon() const noexcept { return horizon_; }
  double beta() const noexcept { return beta_; }
  const ChannelParams& params() const noexcept { return params_; }
  const SensingModel& sensing() const noexcept { return sensing_; }
  const RewardSpec& reward() const noexcept { return reward_; }
  const BeliefVector& initial() const noexcept { return initial_; }

  Instance with_beta(double beta) const;
  Instance with_horizon(std::size_t horizon) const;
  Instance with_initial(BeliefVector initial) const;

 private:
  std::size_t n_channels_;
  std::size_t k_;
  std::size_t horizon_;
  double beta_;
  ChannelParams params_;
  SensingModel sensing_;
  RewardSpec reward_;
  BeliefVector initial_;
};

/// Builds an instance with a built-in reward of the given kind.
Instance make_instance(std::size_t n_channels, std::size_t k, std::size_t horizon, double beta,
                       ChannelParams params, SensingModel sensing, RewardKind reward,
                       BeliefVector initial);

/// Single-line JSON rendering of an instance, used for failure artifacts.
std::string to_json(const Instance& inst);

}  // namespace osa
