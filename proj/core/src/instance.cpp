#include "osa/instance.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace osa {

Instance::Instance(std::size_t n_channels, std::size_t k, std::size_t horizon, double beta,
                   ChannelParams params, SensingModel sensing, RewardSpec reward,
                   BeliefVector initial)
    : n_channels_(n_channels),
      k_(k),
      horizon_(horizon),
      beta_(beta),
      params_(params),
      sensing_(sensing),
      reward_(std::move(reward)),
      initial_(std::move(initial)) {
  if (k_ < 1 || k_ > n_channels_) {
    throw std::invalid_argument("need 1 <= k <= N, got k=" + std::to_string(k_) +
                                " N=" + std::to_string(n_channels_));
  }
  if (horizon_ < 1) throw std::invalid_argument("horizon must be at least one slot");
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  if (reward_.arity() != k_) {
    throw std::invalid_argument("reward arity " + std::to_string(reward_.arity()) +
                                " does not match k=" + std::to_string(k_));
  }
  if (initial_.size() != n_channels_) {
    throw std::invalid_argument("initial belief has " + std::to_string(initial_.size()) +
                                " entries, expected N=" + std::to_string(n_channels_));
  }
}

Instance Instance::with_beta(double beta) const {
  return Instance(n_channels_, k_, horizon_, beta, params_, sensing_, reward_, initial_);
}

Instance Instance::with_horizon(std::size_t horizon) const {
  return Instance(n_channels_, k_, horizon, beta_, params_, sensing_, reward_, initial_);
}

Instance Instance::with_initial(BeliefVector initial) const {
  return Instance(n_channels_, k_, horizon_, beta_, params_, sensing_, reward_,
                  std::move(initial));
}

Instance make_instance(std::size_t n_channels, std::size_t k, std::size_t horizon, double beta,
                       ChannelParams params, SensingModel sensing, RewardKind reward,
                       BeliefVector initial) {
  RewardSpec spec = [&] {
    switch (reward) {
      case RewardKind::SumThroughput: return sum_throughput_reward(k, sensing);
      case RewardKind::AnySuccess: return any_success_reward(k, sensing);
      case RewardKind::Custom: break;
    }
    throw std::invalid_argument("custom rewards must be built with RewardSpec::custom");
  }();
  return Instance(n_channels, k, horizon, beta, params, sensing, std::move(spec),
                  std::move(initial));
}

std::string to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["n_channels"] = inst.n_channels();
  j["k"] = inst.k();
  j["horizon"] = inst.horizon();
  j["beta"] = inst.beta();
  j["p01"] = inst.params().p01();
  j["p11"] = inst.params().p11();
  j["epsilon"] = inst.sensing().epsilon();
  j["delta"] = inst.sensing().delta();
  j["reward"] = inst.reward().label();
  j["initial_belief"] = std::vector<double>(inst.initial().begin(), inst.initial().end());
  return j.dump();
}

}  // namespace osa
