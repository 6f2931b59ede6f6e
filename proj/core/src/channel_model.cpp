#include "osa/channel_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace osa {
namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

constexpr std::size_t kMaxActionSize = 62;

}  // namespace

ChannelParams::ChannelParams(double p01, double p11) : p01_(p01), p11_(p11) {
  if (!is_probability(p01) || !is_probability(p11)) {
    throw std::invalid_argument("channel transition probabilities must lie in [0, 1]");
  }
  if (!(p01 < p11)) {
    throw std::invalid_argument("channel must be positively correlated (p01 < p11), got p01=" +
                                std::to_string(p01) + " p11=" + std::to_string(p11));
  }
}

double ChannelParams::stationary() const {
  const double denom = p01_ + 1.0 - p11_;
  if (denom <= 0.0) {
    throw std::domain_error("stationary distribution undefined for p01 = 0, p11 = 1");
  }
  return p01_ / denom;
}

double ChannelParams::epsilon_bound() const noexcept {
  // p11 > 0 and p01 < 1 always hold for a positively correlated chain.
  return p01_ * (1.0 - p11_) / (p11_ * (1.0 - p01_));
}

SensingModel::SensingModel(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1)");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
}

BeliefVector::BeliefVector(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (!is_probability(omegas_[i])) {
      throw std::invalid_argument("belief of channel " + std::to_string(i) +
                                  " outside [0, 1]: " + std::to_string(omegas_[i]));
    }
  }
}

bool BeliefVector::in_band(const ChannelParams& params) const noexcept {
  return std::all_of(omegas_.begin(), omegas_.end(),
                     [&](double w) { return params.in_band(w); });
}

double tau(double omega, const ChannelParams& params) noexcept {
  return omega * params.p11() + (1.0 - omega) * params.p01();
}

double phi(double omega, const SensingModel& sensing) noexcept {
  const double num = sensing.epsilon() * omega;
  const double denom = num + (1.0 - omega);
  if (denom <= 0.0) return 1.0;
  return num / denom;
}

double ack_probability(double omega, const SensingModel& sensing) noexcept {
  return (1.0 - sensing.epsilon()) * omega;
}

double next_belief(double omega, bool sensed, bool acked, const ChannelParams& params,
                   const SensingModel& sensing) noexcept {
  if (!sensed) return tau(omega, params);
  if (acked) return params.p11();
  return tau(phi(omega, sensing), params);
}

BeliefVector update_belief(const BeliefVector& belief, const Observation& obs,
                           const ChannelParams& params, const SensingModel& sensing) {
  const std::size_t n = belief.size();
  std::vector<char> sensed(n, 0);
  std::vector<char> acked(n, 0);
  for (ChannelId i : obs.sensed) {
    if (i >= n) throw std::invalid_argument("sensed channel id out of range");
    sensed[i] = 1;
  }
  for (ChannelId i : obs.acks) {
    if (i >= n || !sensed[i]) {
      throw std::invalid_argument("ACK reported on channel " + std::to_string(i) +
                                  " that was not sensed");
    }
    acked[i] = 1;
  }
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = next_belief(belief[i], sensed[i] != 0, acked[i] != 0, params, sensing);
  }
  return BeliefVector(std::move(next));
}

std::vector<Outcome> enumerate_outcomes(std::span<const double> sensed_beliefs,
                                        const SensingModel& sensing) {
  const std::size_t k = sensed_beliefs.size();
  if (k == 0) throw std::invalid_argument("cannot enumerate outcomes of an empty action");
  if (k > kMaxActionSize) throw std::invalid_argument("action too large to enumerate");

  std::vector<double> ack(k);
  for (std::size_t j = 0; j < k; ++j) ack[j] = ack_probability(sensed_beliefs[j], sensing);

  const std::uint64_t count = std::uint64_t{1} << k;
  std::vector<Outcome> out;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double p = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      p *= ((mask >> j) & 1U) ? ack[j] : 1.0 - ack[j];
    }
    out.push_back({mask, p});
  }
  return out;
}

std::vector<Outcome> enumerate_outcomes(const BeliefVector& belief,
                                        std::span<const ChannelId> action,
                                        const SensingModel& sensing) {
  std::vector<double> sensed;
  sensed.reserve(action.size());
  for (ChannelId i : action) sensed.push_back(belief.at(i));
  return enumerate_outcomes(std::span<const double>(sensed), sensing);
}

Observation observation_from_mask(std::span<const ChannelId> action, std::uint64_t ack_mask) {
  Observation obs;
  obs.sensed.assign(action.begin(), action.end());
  for (std::size_t j = 0; j < action.size(); ++j) {
    if ((ack_mask >> j) & 1U) obs.acks.push_back(action[j]);
  }
  return obs;
}

BeliefVector initial_belief(const ChannelParams& params, std::size_t n) {
  return BeliefVector(std::vector<double>(n, params.stationary()));
}

}  // namespace osa
