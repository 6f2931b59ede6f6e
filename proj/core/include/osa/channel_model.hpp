#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace osa {

using ChannelId = std::size_t;

/// Two-state (bad = 0, good = 1) Markov chain shared by every channel.
///
/// Only positively correlated chains are representable: construction fails
/// unless 0 <= p01 < p11 <= 1.
class ChannelParams {
 public:
  ChannelParams(double p01, double p11);

  double p01() const noexcept { return p01_; }
  double p11() const noexcept { return p11_; }

  /// Stationary probability of the good state, p01 / (p01 + 1 - p11).
  /// Throws std::domain_error when p01 = 0 and p11 = 1 (absorbing chain).
  double stationary() const;

  /// Largest false-alarm rate for which a no-ACK posterior of any in-band
  /// belief stays at or below p01: (1 - p11) p01 / (p11 (1 - p01)).
  double epsilon_bound() const noexcept;

  bool in_band(double omega) const noexcept { return omega >= p01_ && omega <= p11_; }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;

 private:
  double p01_;
  double p11_;
};

/// Sensing error rates. Only epsilon enters the belief and reward
/// arithmetic: a good channel that is sensed produces an ACK with
/// probability 1 - epsilon and a bad channel never does. delta is carried
/// for reporting.
class SensingModel {
 public:
  explicit SensingModel(double epsilon, double delta = 0.0);

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }

  friend bool operator==(const SensingModel&, const SensingModel&) = default;

 private:
  double epsilon_;
  double delta_;
};

/// Per-channel probability of the good state, indexed by channel id.
class BeliefVector {
 public:
  BeliefVector() = default;
  explicit BeliefVector(std::vector<double> omegas);

  std::size_t size() const noexcept { return omegas_.size(); }
  double operator[](ChannelId i) const { return omegas_[i]; }
  double at(ChannelId i) const { return omegas_.at(i); }
  std::span<const double> values() const noexcept { return omegas_; }
  auto begin() const noexcept { return omegas_.begin(); }
  auto end() const noexcept { return omegas_.end(); }

  bool in_band(const ChannelParams& params) const noexcept;

  friend bool operator==(const BeliefVector&, const BeliefVector&) = default;

 private:
  std::vector<double> omegas_;
};

/// What the user learns at the end of a slot: which channels were sensed
/// and which of those returned an ACK.
struct Observation {
  std::vector<ChannelId> sensed;
  std::vector<ChannelId> acks;
};

/// One element of the outcome distribution of a sensing action. Bit j of
/// ack_mask refers to the j-th channel of the action.
struct Outcome {
  std::uint64_t ack_mask = 0;
  double probability = 0.0;
};

/// One-step belief propagation for an unobserved channel.
double tau(double omega, const ChannelParams& params) noexcept;

/// Posterior of the good state after sensing without an ACK.
/// The removable singularity at (epsilon = 0, omega = 1) evaluates to 1.
double phi(double omega, const SensingModel& sensing) noexcept;

/// Probability that a sensed channel with belief omega returns an ACK.
double ack_probability(double omega, const SensingModel& sensing) noexcept;

/// Next-slot belief of a single channel.
double next_belief(double omega, bool sensed, bool acked, const ChannelParams& params,
                   const SensingModel& sensing) noexcept;

BeliefVector update_belief(const BeliefVector& belief, const Observation& obs,
                           const ChannelParams& params, const SensingModel& sensing);

/// All 2^k ACK patterns of `action` with their probabilities, in increasing
/// ack_mask order.
std::vector<Outcome> enumerate_outcomes(const BeliefVector& belief,
                                        std::span<const ChannelId> action,
                                        const SensingModel& sensing);

/// Same as enumerate_outcomes but on the raw beliefs of the sensed channels.
std::vector<Outcome> enumerate_outcomes(std::span<const double> sensed_beliefs,
                                        const SensingModel& sensing);

/// Observation corresponding to an outcome of `action`.
Observation observation_from_mask(std::span<const ChannelId> action, std::uint64_t ack_mask);

BeliefVector initial_belief(const ChannelParams& params, std::size_t n);

}  // namespace osa
