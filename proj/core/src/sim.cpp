#include "osa/sim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "osa/format.hpp"
#include "osa/parallel.hpp"
#include "osa/random.hpp"

namespace osa {
namespace {

constexpr std::uint64_t kPolicyStream = 0x706f6c696379ULL;

template <typename Range, typename Fmt>
std::string join(const Range& xs, Fmt fmt) {
  std::string out;
  bool first = true;
  for (const auto& x : xs) {
    if (!first) out += ';';
    out += fmt(x);
    first = false;
  }
  return out;
}

}  // namespace

double realized_reward(RewardKind kind, std::size_t ack_count) {
  switch (kind) {
    case RewardKind::SumThroughput: return static_cast<double>(ack_count);
    case RewardKind::AnySuccess: return ack_count > 0 ? 1.0 : 0.0;
    case RewardKind::Custom: break;
  }
  throw std::invalid_argument("custom rewards have no realized-reward mapping to simulate");
}

EpisodeTrace run_episode(const Instance& inst, Policy& policy, std::uint64_t seed) {
  if (policy.arity() != inst.k()) {
    throw std::invalid_argument("policy arity does not match the instance's k");
  }
  // Reject unsupported rewards before drawing anything.
  realized_reward(inst.reward().kind(), 0);

  const std::size_t n = inst.n_channels();
  const double eps = inst.sensing().epsilon();
  const auto& params = inst.params();
  Rng rng(seed);

  EpisodeTrace trace;
  trace.seed = seed;
  trace.slots.reserve(inst.horizon());

  std::vector<std::uint8_t> state(n);
  for (std::size_t i = 0; i < n; ++i) state[i] = bernoulli(rng, inst.initial()[i]) ? 1 : 0;
  BeliefVector belief = inst.initial();
  double discount = 1.0;

  for (std::size_t t = 1; t <= inst.horizon(); ++t) {
    if (t > 1) {
      for (auto& s : state) s = bernoulli(rng, s ? params.p11() : params.p01()) ? 1 : 0;
    }
    SlotRecord rec;
    rec.slot = t;
    rec.states = state;
    rec.action = policy.act(belief, t);
    if (rec.action.size() != inst.k()) {
      throw std::logic_error("policy returned an action of the wrong size");
    }
    Observation obs;
    obs.sensed.assign(rec.action.channels().begin(), rec.action.channels().end());
    for (ChannelId c : rec.action.channels()) {
      // A draw is consumed for every sensed channel so the stream layout
      // does not depend on the channel state.
      const bool detected = bernoulli(rng, 1.0 - eps);
      if (state[c] == 1 && detected) obs.acks.push_back(c);
    }
    rec.acks = obs.acks;
    rec.reward = realized_reward(inst.reward().kind(), obs.acks.size());
    discount *= inst.beta();
    trace.discounted_return += discount * rec.reward;
    rec.belief_before = belief;
    belief = update_belief(belief, obs, params, inst.sensing());
    rec.belief_after = belief;
    trace.slots.push_back(std::move(rec));
  }
  return trace;
}

std::uint64_t episode_seed(std::uint64_t root, std::size_t episode) {
  return derive_seed(root, episode);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

EpisodeTrace simulate_episode(const Instance& inst, const Policy& prototype, std::uint64_t root,
                              std::size_t episode) {
  const std::uint64_t s = episode_seed(root, episode);
  auto policy = prototype.fork(derive_seed(s, kPolicyStream));
  return run_episode(inst, *policy, s);
}

SimResult estimate_value(const Instance& inst, const Policy& prototype, std::size_t episodes,
                         std::uint64_t seed, std::size_t threads) {
  if (episodes < 2) throw std::invalid_argument("estimate_value needs at least two episodes");
  std::vector<double> returns(episodes);
  parallel_for(episodes, threads, [&](std::size_t e) {
    returns[e] = simulate_episode(inst, prototype, seed, e).discounted_return;
  });

  const double n = static_cast<double>(episodes);
  const double mean = pairwise_sum(returns) / n;
  std::vector<double> sq(episodes);
  for (std::size_t e = 0; e < episodes; ++e) sq[e] = (returns[e] - mean) * (returns[e] - mean);
  const double variance = pairwise_sum(sq) / (n - 1.0);

  SimResult r;
  r.mean = mean;
  r.std_error = std::sqrt(variance / n);
  r.episodes = episodes;
  r.seed = seed;
  return r;
}

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const SlotRecord& rec : trace.slots) {
    std::string bits;
    for (auto s : rec.states) bits += s ? '1' : '0';
    const auto id = [](ChannelId c) { return std::to_string(c); };
    out << rec.slot << ',' << bits << ',' << join(rec.action.channels(), id) << ','
        << join(rec.acks, id) << ',' << format_double(rec.reward) << ','
        << join(rec.belief_after.values(), format_double) << '\n';
  }
}

}  // namespace osa
