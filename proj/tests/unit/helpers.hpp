#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <unistd.h>
#include <string>
#include <vector>

#include "osa/osa.hpp"

namespace testing_support {

/// Random instance meeting the closed-form conditions (closed-form Delta,
/// band domain): 0.05 <= p01 < p11 <= 0.95, eps below its bound, beta at or
/// below its bound, beliefs uniform in [p01, p11].
inline osa::Instance conditioned_instance(osa::Rng& rng, std::size_t n, std::size_t k,
                                          std::size_t horizon, osa::RewardKind reward) {
  const double p01 = osa::uniform(rng, 0.05, 0.9);
  const double p11 = osa::uniform(rng, p01 + 0.01, 0.95);
  const osa::ChannelParams params(p01, p11);
  const osa::SensingModel sensing(osa::uniform(rng, 0.0, params.epsilon_bound()) * 0.999);
  std::vector<double> w(n);
  for (double& x : w) x = osa::uniform(rng, p01, p11);
  const osa::Instance base = osa::make_instance(n, k, horizon, 1.0, params, sensing, reward,
                                                osa::BeliefVector(w));
  const double bound = osa::check_conditions(base).beta_bound;
  return base.with_beta(std::min(1.0, bound) * osa::uniform01(rng));
}

inline osa::Instance simple_instance(std::size_t n, std::size_t k, std::size_t horizon,
                                     double beta, double p01, double p11, double eps,
                                     osa::RewardKind reward = osa::RewardKind::SumThroughput) {
  const osa::ChannelParams params(p01, p11);
  return osa::make_instance(n, k, horizon, beta, params, osa::SensingModel(eps), reward,
                            osa::initial_belief(params, n));
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("osa-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
