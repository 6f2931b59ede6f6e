#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osa/channel_model.hpp"

namespace osa {

enum class RewardKind { SumThroughput, AnySuccess, Custom };

std::string_view to_string(RewardKind kind);
/// Accepts "sum-throughput" and "any-success".
std::optional<RewardKind> parse_reward_kind(std::string_view name);

/// Expected immediate reward F over the beliefs of the k sensed channels.
///
/// Built-in kinds are evaluated in closed form; custom kinds wrap an
/// arbitrary callable and are only trusted after check_regularity passes.
class RewardSpec {
 public:
  using Function = std::function<double(std::span<const double>)>;

  static RewardSpec sum_throughput(std::size_t k, const SensingModel& sensing);
  static RewardSpec any_success(std::size_t k, const SensingModel& sensing);
  static RewardSpec custom(std::size_t k, Function f, std::string label = "custom");

  RewardKind kind() const noexcept { return kind_; }
  std::size_t arity() const noexcept { return arity_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::string& label() const noexcept { return label_; }

  double evaluate(std::span<const double> sensed) const;
  double operator()(std::span<const double> sensed) const { return evaluate(sensed); }

 private:
  RewardSpec(RewardKind kind, std::size_t k, double epsilon, Function f, std::string label);

  RewardKind kind_;
  std::size_t arity_;
  double epsilon_;
  Function custom_;
  std::string label_;
};

RewardSpec sum_throughput_reward(std::size_t k, const SensingModel& sensing);
RewardSpec any_success_reward(std::size_t k, const SensingModel& sensing);

/// Range over which the other k-1 arguments vary when computing the
/// marginal gain F(1, w) - F(0, w).
enum class DeltaDomain { Unit, Band };

std::string_view to_string(DeltaDomain domain);
std::optional<DeltaDomain> parse_delta_domain(std::string_view name);

struct DeltaBounds {
  double delta_min = 0.0;
  double delta_max = 0.0;
  /// Grid points per axis used by a numerical search; 0 for closed forms.
  std::size_t grid_resolution = 0;
};

/// Extremes of F(1, w) - F(0, w) over w in the domain^(k-1).
///
/// Built-in kinds return their closed forms: 1 - eps for
/// sum-throughput, and (1-eps)^(k-1) lo^(k-1), (1-eps)^(k-1) hi^(k-1) for
/// any-success with [lo, hi] the domain. Custom kinds are searched on a
/// grid (101 points per axis, one refinement pass) and rejected for k > 7.
DeltaBounds delta_bounds(const RewardSpec& spec, const ChannelParams& params,
                         DeltaDomain domain = DeltaDomain::Unit);

/// Grid search applied to any kind, including built-ins.
DeltaBounds delta_bounds_by_grid(const RewardSpec& spec, const ChannelParams& params,
                                 DeltaDomain domain = DeltaDomain::Unit);

/// Exact extremes of the marginal gain for a regular F: the gain is affine
/// in every argument, so its extremes sit on the 2^(k-1) corners of the box.
DeltaBounds delta_bounds_by_vertices(const RewardSpec& spec, const ChannelParams& params,
                                     DeltaDomain domain = DeltaDomain::Unit);

/// Which evaluation of the marginal-gain extremes to use: the
/// closed forms of delta_bounds, or the exact extremes over the box.
enum class DeltaMethod { ClosedForm, Exact };

std::string_view to_string(DeltaMethod method);
/// Accepts "closed-form" and "exact".
std::optional<DeltaMethod> parse_delta_method(std::string_view name);

/// ClosedForm: delta_bounds. Exact: delta_bounds_by_vertices for built-in
/// kinds, delta_bounds_by_grid for custom ones.
DeltaBounds delta_bounds(const RewardSpec& spec, const ChannelParams& params, DeltaDomain domain,
                         DeltaMethod method);

struct RegularityReport {
  bool symmetric = true;
  bool monotone = true;
  bool decomposable = true;
  std::size_t samples = 0;
  /// Empty on success, otherwise a description of the first failing point.
  std::string counterexample;

  bool passed() const noexcept { return symmetric && monotone && decomposable; }
};

/// Random-sample check of the three regularity axioms at tolerance 1e-9.
RegularityReport check_regularity(const RewardSpec& spec, std::size_t samples,
                                  std::uint64_t seed);

}  // namespace osa
