#include "osa/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "osa/random.hpp"

namespace osa {
namespace {

constexpr double kRegularityTol = 1e-9;
constexpr std::size_t kGridPointsPerAxis = 101;
constexpr double kGridPointBudget = 2e6;
constexpr std::size_t kMaxGridDims = 6;

struct Interval {
  double lo;
  double hi;
};

Interval domain_interval(DeltaDomain domain, const ChannelParams& params) {
  if (domain == DeltaDomain::Band) return {params.p01(), params.p11()};
  return {0.0, 1.0};
}

double marginal_gain(const RewardSpec& spec, std::vector<double>& args,
                     std::span<const double> others) {
  std::copy(others.begin(), others.end(), args.begin() + 1);
  args[0] = 1.0;
  const double hi = spec.evaluate(args);
  args[0] = 0.0;
  return hi - spec.evaluate(args);
}

/// Visits every point of a regular grid with `points` nodes per axis on the
/// box prod [lo_i, hi_i].
template <typename Visit>
void for_each_grid_point(const std::vector<Interval>& box, std::size_t points, Visit&& visit) {
  const std::size_t dims = box.size();
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> x(dims);
  const auto coord = [&](std::size_t d) {
    if (points == 1) return box[d].lo;
    return box[d].lo + (box[d].hi - box[d].lo) * static_cast<double>(idx[d]) /
                           static_cast<double>(points - 1);
  };
  while (true) {
    for (std::size_t d = 0; d < dims; ++d) x[d] = coord(d);
    visit(std::span<const double>(x));
    std::size_t d = 0;
    while (d < dims && ++idx[d] == points) idx[d++] = 0;
    if (d == dims) break;
  }
}

std::string describe(std::span<const double> xs) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  os << ')';
  return os.str();
}

}  // namespace

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::SumThroughput: return "sum-throughput";
    case RewardKind::AnySuccess: return "any-success";
    case RewardKind::Custom: return "custom";
  }
  return "unknown";
}

std::optional<RewardKind> parse_reward_kind(std::string_view name) {
  if (name == "sum-throughput") return RewardKind::SumThroughput;
  if (name == "any-success") return RewardKind::AnySuccess;
  return std::nullopt;
}

std::string_view to_string(DeltaDomain domain) {
  return domain == DeltaDomain::Band ? "band" : "unit";
}

std::optional<DeltaDomain> parse_delta_domain(std::string_view name) {
  if (name == "band") return DeltaDomain::Band;
  if (name == "unit") return DeltaDomain::Unit;
  return std::nullopt;
}

RewardSpec::RewardSpec(RewardKind kind, std::size_t k, double epsilon, Function f,
                       std::string label)
    : kind_(kind), arity_(k), epsilon_(epsilon), custom_(std::move(f)), label_(std::move(label)) {
  if (k == 0) throw std::invalid_argument("reward arity must be at least 1");
}

RewardSpec RewardSpec::sum_throughput(std::size_t k, const SensingModel& sensing) {
  return RewardSpec(RewardKind::SumThroughput, k, sensing.epsilon(), {}, "sum-throughput");
}

RewardSpec RewardSpec::any_success(std::size_t k, const SensingModel& sensing) {
  return RewardSpec(RewardKind::AnySuccess, k, sensing.epsilon(), {}, "any-success");
}

RewardSpec RewardSpec::custom(std::size_t k, Function f, std::string label) {
  if (!f) throw std::invalid_argument("custom reward requires a callable");
  return RewardSpec(RewardKind::Custom, k, 0.0, std::move(f), std::move(label));
}

double RewardSpec::evaluate(std::span<const double> sensed) const {
  if (sensed.size() != arity_) throw std::invalid_argument("reward evaluated on the wrong number of channels");
  switch (kind_) {
    case RewardKind::SumThroughput: {
      double s = 0.0;
      for (double w : sensed) s += w;
      return (1.0 - epsilon_) * s;
    }
    case RewardKind::AnySuccess: {
      double none = 1.0;
      for (double w : sensed) none *= 1.0 - (1.0 - epsilon_) * w;
      return 1.0 - none;
    }
    case RewardKind::Custom:
      return custom_(sensed);
  }
  return 0.0;
}

RewardSpec sum_throughput_reward(std::size_t k, const SensingModel& sensing) {
  return RewardSpec::sum_throughput(k, sensing);
}

RewardSpec any_success_reward(std::size_t k, const SensingModel& sensing) {
  return RewardSpec::any_success(k, sensing);
}

DeltaBounds delta_bounds(const RewardSpec& spec, const ChannelParams& params,
                         DeltaDomain domain) {
  const double eps = spec.epsilon();
  switch (spec.kind()) {
    case RewardKind::SumThroughput:
      return {1.0 - eps, 1.0 - eps, 0};
    case RewardKind::AnySuccess: {
      const auto [lo, hi] = domain_interval(domain, params);
      const double m = static_cast<double>(spec.arity() - 1);
      const double scale = std::pow(1.0 - eps, m);
      return {scale * std::pow(lo, m), scale * std::pow(hi, m), 0};
    }
    case RewardKind::Custom:
      return delta_bounds_by_grid(spec, params, domain);
  }
  return {};
}

DeltaBounds delta_bounds_by_grid(const RewardSpec& spec, const ChannelParams& params,
                                 DeltaDomain domain) {
  const std::size_t dims = spec.arity() - 1;
  if (dims > kMaxGridDims) {
    throw std::invalid_argument("grid search for delta bounds supports k <= 7, got k=" +
                                std::to_string(spec.arity()));
  }
  std::vector<double> args(spec.arity());
  if (dims == 0) {
    const double g = marginal_gain(spec, args, {});
    return {g, g, 1};
  }

  std::size_t points = kGridPointsPerAxis;
  while (points > 2 && std::pow(static_cast<double>(points), static_cast<double>(dims)) >
                           kGridPointBudget) {
    --points;
  }

  const Interval base = domain_interval(domain, params);
  const std::vector<Interval> box(dims, base);

  double best_min = std::numeric_limits<double>::infinity();
  double best_max = -std::numeric_limits<double>::infinity();
  std::vector<double> argmin(dims), argmax(dims);
  const auto scan = [&](const std::vector<Interval>& b) {
    for_each_grid_point(b, points, [&](std::span<const double> w) {
      const double g = marginal_gain(spec, args, w);
      if (g < best_min) {
        best_min = g;
        argmin.assign(w.begin(), w.end());
      }
      if (g > best_max) {
        best_max = g;
        argmax.assign(w.begin(), w.end());
      }
    });
  };
  scan(box);

  // One refinement pass on a box of one coarse cell around each incumbent.
  const double cell = (base.hi - base.lo) / static_cast<double>(points - 1);
  for (const auto* centre : {&argmin, &argmax}) {
    std::vector<Interval> local(dims);
    const std::vector<double> c = *centre;
    for (std::size_t d = 0; d < dims; ++d) {
      local[d] = {std::max(base.lo, c[d] - cell), std::min(base.hi, c[d] + cell)};
    }
    scan(local);
  }
  return {best_min, best_max, points};
}

DeltaBounds delta_bounds_by_vertices(const RewardSpec& spec, const ChannelParams& params,
                                     DeltaDomain domain) {
  const std::size_t dims = spec.arity() - 1;
  if (dims >= 30) throw std::invalid_argument("too many arguments for vertex enumeration");
  const Interval base = domain_interval(domain, params);
  std::vector<double> args(spec.arity());
  std::vector<double> w(dims);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dims); ++mask) {
    for (std::size_t d = 0; d < dims; ++d) w[d] = ((mask >> d) & 1U) ? base.hi : base.lo;
    const double g = marginal_gain(spec, args, w);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return {lo, hi, 2};
}

std::string_view to_string(DeltaMethod method) {
  return method == DeltaMethod::ClosedForm ? "closed-form" : "exact";
}

std::optional<DeltaMethod> parse_delta_method(std::string_view name) {
  if (name == "closed-form") return DeltaMethod::ClosedForm;
  if (name == "exact") return DeltaMethod::Exact;
  return std::nullopt;
}

DeltaBounds delta_bounds(const RewardSpec& spec, const ChannelParams& params, DeltaDomain domain,
                         DeltaMethod method) {
  if (method == DeltaMethod::ClosedForm) return delta_bounds(spec, params, domain);
  if (spec.kind() == RewardKind::Custom) return delta_bounds_by_grid(spec, params, domain);
  return delta_bounds_by_vertices(spec, params, domain);
}

RegularityReport check_regularity(const RewardSpec& spec, std::size_t samples,
                                  std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("regularity check needs at least one sample");
  RegularityReport report;
  report.samples = samples;
  Rng rng(seed);
  const std::size_t k = spec.arity();
  std::vector<double> x(k), y(k);

  const auto fail = [&](bool& flag, const std::string& what) {
    if (report.counterexample.empty()) report.counterexample = what;
    flag = false;
  };

  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : x) v = uniform01(rng);
    const double fx = spec.evaluate(x);

    y = x;
    for (std::size_t i = k; i > 1; --i) std::swap(y[i - 1], y[uniform_index(rng, i)]);
    if (std::abs(spec.evaluate(y) - fx) > kRegularityTol) {
      fail(report.symmetric, "not symmetric: F" + describe(x) + " != F" + describe(y));
    }

    const std::size_t i = uniform_index(rng, k);
    y = x;
    y[i] = uniform(rng, x[i], 1.0);
    if (spec.evaluate(y) < fx - kRegularityTol) {
      fail(report.monotone, "not monotone: F" + describe(y) + " < F" + describe(x));
    }

    for (std::size_t j = 0; j < k; ++j) {
      y = x;
      y[j] = 1.0;
      const double at_one = spec.evaluate(y);
      y[j] = 0.0;
      const double at_zero = spec.evaluate(y);
      const double affine = x[j] * at_one + (1.0 - x[j]) * at_zero;
      if (std::abs(affine - fx) > kRegularityTol) {
        fail(report.decomposable, "not decomposable in argument " + std::to_string(j) +
                                      " at " + describe(x));
        break;
      }
    }
  }
  return report;
}

}  // namespace osa
