#include "osa/theorem_checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "osa/format.hpp"
#include "osa/parallel.hpp"
#include "osa/random.hpp"

namespace osa {
namespace {

constexpr std::size_t kRegularitySamples = 256;
constexpr std::uint64_t kRegularitySeed = 0x7265677531ULL;

using json = nlohmann::ordered_json;

/// Draws the random ingredients shared by the verifiers.
class Sampler {
 public:
  Sampler(const Instance& inst, std::uint64_t seed) : inst_(inst), rng_(seed) {}

  std::vector<double> band_beliefs() {
    std::vector<double> w(inst_.n_channels());
    for (double& x : w) x = uniform(rng_, inst_.params().p01(), inst_.params().p11());
    return w;
  }
  std::vector<double> sorted_band_beliefs() {
    auto w = band_beliefs();
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
  }
  std::size_t slots() { return 1 + index(inst_.horizon()); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_index(rng_, n)); }
  /// Two distinct indices l < m below n.
  std::pair<std::size_t, std::size_t> ordered_pair(std::size_t n) {
    std::size_t a = index(n);
    std::size_t b = index(n - 1);
    if (b >= a) ++b;
    return {std::min(a, b), std::max(a, b)};
  }
  double unit() { return uniform01(rng_); }
  double between(double lo, double hi) { return uniform(rng_, lo, hi); }

 private:
  const Instance& inst_;
  Rng rng_;
};

/// Accumulates the worst margin or residual and the first failure.
class Tracker {
 public:
  Tracker(std::string name, bool identity, const Instance& inst)
      : inst_(inst) {
    report_.name = std::move(name);
    report_.identity = identity;
    report_.worst = identity ? 0.0 : std::numeric_limits<double>::infinity();
  }

  /// margin for inequalities (>= -tol passes), residual for identities.
  void observe(double value, const std::vector<double>& beliefs, std::size_t slots,
               json detail) {
    ++report_.trials;
    const bool ok = report_.identity ? std::abs(value) <= kIdentityTol : value >= -kMarginTol;
    if (report_.identity) {
      report_.worst = std::max(report_.worst, std::abs(value));
    } else {
      report_.worst = std::min(report_.worst, value);
    }
    if (!ok && report_.passed) {
      report_.passed = false;
      json doc;
      doc["verifier"] = report_.name;
      const bool replayable = beliefs.size() == inst_.n_channels() &&
                              std::all_of(beliefs.begin(), beliefs.end(),
                                          [](double x) { return x >= 0.0 && x <= 1.0; });
      doc["instance"] = json::parse(
          to_json(replayable ? inst_.with_initial(BeliefVector(beliefs)) : inst_));
      doc["slots_remaining"] = slots;
      doc["value"] = value;
      doc["detail"] = std::move(detail);
      report_.counterexample = doc.dump();
    }
  }

  LemmaReport finish() {
    if (report_.trials == 0) report_.worst = 0.0;
    return std::move(report_);
  }

 private:
  const Instance& inst_;
  LemmaReport report_;
};

void require_lemma_hypotheses(const Instance& inst, const VerifyOptions& options,
                              const char* who) {
  if (!lemma_hypotheses_hold(check_conditions(inst, options.domain, options.delta_method))) {
    throw std::invalid_argument(std::string(who) +
                                " requires regular F, epsilon below its bound and beta "
                                "within its bound");
  }
}

double geometric_factor(double ratio, std::size_t terms) {
  if (ratio == 1.0) return static_cast<double>(terms);
  return (1.0 - std::pow(ratio, static_cast<double>(terms))) / (1.0 - ratio);
}

}  // namespace

double beta_bound_bracket(const ChannelParams& params, double epsilon) {
  const double spread = params.p11() - params.p01();
  double bracket = (1.0 - epsilon) * (1.0 - params.p01());
  if (epsilon > 0.0) bracket += epsilon * spread / (1.0 - (1.0 - epsilon) * spread);
  return bracket;
}

ConditionReport check_conditions(const Instance& inst, DeltaDomain domain, DeltaMethod method) {
  ConditionReport r;
  const double eps = inst.sensing().epsilon();
  r.f_regular = check_regularity(inst.reward(), kRegularitySamples, kRegularitySeed).passed();
  r.epsilon_bound = inst.params().epsilon_bound();
  r.epsilon_ok = eps < r.epsilon_bound;
  r.delta_domain = domain;
  r.delta_method = method;
  const DeltaBounds d = delta_bounds(inst.reward(), inst.params(), domain, method);
  r.delta_min = d.delta_min;
  r.delta_max = d.delta_max;
  const double bracket = beta_bound_bracket(inst.params(), eps);
  r.beta_bound = d.delta_max > 0.0 && bracket > 0.0 ? d.delta_min / (d.delta_max * bracket)
                                                    : std::numeric_limits<double>::infinity();
  r.beta_ok = inst.beta() <= r.beta_bound;
  r.beliefs_in_band = inst.initial().in_band(inst.params());
  r.all_ok = r.f_regular && r.epsilon_ok && r.beta_ok && r.beliefs_in_band;
  return r;
}

bool lemma_hypotheses_hold(const ConditionReport& report) {
  return report.f_regular && report.epsilon_ok && report.beta_ok;
}

LemmaReport verify_tau_properties(const Instance& inst, const VerifyOptions& options) {
  Sampler s(inst, options.seed);
  Tracker t("tau_properties", false, inst);
  const auto& params = inst.params();
  for (std::size_t i = 0; i < options.trials; ++i) {
    double a = s.unit();
    double b = s.unit();
    if (a > b) std::swap(a, b);
    const double ta = tau(a, params);
    const double tb = tau(b, params);
    const double margin = std::min({tb - ta, ta - params.p01(), params.p11() - tb});
    t.observe(margin, {}, 0, json{{"omega", a}, {"omega_prime", b}});
  }
  return t.finish();
}

LemmaReport verify_phi_properties(const Instance& inst, const VerifyOptions& options) {
  const auto& params = inst.params();
  const auto& sensing = inst.sensing();
  if (sensing.epsilon() > params.epsilon_bound()) {
    throw std::invalid_argument("phi properties need epsilon <= (1-p11)p01/(p11(1-p01))");
  }
  Sampler s(inst, options.seed);
  Tracker t("phi_properties", false, inst);
  const double fixed_points = -std::max(std::abs(phi(0.0, sensing)),
                                        std::abs(phi(1.0, sensing) - 1.0));
  for (std::size_t i = 0; i < options.trials; ++i) {
    double a = s.unit();
    double b = s.unit();
    if (a > b) std::swap(a, b);
    const double in_band = s.between(params.p01(), params.p11());
    const double margin = std::min({phi(b, sensing) - phi(a, sensing),
                                    params.p01() - phi(in_band, sensing), fixed_points});
    t.observe(margin, {}, 0, json{{"omega", a}, {"omega_prime", b}, {"omega_band", in_band}});
  }
  return t.finish();
}

LemmaReport verify_symmetry(const Instance& inst, const VerifyOptions& options) {
  Sampler s(inst, options.seed);
  Tracker t("sensed_symmetry", true, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    auto w = s.band_beliefs();
    const std::size_t slots = s.slots();
    if (inst.k() < 2) {
      t.observe(0.0, w, slots, json::object());
      continue;
    }
    const auto [a, b] = s.ordered_pair(inst.k());
    auto swapped = w;
    std::swap(swapped[a], swapped[b]);
    const double diff = auxiliary_value(inst, w, slots, options.fault) -
                        auxiliary_value(inst, swapped, slots, options.fault);
    t.observe(diff, w, slots, json{{"positions", {a, b}}});
  }
  return t.finish();
}

LemmaReport verify_decomposability(const Instance& inst, const VerifyOptions& options) {
  Sampler s(inst, options.seed);
  Tracker t("decomposability", true, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    auto w = s.band_beliefs();
    const std::size_t slots = s.slots();
    const std::size_t pos = s.index(inst.n_channels());
    const double value = auxiliary_value(inst, w, slots, options.fault);
    auto ext = w;
    ext[pos] = 1.0;
    const double at_one = auxiliary_value(inst, ext, slots, options.fault);
    ext[pos] = 0.0;
    const double at_zero = auxiliary_value(inst, ext, slots, options.fault);
    const double residual = value - (w[pos] * at_one + (1.0 - w[pos]) * at_zero);
    t.observe(residual, w, slots, json{{"position", pos}});
  }
  return t.finish();
}

LemmaReport verify_swap_difference(const Instance& inst,
                                             const VerifyOptions& options) {
  Sampler s(inst, options.seed);
  Tracker t("swap_difference", true, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    auto w = s.band_beliefs();
    const std::size_t slots = s.slots();
    const auto [l, m] = s.ordered_pair(inst.n_channels());
    auto swapped = w;
    std::swap(swapped[l], swapped[m]);
    const double lhs = auxiliary_value(inst, w, slots, options.fault) -
                       auxiliary_value(inst, swapped, slots, options.fault);
    auto hi_lo = w;
    hi_lo[l] = 1.0;
    hi_lo[m] = 0.0;
    auto lo_hi = w;
    lo_hi[l] = 0.0;
    lo_hi[m] = 1.0;
    const double rhs = (w[l] - w[m]) * (auxiliary_value(inst, hi_lo, slots, options.fault) -
                                        auxiliary_value(inst, lo_hi, slots, options.fault));
    t.observe(lhs - rhs, w, slots, json{{"positions", {l, m}}});
  }
  return t.finish();
}

LemmaReport verify_monotonicity(const Instance& inst, const VerifyOptions& options) {
  Sampler s(inst, options.seed);
  Tracker t("monotonicity", false, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    auto w = s.band_beliefs();
    const std::size_t slots = s.slots();
    const std::size_t pos = s.index(inst.n_channels());
    auto raised = w;
    raised[pos] = s.between(w[pos], inst.params().p11());
    const double margin = auxiliary_value(inst, raised, slots, options.fault) -
                          auxiliary_value(inst, w, slots, options.fault);
    t.observe(margin, w, slots, json{{"position", pos}, {"raised_to", raised[pos]}});
  }
  return t.finish();
}

LemmaReport verify_swap_lemma(const Instance& inst, const VerifyOptions& options) {
  require_lemma_hypotheses(inst, options, "swap lemma");
  Sampler s(inst, options.seed);
  Tracker t("swap_ordering", false, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    auto w = s.band_beliefs();
    const std::size_t slots = s.slots();
    const auto [l, m] = s.ordered_pair(inst.n_channels());
    if (w[l] < w[m]) std::swap(w[l], w[m]);
    auto swapped = w;
    std::swap(swapped[l], swapped[m]);
    const double margin = auxiliary_value(inst, w, slots, options.fault) -
                          auxiliary_value(inst, swapped, slots, options.fault);
    t.observe(margin, w, slots, json{{"positions", {l, m}}});
  }
  return t.finish();
}

LemmaReport verify_upper_bounds(const Instance& inst, const VerifyOptions& options) {
  require_lemma_hypotheses(inst, options, "upper-bound lemma");
  const double delta_max =
      delta_bounds(inst.reward(), inst.params(), options.domain, options.delta_method).delta_max;
  const double spread = inst.params().p11() - inst.params().p01();
  const double ratio = inst.beta() * (1.0 - inst.sensing().epsilon()) * spread;
  const std::size_t n = inst.n_channels();
  Sampler s(inst, options.seed);
  Tracker t("shift_upper_bounds", false, inst);
  for (std::size_t i = 0; i < options.trials; ++i) {
    const auto w = s.sorted_band_beliefs();
    const std::size_t slots = s.slots();
    const double base = auxiliary_value(inst, w, slots, options.fault);

    // Last element moved to the front.
    std::vector<double> rotated(n);
    rotated[0] = w[n - 1];
    std::copy(w.begin(), w.end() - 1, rotated.begin() + 1);
    const double first_gap = base - auxiliary_value(inst, rotated, slots, options.fault);
    const double first_bound = (1.0 - w[n - 1]) * delta_max;

    // First and last elements exchanged.
    auto exchanged = w;
    std::swap(exchanged.front(), exchanged.back());
    const double second_gap = base - auxiliary_value(inst, exchanged, slots, options.fault);
    const double second_bound = spread * delta_max * geometric_factor(ratio, slots);

    t.observe(std::min(first_bound - first_gap, second_bound - second_gap), w, slots,
              json{{"rotate_gap", first_gap},
                   {"rotate_bound", first_bound},
                   {"exchange_gap", second_gap},
                   {"exchange_bound", second_bound}});
  }
  return t.finish();
}

TheoremReport verify_theorem(const Instance& inst, const SolverOptions& options) {
  TheoremReport r;
  r.conditions = check_conditions(inst);
  if (!r.conditions.all_ok) {
    throw std::invalid_argument("theorem verification requires all optimality conditions");
  }
  const OptimalReport best = optimal_value(inst, options);
  MyopicPolicy myopic(inst.k());
  const ValueReport mine = evaluate_policy(inst, myopic);
  r.optimal_value = best.recursion_value;
  r.myopic_value = mine.recursion_value;
  r.gap = r.optimal_value - r.myopic_value;
  r.passed = r.gap <= kOptimalityTol;
  return r;
}

std::vector<LemmaReport> verify_all(const Instance& inst, const VerifyOptions& options) {
  std::vector<LemmaReport> out;
  const ConditionReport cond = check_conditions(inst, options.domain, options.delta_method);
  out.push_back(verify_tau_properties(inst, options));
  if (inst.sensing().epsilon() <= inst.params().epsilon_bound()) {
    out.push_back(verify_phi_properties(inst, options));
  }
  if (cond.f_regular) {
    out.push_back(verify_symmetry(inst, options));
    out.push_back(verify_decomposability(inst, options));
    out.push_back(verify_swap_difference(inst, options));
    out.push_back(verify_monotonicity(inst, options));
  }
  if (lemma_hypotheses_hold(cond)) {
    out.push_back(verify_swap_lemma(inst, options));
    out.push_back(verify_upper_bounds(inst, options));
  }
  return out;
}

std::string_view to_string(SweepClass c) {
  switch (c) {
    case SweepClass::Proven: return "PROVEN";
    case SweepClass::EmpiricalOptimal: return "EMPIRICAL-OPTIMAL";
    case SweepClass::Counterexample: return "COUNTEREXAMPLE";
    case SweepClass::TheoremViolation: return "THEOREM-VIOLATION";
    case SweepClass::BudgetExceeded: return "BUDGET-EXCEEDED";
    case SweepClass::Truncated: return "TRUNCATED";
  }
  return "UNKNOWN";
}

SweepClass classify(bool conditions_ok, double gap) {
  if (conditions_ok) {
    return gap <= kOptimalityTol ? SweepClass::Proven : SweepClass::TheoremViolation;
  }
  return gap > kCounterexampleGap ? SweepClass::Counterexample : SweepClass::EmpiricalOptimal;
}

std::vector<SweepRow> counterexample_sweep(const SweepGrid& grid, double budget,
                                           std::size_t threads) {
  std::vector<SweepRow> points;
  for (double p01 : grid.p01)
    for (double p11 : grid.p11)
      for (double eps : grid.epsilon)
        for (double beta : grid.beta)
          for (std::size_t n : grid.n_channels)
            for (std::size_t k : grid.k)
              for (std::size_t horizon : grid.horizon)
                for (RewardKind reward : grid.reward) {
                  if (!(p01 < p11) || k < 1 || k > n || !(eps >= 0.0 && eps < 1.0)) continue;
                  SweepRow row;
                  row.p01 = p01;
                  row.p11 = p11;
                  row.epsilon = eps;
                  row.beta = beta;
                  row.n_channels = n;
                  row.k = k;
                  row.horizon = horizon;
                  row.reward = reward;
                  points.push_back(row);
                }

  // Truncation is decided up front from the a-priori cost so the output does
  // not depend on scheduling.
  std::size_t evaluated = points.size();
  if (budget > 0.0) {
    double spent = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double cost = expansion_cost(points[i].n_channels, points[i].k, points[i].horizon);
      if (cost > grid.point_budget) continue;
      if (spent + cost > budget) {
        evaluated = i;
        break;
      }
      spent += cost;
    }
  }

  const auto nan = std::numeric_limits<double>::quiet_NaN();
  parallel_for(evaluated, threads, [&](std::size_t i) {
    SweepRow& row = points[i];
    const ChannelParams params(row.p01, row.p11);
    const SensingModel sensing(row.epsilon, grid.delta);
    const Instance inst = make_instance(row.n_channels, row.k, row.horizon, row.beta, params,
                                        sensing, row.reward,
                                        initial_belief(params, row.n_channels));
    const ConditionReport cond = check_conditions(inst, grid.delta_domain);
    row.eps_bound = cond.epsilon_bound;
    row.beta_bound = cond.beta_bound;
    row.conditions_ok = cond.all_ok;
    if (expansion_cost(row.n_channels, row.k, row.horizon) > grid.point_budget) {
      row.myopic_value = row.optimal_value = row.gap = nan;
      row.cls = SweepClass::BudgetExceeded;
      return;
    }
    SolverOptions solver;
    solver.expansion_budget = grid.point_budget;
    const OptimalReport best = optimal_value(inst, solver);
    MyopicPolicy myopic(row.k);
    const ValueReport mine = evaluate_policy(inst, myopic);
    row.optimal_value = best.recursion_value;
    row.myopic_value = mine.recursion_value;
    row.gap = row.optimal_value - row.myopic_value;
    row.cls = classify(row.conditions_ok, row.gap);
  });

  if (evaluated < points.size()) {
    SweepRow marker = points[evaluated];
    marker.eps_bound = marker.beta_bound = nan;
    marker.myopic_value = marker.optimal_value = marker.gap = nan;
    marker.cls = SweepClass::Truncated;
    points.resize(evaluated);
    points.push_back(marker);
  }
  return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    const bool marker = r.cls == SweepClass::Truncated;
    const bool no_values = marker || r.cls == SweepClass::BudgetExceeded;
    const auto num = [](double x) { return std::isnan(x) ? std::string() : format_double(x); };
    out << format_double(r.p01) << ',' << format_double(r.p11) << ','
        << format_double(r.epsilon) << ',' << format_double(r.beta) << ',' << r.n_channels
        << ',' << r.k << ',' << r.horizon << ',' << to_string(r.reward) << ','
        << num(r.eps_bound) << ',' << num(r.beta_bound) << ','
        << (marker ? "" : (r.conditions_ok ? "true" : "false")) << ','
        << (no_values ? "" : num(r.myopic_value)) << ','
        << (no_values ? "" : num(r.optimal_value)) << ',' << (no_values ? "" : num(r.gap))
        << ',' << to_string(r.cls) << '\n';
  }
}

}  // namespace osa
