#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "osa/exact_solver.hpp"
#include "osa/instance.hpp"
#include "osa/reward.hpp"

namespace osa {

/// Tolerances shared by the verifiers and the sweep classifier.
inline constexpr double kOptimalityTol = 1e-9;
inline constexpr double kCounterexampleGap = 1e-6;
inline constexpr double kMarginTol = 1e-9;
inline constexpr double kIdentityTol = 1e-9;

/// Closed-form sufficient conditions for the myopic policy to be optimal.
struct ConditionReport {
  bool f_regular = false;
  double epsilon_bound = 0.0;
  bool epsilon_ok = false;
  DeltaDomain delta_domain = DeltaDomain::Band;
  DeltaMethod delta_method = DeltaMethod::ClosedForm;
  double delta_min = 0.0;
  double delta_max = 0.0;
  /// Delta_min / (Delta_max * bracket); +infinity when Delta_max = 0.
  double beta_bound = 0.0;
  bool beta_ok = false;
  bool beliefs_in_band = false;
  bool all_ok = false;
};

/// The bracketed factor of the beta condition:
/// (1-eps)(1-p01) + eps (p11-p01) / (1 - (1-eps)(p11-p01)).
double beta_bound_bracket(const ChannelParams& params, double epsilon);

/// Epsilon is compared strictly, beta non-strictly.
ConditionReport check_conditions(const Instance& inst, DeltaDomain domain = DeltaDomain::Band,
                                 DeltaMethod method = DeltaMethod::ClosedForm);

/// Outcome of one randomized verifier run. For inequalities `worst` is the
/// smallest observed margin (rhs - lhs, must stay >= -1e-9); for identities
/// it is the largest absolute residual (must stay <= 1e-9).
struct LemmaReport {
  std::string name;
  bool identity = false;
  std::size_t trials = 0;
  double worst = 0.0;
  bool passed = true;
  /// JSON document with the instance and the failing sample; empty on pass.
  std::string counterexample;
};

struct VerifyOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  /// Delta bounds used by the swap and upper-bound lemmas, both for their
  /// beta hypothesis and for the bound itself. The lemmas are stated in
  /// terms of the true extremes, which for any-success exceed the
  /// closed form.
  DeltaDomain domain = DeltaDomain::Band;
  DeltaMethod delta_method = DeltaMethod::Exact;
  Perturbation fault{};
};

// Every verifier samples beliefs uniformly from [p01, p11]^N and residual
// horizons uniformly from 1..T.

/// tau is non-decreasing and maps [0, 1] into [p01, p11].
LemmaReport verify_tau_properties(const Instance& inst, const VerifyOptions& options);
/// phi is non-decreasing, fixes 0 and 1, and maps the band below p01.
/// Requires epsilon at or below ChannelParams::epsilon_bound().
LemmaReport verify_phi_properties(const Instance& inst, const VerifyOptions& options);
/// W is unchanged by swapping two of the first k positions.
LemmaReport verify_symmetry(const Instance& inst, const VerifyOptions& options);
/// W is affine in every position.
LemmaReport verify_decomposability(const Instance& inst, const VerifyOptions& options);
/// W(..wl..wm..) - W(..wm..wl..) = (wl - wm)[W(..1..0..) - W(..0..1..)].
LemmaReport verify_swap_difference(const Instance& inst,
                                             const VerifyOptions& options);
/// W is non-decreasing in every position.
LemmaReport verify_monotonicity(const Instance& inst, const VerifyOptions& options);
/// Moving the larger of two beliefs forward never lowers W.
/// Requires check_conditions(inst) to hold apart from the initial belief.
LemmaReport verify_swap_lemma(const Instance& inst, const VerifyOptions& options);
/// Both cyclic-shift upper bounds on sorted beliefs. Same precondition.
LemmaReport verify_upper_bounds(const Instance& inst, const VerifyOptions& options);

struct TheoremReport {
  ConditionReport conditions;
  double myopic_value = 0.0;
  double optimal_value = 0.0;
  double gap = 0.0;
  bool passed = false;
};

/// Requires check_conditions(inst).all_ok; asserts optimality_gap <= 1e-9.
TheoremReport verify_theorem(const Instance& inst, const SolverOptions& options = {});

/// True when the instance satisfies the hypotheses of the swap and
/// upper-bound lemmas (regular F, epsilon and beta conditions).
bool lemma_hypotheses_hold(const ConditionReport& report);

/// Runs every verifier that applies to the instance, in a fixed order.
/// Verifiers whose hypotheses fail are omitted.
std::vector<LemmaReport> verify_all(const Instance& inst, const VerifyOptions& options);

// Parameter sweeps.

struct SweepGrid {
  std::vector<double> p01;
  std::vector<double> p11;
  std::vector<double> epsilon;
  std::vector<double> beta;
  std::vector<std::size_t> n_channels;
  std::vector<std::size_t> k;
  std::vector<std::size_t> horizon;
  std::vector<RewardKind> reward;
  DeltaDomain delta_domain = DeltaDomain::Band;
  double delta = 0.0;
  /// Per-point exact-solver expansion budget.
  double point_budget = 1e8;
};

enum class SweepClass {
  Proven,
  EmpiricalOptimal,
  Counterexample,
  TheoremViolation,
  BudgetExceeded,
  Truncated,
};

std::string_view to_string(SweepClass c);

struct SweepRow {
  double p01 = 0.0;
  double p11 = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  std::size_t n_channels = 0;
  std::size_t k = 0;
  std::size_t horizon = 0;
  RewardKind reward = RewardKind::SumThroughput;
  double eps_bound = 0.0;
  double beta_bound = 0.0;
  bool conditions_ok = false;
  /// Values are in the recursion convention (see exact_solver.hpp).
  double myopic_value = 0.0;
  double optimal_value = 0.0;
  double gap = 0.0;
  SweepClass cls = SweepClass::Proven;
};

/// Classifies gap and conditions: PROVEN when the conditions hold and the
/// gap is within 1e-9 (THEOREM-VIOLATION if it is not), COUNTEREXAMPLE when
/// they fail with a gap above 1e-6, EMPIRICAL-OPTIMAL otherwise.
SweepClass classify(bool conditions_ok, double gap);

/// Evaluates the grid with the initial belief at the stationary
/// distribution. Cells with p01 >= p11, k > N or epsilon >= 1 are skipped.
/// `budget` caps the running total of expansion_cost over the evaluated
/// points (0 = unlimited); when exceeded a TRUNCATED row ends the output.
/// Rows come out in grid order regardless of `threads`.
std::vector<SweepRow> counterexample_sweep(const SweepGrid& grid, double budget,
                                           std::size_t threads = 1);

inline constexpr const char* kSweepCsvHeader =
    "p01,p11,epsilon,beta,N,k,T,reward_kind,eps_bound,beta_bound,conditions_ok,"
    "myopic_value,optimal_value,gap,class";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace osa
