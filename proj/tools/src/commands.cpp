#include "osa/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "osa/cli/json_writer.hpp"
#include "osa/exact_solver.hpp"
#include "osa/sim.hpp"
#include "osa/theorem_checker.hpp"

namespace osa::cli {
namespace {

namespace fs = std::filesystem;

const char* const kVerifierOrder[] = {
    "tau_properties",          "phi_properties",
    "sensed_symmetry",     "decomposability",
    "swap_difference", "monotonicity",
    "swap_ordering",         "shift_upper_bounds",
};

Json instance_json(const Instance& inst) { return Json::parse(to_json(inst)); }

Json action_json(const Action& a) {
  Json ids = Json::array();
  for (ChannelId c : a.channels()) ids.push_back(c);
  return ids;
}

std::string base_name(const RunConfig& cfg, const char* command) {
  return cfg.output.name.empty() ? command : cfg.output.name;
}

fs::path output_file(const RunConfig& cfg, const std::string& file) {
  const fs::path dir = output_directory(cfg);
  fs::create_directories(dir);
  return dir / file;
}

template <typename Write>
fs::path save(const RunConfig& cfg, const std::string& file, Write write) {
  const fs::path path = output_file(cfg, file);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write(f);
  f.close();
  if (!f) throw std::runtime_error("error while writing " + path.string());
  return path;
}

fs::path publish(const RunConfig& cfg, const std::string& file, const Json& doc, Streams io) {
  write_json(io.out, doc);
  return save(cfg, file, [&](std::ostream& f) { write_json(f, doc); });
}

Json value_json(const ValueReport& r) {
  Json j;
  j["value"] = r.value;
  j["recursion_value"] = r.recursion_value;
  if (!r.per_slot.empty()) j["per_slot"] = r.per_slot;
  j["nodes_expanded"] = r.nodes_expanded;
  return j;
}

std::unique_ptr<Policy> make_policy(const RunConfig& cfg) {
  switch (cfg.policy.kind) {
    case PolicyKind::Myopic: return myopic_policy(cfg.instance.k());
    case PolicyKind::Random: return random_policy(cfg.instance.k(), cfg.policy.seed);
    case PolicyKind::Fixed:
      return fixed_policy(cfg.policy.channels, cfg.instance.n_channels(), cfg.instance.k());
  }
  throw std::logic_error("unknown policy kind");
}

Json counterexample_artifact(const std::string& counterexample) {
  Json found = Json::parse(counterexample);
  Json artifact;
  artifact["instance"] = found["instance"];
  found.erase("instance");
  artifact["counterexample"] = std::move(found);
  return artifact;
}

}  // namespace

int cmd_check(const RunConfig& cfg, Streams io) {
  const Instance& inst = cfg.instance;
  const ConditionReport r = check_conditions(inst, cfg.condition_domain, cfg.condition_method);
  Json doc;
  doc["instance"] = instance_json(inst);
  Json c;
  c["f_regular"] = r.f_regular;
  c["epsilon"] = inst.sensing().epsilon();
  c["epsilon_bound"] = r.epsilon_bound;
  c["epsilon_ok"] = r.epsilon_ok;
  c["delta_domain"] = std::string(to_string(r.delta_domain));
  c["delta_method"] = std::string(to_string(r.delta_method));
  c["delta_min"] = r.delta_min;
  c["delta_max"] = r.delta_max;
  c["beta"] = inst.beta();
  c["beta_bound"] = r.beta_bound;
  c["beta_ok"] = r.beta_ok;
  c["beliefs_in_band"] = r.beliefs_in_band;
  c["all_ok"] = r.all_ok;
  doc["conditions"] = std::move(c);
  publish(cfg, base_name(cfg, "check") + ".json", doc, io);
  return r.all_ok ? kExitOk : kExitConditions;
}

int cmd_solve(const RunConfig& cfg, Streams io) {
  const Instance& inst = cfg.instance;
  const OptimalReport best = optimal_value(inst, cfg.solver);
  MyopicPolicy myopic(inst.k());
  const ValueReport mine = evaluate_policy(inst, myopic);
  const double gap = best.recursion_value - mine.recursion_value;

  Json doc;
  doc["instance"] = instance_json(inst);
  doc["expansion_cost"] = expansion_cost(inst.n_channels(), inst.k(), inst.horizon());
  Json m = value_json(mine);
  m["first_action"] = action_json(myopic_action(inst.initial(), inst.k()));
  doc["myopic"] = std::move(m);
  Json o = value_json(best);
  o["first_action"] = action_json(best.first_action);
  doc["optimal"] = std::move(o);
  doc["gap"] = gap;
  doc["myopic_optimal"] = gap <= kOptimalityTol;
  publish(cfg, base_name(cfg, "solve") + ".json", doc, io);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, Streams io) {
  const Instance& inst = cfg.instance;
  const auto prototype = make_policy(cfg);
  const SimResult r = estimate_value(inst, *prototype, cfg.simulate.episodes, cfg.simulate.seed,
                                     cfg.threads);
  const std::string name = base_name(cfg, "simulate");

  Json doc;
  doc["instance"] = instance_json(inst);
  Json p;
  p["kind"] = std::string(to_string(cfg.policy.kind));
  if (cfg.policy.kind == PolicyKind::Random) p["seed"] = cfg.policy.seed;
  if (cfg.policy.kind == PolicyKind::Fixed) p["channels"] = cfg.policy.channels;
  doc["policy"] = std::move(p);
  doc["episodes"] = r.episodes;
  doc["seed"] = r.seed;
  doc["mean"] = r.mean;
  doc["std_error"] = r.std_error;
  if (cfg.simulate.trace) {
    const EpisodeTrace trace =
        simulate_episode(inst, *prototype, cfg.simulate.seed, cfg.simulate.trace_episode);
    const fs::path path = save(cfg, name + "-trace.csv",
                               [&](std::ostream& f) { write_trace_csv(f, trace); });
    doc["trace"] = {{"episode", cfg.simulate.trace_episode},
                    {"file", path.filename().string()},
                    {"discounted_return", trace.discounted_return}};
  }
  publish(cfg, name + ".json", doc, io);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, Streams io) {
  const Instance& inst = cfg.instance;
  const VerifyOptions& options = cfg.verify.options;
  const std::string name = base_name(cfg, "verify");
  if (options.trials == 0) {
    io.err << "warning: verify.trials is 0; every verifier passes vacuously\n";
  }

  const std::vector<LemmaReport> reports = verify_all(inst, options);
  bool all_passed = true;
  Json doc;
  doc["instance"] = instance_json(inst);
  doc["trials"] = options.trials;
  doc["seed"] = options.seed;
  doc["delta_domain"] = std::string(to_string(options.domain));
  doc["delta_method"] = std::string(to_string(options.delta_method));
  doc["phi_epsilon_factor"] = options.fault.phi_epsilon_factor;

  Json lemmas = Json::array();
  for (const LemmaReport& r : reports) {
    Json j;
    j["name"] = r.name;
    j["kind"] = r.identity ? "identity" : "inequality";
    j["trials"] = r.trials;
    j[r.identity ? "max_residual" : "min_margin"] = r.worst;
    j["passed"] = r.passed;
    if (!r.passed) {
      all_passed = false;
      const std::string file = name + "-" + r.name + "-failure.json";
      const fs::path path = save(cfg, file, [&](std::ostream& f) {
        write_json(f, counterexample_artifact(r.counterexample));
      });
      j["artifact"] = file;
      io.err << "violation: " << r.name << " (artifact: " << path.string() << ")\n";
    }
    lemmas.push_back(std::move(j));
  }
  doc["verifiers"] = std::move(lemmas);

  Json skipped = Json::array();
  for (const char* v : kVerifierOrder) {
    const bool ran = std::any_of(reports.begin(), reports.end(),
                                 [&](const LemmaReport& r) { return r.name == v; });
    if (!ran) skipped.push_back(v);
  }
  doc["skipped"] = std::move(skipped);

  Json theorem;
  const ConditionReport cond = check_conditions(inst, cfg.condition_domain, cfg.condition_method);
  if (!cfg.verify.theorem) {
    theorem["status"] = "disabled";
  } else if (!cond.all_ok) {
    theorem["status"] = "skipped: conditions do not hold";
  } else {
    try {
      const OptimalReport best = optimal_value(inst, cfg.solver);
      MyopicPolicy myopic(inst.k());
      const ValueReport mine = evaluate_policy(inst, myopic);
      const double gap = best.recursion_value - mine.recursion_value;
      const bool ok = gap <= kOptimalityTol;
      theorem["status"] = ok ? "passed" : "failed";
      theorem["myopic_value"] = mine.recursion_value;
      theorem["optimal_value"] = best.recursion_value;
      theorem["gap"] = gap;
      if (!ok) {
        all_passed = false;
        const std::string file = name + "-theorem-failure.json";
        Json artifact;
        artifact["instance"] = instance_json(inst);
        artifact["counterexample"] = {{"verifier", "theorem"}, {"gap", gap}};
        const fs::path path =
            save(cfg, file, [&](std::ostream& f) { write_json(f, artifact); });
        theorem["artifact"] = file;
        io.err << "violation: theorem (artifact: " << path.string() << ")\n";
      }
    } catch (const BudgetError&) {
      theorem["status"] = "skipped: over the solver budget";
    }
  }
  doc["theorem"] = std::move(theorem);
  doc["passed"] = all_passed;
  publish(cfg, name + ".json", doc, io);
  return all_passed ? kExitOk : kExitVerification;
}

int cmd_sweep(const RunConfig& cfg, Streams io) {
  const std::vector<SweepRow> rows = counterexample_sweep(cfg.sweep.grid, cfg.sweep.budget,
                                                          cfg.threads);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  io.out << csv.str();
  const fs::path path =
      save(cfg, base_name(cfg, "sweep") + ".csv", [&](std::ostream& f) { f << csv.str(); });
  std::map<std::string, std::size_t> counts;
  for (const SweepRow& r : rows) ++counts[std::string(to_string(r.cls))];
  io.err << rows.size() << " rows written to " << path.string();
  for (const auto& [cls, n] : counts) io.err << "; " << cls << ' ' << n;
  io.err << '\n';
  return kExitOk;
}

int run(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"Myopic channel access under imperfect sensing: conditions, solving, "
               "simulation, lemma verification and sweeps"};
  app.name("osa");
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> episodes;
  std::string output_dir;
  std::string output_name;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config_file,-c,--config", config_path,
                    "YAML config file (built-in defaults apply if omitted)");
    sub->add_option("-s,--set", sets, "Override a config key, e.g. instance.beta=0.5")
        ->take_all();
    sub->add_option("-j,--threads", threads, "Worker threads (0 = machine parallelism)");
    sub->add_option("-o,--output-dir", output_dir, "Output directory");
    sub->add_option("-n,--name", output_name, "Base name of the output files");
  };

  CLI::App* check = app.add_subcommand("check", "Evaluate the closed-form optimality conditions");
  CLI::App* solve = app.add_subcommand("solve", "Myopic and optimal values by exact solving");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo value of a policy");
  CLI::App* verify = app.add_subcommand("verify", "Randomized lemma verifiers");
  CLI::App* sweep = app.add_subcommand("sweep", "Classify a parameter grid");
  for (CLI::App* sub : {check, solve, simulate, verify, sweep}) add_common(sub);
  simulate->add_option("--seed", seed, "Root seed of the episodes");
  simulate->add_option("--episodes", episodes, "Number of episodes");
  verify->add_option("--seed", seed, "Seed of the verifiers");
  verify->add_option("--trials", trials, "Trials per verifier");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitParse;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  RunConfig cfg = default_config();
  try {
    std::vector<Override> overrides;
    for (const auto& s : sets) overrides.push_back(parse_override(s));
    if (threads) overrides.emplace_back("threads", std::to_string(*threads));
    if (seed) overrides.emplace_back(command + ".seed", std::to_string(*seed));
    if (trials) overrides.emplace_back("verify.trials", std::to_string(*trials));
    if (episodes) overrides.emplace_back("simulate.episodes", std::to_string(*episodes));
    if (!output_dir.empty()) overrides.emplace_back("output.dir", Json(output_dir).dump());
    if (!output_name.empty()) overrides.emplace_back("output.name", Json(output_name).dump());
    cfg = config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    io.err << e.what() << '\n';
    return kExitParse;
  }

  try {
    if (command == "check") return cmd_check(cfg, io);
    if (command == "solve") return cmd_solve(cfg, io);
    if (command == "simulate") return cmd_simulate(cfg, io);
    if (command == "verify") return cmd_verify(cfg, io);
    return cmd_sweep(cfg, io);
  } catch (const BudgetError& e) {
    io.err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitParse;
  }
}

}  // namespace osa::cli
