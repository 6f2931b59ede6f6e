#include "osa/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace osa::cli {
namespace {

std::string format_message(const std::string& field, std::optional<std::size_t> line,
                           const std::string& message) {
  std::string out = "config error at " + (field.empty() ? std::string("<root>") : field);
  if (line) out += " (line " + std::to_string(*line) + ")";
  return out + ": " + message;
}

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::optional<std::size_t> line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null() || mark.line < 0) return std::nullopt;
  return static_cast<std::size_t>(mark.line) + 1;
}

/// A YAML node together with its dotted path, for error messages.
class Field {
 public:
  Field(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const YAML::Node& node() const { return node_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(path_, line_of(node_), message);
  }

  bool is_map() const { return node_.IsMap(); }
  bool is_sequence() const { return node_.IsSequence(); }
  bool is_scalar() const { return node_.IsScalar(); }

  /// Rejects keys outside `allowed`; returns the present ones in file order.
  void expect_keys(std::initializer_list<const char*> allowed) const {
    if (!node_.IsMap()) fail("expected a section (key: value pairs)");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!names.count(key)) {
        throw ConfigError(join_path(path_, key), line_of(kv.first), "unknown key");
      }
    }
  }

  std::optional<Field> child(const std::string& key) const {
    const YAML::Node c = node_[key];
    if (!c.IsDefined() || c.IsNull()) return std::nullopt;
    return Field(c, join_path(path_, key));
  }

  std::vector<Field> items() const {
    if (!node_.IsSequence()) fail("expected a list");
    std::vector<Field> out;
    std::size_t i = 0;
    for (const auto& item : node_) out.emplace_back(item, path_ + "[" + std::to_string(i++) + "]");
    return out;
  }

  std::string text() const {
    if (!node_.IsScalar()) fail("expected a single value");
    return node_.Scalar();
  }

  double number() const {
    const std::string s = text();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      fail("expected a finite number, got '" + s + "'");
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    const std::string s = text();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      fail("expected a non-negative integer, got '" + s + "'");
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno == ERANGE) fail("integer out of range: '" + s + "'");
    return static_cast<std::uint64_t>(v);
  }

  std::size_t count() const { return static_cast<std::size_t>(unsigned_integer()); }

  bool boolean() const {
    const std::string s = text();
    if (s == "true" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "no" || s == "off") return false;
    fail("expected true or false, got '" + s + "'");
  }

  double probability(bool open_above = false) const {
    const double v = number();
    if (v < 0.0 || v > 1.0 || (open_above && v == 1.0)) {
      fail(open_above ? "must lie in [0, 1)" : "must lie in [0, 1]");
    }
    return v;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

template <typename T, typename Parse>
T parse_name(const Field& f, Parse parse, const char* choices) {
  const auto v = parse(f.text());
  if (!v) f.fail(std::string("expected one of ") + choices + ", got '" + f.text() + "'");
  return *v;
}

RewardKind reward_kind(const Field& f) {
  return parse_name<RewardKind>(f, parse_reward_kind, "sum-throughput, any-success");
}

DeltaDomain delta_domain(const Field& f) {
  return parse_name<DeltaDomain>(f, parse_delta_domain, "unit, band");
}

DeltaMethod delta_method(const Field& f) {
  return parse_name<DeltaMethod>(f, parse_delta_method, "closed-form, exact");
}

struct InstanceFields {
  std::size_t n_channels = 4;
  std::size_t k = 2;
  std::size_t horizon = 4;
  double beta = 0.9;
  double p01 = 0.3;
  double p11 = 0.7;
  double epsilon = 0.05;
  double delta = 0.0;
  RewardKind reward = RewardKind::SumThroughput;
  std::optional<std::vector<double>> initial;
};

Instance build_instance(const InstanceFields& f) {
  const ChannelParams params(f.p01, f.p11);
  const SensingModel sensing(f.epsilon, f.delta);
  BeliefVector initial = f.initial ? BeliefVector(*f.initial) : initial_belief(params, f.n_channels);
  return make_instance(f.n_channels, f.k, f.horizon, f.beta, params, sensing, f.reward,
                       std::move(initial));
}

Instance parse_instance(const std::optional<Field>& section) {
  InstanceFields f;
  if (!section) return build_instance(f);
  const Field& s = *section;
  s.expect_keys({"n_channels", "k", "horizon", "beta", "p01", "p11", "epsilon", "delta",
                 "reward", "initial_belief"});
  std::optional<Field> p11_field;
  std::optional<Field> k_field;
  std::optional<Field> initial_field;
  if (auto c = s.child("n_channels")) {
    f.n_channels = c->count();
    if (f.n_channels < 1) c->fail("need at least one channel");
  }
  if (auto c = s.child("k")) {
    f.k = c->count();
    k_field = c;
  }
  if (auto c = s.child("horizon")) {
    f.horizon = c->count();
    if (f.horizon < 1) c->fail("horizon must be at least one slot");
  }
  if (auto c = s.child("beta")) f.beta = c->probability();
  if (auto c = s.child("p01")) f.p01 = c->probability();
  if (auto c = s.child("p11")) {
    f.p11 = c->probability();
    p11_field = c;
  }
  if (auto c = s.child("epsilon")) f.epsilon = c->probability(true);
  if (auto c = s.child("delta")) f.delta = c->probability(true);
  if (auto c = s.child("reward")) f.reward = reward_kind(*c);
  if (auto c = s.child("initial_belief")) {
    initial_field = c;
    if (c->is_scalar()) {
      if (c->text() != "stationary") c->fail("expected 'stationary' or a list of beliefs");
    } else {
      std::vector<double> w;
      for (const Field& item : c->items()) w.push_back(item.probability());
      f.initial = std::move(w);
    }
  }

  if (!(f.p01 < f.p11)) {
    const Field& at = p11_field ? *p11_field : s;
    at.fail("need p01 < p11 (positively correlated channel)");
  }
  if (f.k < 1 || f.k > f.n_channels) {
    const Field& at = k_field ? *k_field : s;
    at.fail("need 1 <= k <= n_channels");
  }
  if (f.initial && f.initial->size() != f.n_channels) {
    initial_field->fail("expected " + std::to_string(f.n_channels) + " beliefs, got " +
                        std::to_string(f.initial->size()));
  }
  try {
    return build_instance(f);
  } catch (const std::exception& e) {
    s.fail(e.what());
  }
}

/// A grid axis: a single value, a list, or {from, to, steps} (inclusive).
std::vector<double> number_axis(const Field& f) {
  if (f.is_scalar()) return {f.number()};
  if (f.is_sequence()) {
    std::vector<double> out;
    for (const Field& item : f.items()) out.push_back(item.number());
    if (out.empty()) f.fail("axis must not be empty");
    return out;
  }
  f.expect_keys({"from", "to", "steps"});
  const auto from = f.child("from");
  const auto to = f.child("to");
  const auto steps = f.child("steps");
  if (!from || !to || !steps) f.fail("range axis needs from, to and steps");
  const double a = from->number();
  const double b = to->number();
  const std::size_t n = steps->count();
  if (n < 1) steps->fail("steps must be at least 1");
  if (n == 1) return {a};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<std::size_t> count_axis(const Field& f) {
  if (f.is_scalar()) return {f.count()};
  std::vector<std::size_t> out;
  for (const Field& item : f.items()) out.push_back(item.count());
  if (out.empty()) f.fail("axis must not be empty");
  return out;
}

std::vector<RewardKind> reward_axis(const Field& f) {
  if (f.is_scalar()) return {reward_kind(f)};
  std::vector<RewardKind> out;
  for (const Field& item : f.items()) out.push_back(reward_kind(item));
  if (out.empty()) f.fail("axis must not be empty");
  return out;
}

void parse_sweep(const Field& s, SweepConfig& out) {
  s.expect_keys({"p01", "p11", "epsilon", "beta", "n_channels", "k", "horizon", "reward",
                 "delta_domain", "point_budget", "budget"});
  SweepGrid& g = out.grid;
  if (auto c = s.child("p01")) g.p01 = number_axis(*c);
  if (auto c = s.child("p11")) g.p11 = number_axis(*c);
  if (auto c = s.child("epsilon")) g.epsilon = number_axis(*c);
  if (auto c = s.child("beta")) g.beta = number_axis(*c);
  if (auto c = s.child("n_channels")) g.n_channels = count_axis(*c);
  if (auto c = s.child("k")) g.k = count_axis(*c);
  if (auto c = s.child("horizon")) g.horizon = count_axis(*c);
  if (auto c = s.child("reward")) g.reward = reward_axis(*c);
  if (auto c = s.child("delta_domain")) g.delta_domain = delta_domain(*c);
  if (auto c = s.child("point_budget")) g.point_budget = c->number();
  if (auto c = s.child("budget")) out.budget = c->number();

  const auto check_unit = [&](const char* key, const std::vector<double>& axis) {
    for (double v : axis) {
      if (v < 0.0 || v > 1.0) s.child(key)->fail("values must lie in [0, 1]");
    }
  };
  check_unit("p01", g.p01);
  check_unit("p11", g.p11);
  check_unit("epsilon", g.epsilon);
  check_unit("beta", g.beta);
  for (std::size_t h : g.horizon) {
    if (h < 1) s.child("horizon")->fail("horizons must be at least 1");
  }
}

void default_sweep_axes(SweepGrid& g, const Instance& inst) {
  if (g.p01.empty()) g.p01 = {inst.params().p01()};
  if (g.p11.empty()) g.p11 = {inst.params().p11()};
  if (g.epsilon.empty()) g.epsilon = {inst.sensing().epsilon()};
  if (g.beta.empty()) g.beta = {inst.beta()};
  if (g.n_channels.empty()) g.n_channels = {inst.n_channels()};
  if (g.k.empty()) g.k = {inst.k()};
  if (g.horizon.empty()) g.horizon = {inst.horizon()};
  if (g.reward.empty()) g.reward = {inst.reward().kind()};
  g.delta = inst.sensing().delta();
}

/// Copy without source positions, so errors in override values do not
/// point at a line of the config file.
YAML::Node unmarked(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Scalar: return YAML::Node(node.Scalar());
    case YAML::NodeType::Sequence: {
      YAML::Node out(YAML::NodeType::Sequence);
      for (const auto& item : node) out.push_back(unmarked(item));
      return out;
    }
    case YAML::NodeType::Map: {
      YAML::Node out(YAML::NodeType::Map);
      for (const auto& kv : node) out[kv.first.Scalar()] = unmarked(kv.second);
      return out;
    }
    default: return YAML::Node();
  }
}

void apply_override(YAML::Node& root, const Override& ov) {
  std::vector<std::string> keys;
  std::stringstream ss(ov.first);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError(ov.first, std::nullopt, "empty key in override path");
    keys.push_back(part);
  }
  if (keys.empty()) throw ConfigError(ov.first, std::nullopt, "empty override path");
  YAML::Node value;
  try {
    value = unmarked(YAML::Load(ov.second));
  } catch (const YAML::Exception& e) {
    throw ConfigError(ov.first, std::nullopt, std::string("bad override value: ") + e.msg);
  }
  // Walk with fresh handles: assigning to a yaml-cpp node handle would
  // rebind it rather than descend.
  std::function<void(YAML::Node, std::size_t)> set = [&](YAML::Node node, std::size_t i) {
    if (!node.IsMap() && !node.IsNull() && node.IsDefined()) {
      throw ConfigError(ov.first, std::nullopt,
                        "cannot set a key below the non-section value at " + keys[i - 1]);
    }
    if (i + 1 == keys.size()) {
      node[keys[i]] = value;
      return;
    }
    YAML::Node next = node[keys[i]];
    if (!next.IsDefined() || next.IsNull()) {
      node[keys[i]] = YAML::Node(YAML::NodeType::Map);
      next = node[keys[i]];
    }
    set(next, i + 1);
  };
  set(root, 0);
}

RunConfig parse_root(YAML::Node root) {
  RunConfig cfg = default_config();
  if (!root.IsDefined() || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  const Field top(root, "");
  top.expect_keys({"instance", "conditions", "policy", "solver", "simulate", "verify", "sweep",
                   "output", "threads", "counterexample"});

  cfg.instance = parse_instance(top.child("instance"));

  if (auto s = top.child("conditions")) {
    s->expect_keys({"delta_domain", "delta_method"});
    if (auto c = s->child("delta_domain")) cfg.condition_domain = delta_domain(*c);
    if (auto c = s->child("delta_method")) cfg.condition_method = delta_method(*c);
  }

  if (auto s = top.child("policy")) {
    s->expect_keys({"kind", "seed", "channels"});
    if (auto c = s->child("kind")) {
      cfg.policy.kind = parse_name<PolicyKind>(*c, parse_policy_kind, "myopic, random, fixed");
    }
    if (auto c = s->child("seed")) cfg.policy.seed = c->unsigned_integer();
    if (auto c = s->child("channels")) {
      for (const Field& item : c->items()) {
        const std::size_t id = item.count();
        if (id >= cfg.instance.n_channels()) item.fail("channel id out of range");
        cfg.policy.channels.push_back(id);
      }
    }
    if (cfg.policy.kind == PolicyKind::Fixed) {
      try {
        fixed_policy(cfg.policy.channels, cfg.instance.n_channels(), cfg.instance.k());
      } catch (const std::exception& e) {
        const auto c = s->child("channels");
        (c ? *c : *s).fail(e.what());
      }
    }
  }

  if (auto s = top.child("solver")) {
    s->expect_keys({"expansion_budget", "memoize"});
    if (auto c = s->child("expansion_budget")) {
      cfg.solver.expansion_budget = c->number();
      if (cfg.solver.expansion_budget <= 0.0) c->fail("must be positive");
    }
    if (auto c = s->child("memoize")) cfg.solver.memoize = c->boolean();
  }

  if (auto s = top.child("simulate")) {
    s->expect_keys({"episodes", "seed", "trace", "trace_episode"});
    if (auto c = s->child("episodes")) {
      cfg.simulate.episodes = c->count();
      if (cfg.simulate.episodes < 2) c->fail("need at least two episodes");
    }
    if (auto c = s->child("seed")) cfg.simulate.seed = c->unsigned_integer();
    if (auto c = s->child("trace")) cfg.simulate.trace = c->boolean();
    if (auto c = s->child("trace_episode")) {
      cfg.simulate.trace_episode = c->count();
    }
    if (cfg.simulate.trace_episode >= cfg.simulate.episodes) {
      const auto c = s->child("trace_episode");
      (c ? *c : *s).fail("trace_episode must be below episodes");
    }
  }

  if (auto s = top.child("verify")) {
    s->expect_keys({"trials", "seed", "delta_domain", "delta_method", "mutation", "theorem"});
    VerifyOptions& o = cfg.verify.options;
    if (auto c = s->child("trials")) o.trials = c->count();
    if (auto c = s->child("seed")) o.seed = c->unsigned_integer();
    if (auto c = s->child("delta_domain")) o.domain = delta_domain(*c);
    if (auto c = s->child("delta_method")) o.delta_method = delta_method(*c);
    if (auto c = s->child("theorem")) cfg.verify.theorem = c->boolean();
    if (auto m = s->child("mutation")) {
      m->expect_keys({"phi_epsilon_factor"});
      if (auto c = m->child("phi_epsilon_factor")) {
        o.fault.phi_epsilon_factor = c->number();
        if (o.fault.phi_epsilon_factor < 0.0) c->fail("must be non-negative");
      }
    }
  }

  if (auto s = top.child("sweep")) parse_sweep(*s, cfg.sweep);
  default_sweep_axes(cfg.sweep.grid, cfg.instance);

  if (auto s = top.child("output")) {
    s->expect_keys({"dir", "name"});
    if (auto c = s->child("dir")) cfg.output.dir = c->text();
    if (auto c = s->child("name")) {
      cfg.output.name = c->text();
      if (cfg.output.name.find('/') != std::string::npos) c->fail("name must not contain '/'");
    }
  }

  if (auto c = top.child("threads")) cfg.threads = c->count();
  return cfg;
}

}  // namespace

ConfigError::ConfigError(std::string field, std::optional<std::size_t> line,
                         const std::string& message)
    : std::runtime_error(format_message(field, line, message)),
      field_(std::move(field)),
      line_(line) {}

RunConfig default_config() {
  return RunConfig(build_instance(InstanceFields{}));
}

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(text, std::nullopt, "override must look like key.path=value");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", static_cast<std::size_t>(e.mark.line) + 1, e.msg);
  }
  if (root.IsDefined() && !root.IsNull() && !root.IsMap()) {
    throw ConfigError("", line_of(root), "top level must be a set of sections");
  }
  if (!root.IsDefined() || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const Override& ov : overrides) apply_override(root, ov);
  return parse_root(root);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", std::nullopt, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::filesystem::path output_directory(const RunConfig& config) {
  if (!config.output.dir.empty()) return config.output.dir;
  if (const char* env = std::getenv("OSA_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace osa::cli
