#include "rcs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "rcs/detail/overloaded.hpp"
#include "rcs/error.hpp"

namespace rcs {

using detail::overloaded;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!entries.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return KeyValueConfig(std::move(entries));
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

const std::string* KeyValueConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  read_.insert(key);
  return &it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  if (const auto* v = find(key)) return *v;
  throw ConfigError("missing required key '" + key + "'");
}

double KeyValueConfig::get_double(const std::string& key) const {
  return to_double(key, get_string(key));
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key) const {
  const auto text = get_string(key);
  // Accept scientific notation for counts such as 1e5.
  const double v = to_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const auto v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  const auto text = get_string(key);
  std::vector<double> out;
  if (text.rfind("linspace(", 0) == 0 && text.back() == ')') {
    const auto args = split(text.substr(9, text.size() - 10), ',');
    if (args.size() != 3) throw ConfigError(key + ": linspace needs (start, stop, count)");
    const double a = to_double(key, args[0]);
    const double b = to_double(key, args[1]);
    const double n = to_double(key, args[2]);
    if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError(key + ": bad linspace count");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(count == 1 ? a : a + (b - a) * double(i) / double(count - 1));
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}
bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> KeyValueConfig::unread(const std::string& ignore_prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (read_.count(k)) continue;
    if (!ignore_prefix.empty() && k.rfind(ignore_prefix, 0) == 0) continue;
    out.push_back(k);
  }
  return out;
}

namespace {

InterarrivalLaw parse_law(const KeyValueConfig& cfg, const std::string& prefix) {
  const auto kind = cfg.get_string(prefix + ".kind");
  try {
    if (kind == "exponential") return InterarrivalLaw::exponential(cfg.get_double(prefix + ".rate"));
    if (kind == "uniform")
      return InterarrivalLaw::uniform(cfg.get_double(prefix + ".lo"), cfg.get_double(prefix + ".hi"));
    if (kind == "gamma")
      return InterarrivalLaw::gamma(cfg.get_double(prefix + ".shape"),
                                    cfg.get_double(prefix + ".scale"));
    if (kind == "mixture") {
      const auto n = cfg.get_uint(prefix + ".components");
      std::vector<double> weights;
      std::vector<InterarrivalLaw> comps;
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto p = prefix + "." + std::to_string(i);
        weights.push_back(cfg.get_double(p + ".weight"));
        comps.push_back(parse_law(cfg, p));
      }
      return InterarrivalLaw::mixture(std::move(weights), std::move(comps));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
  throw ConfigError(prefix + ".kind: unknown law '" + kind + "'");
}

SizeLaw parse_size(const KeyValueConfig& cfg, const std::string& prefix) {
  const auto kind = cfg.get_string(prefix + ".kind");
  try {
    if (kind == "constant") {
      const auto v = cfg.get_uint(prefix + ".value");
      if (v > 0xFFFFFFFFull) throw ConfigError(prefix + ".value too large");
      return SizeLaw::constant(static_cast<std::uint32_t>(v));
    }
    if (kind == "poisson") return SizeLaw::poisson(cfg.get_double(prefix + ".mean"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
  throw ConfigError(prefix + ".kind: unknown size law '" + kind + "'");
}

OffsetLaw parse_offset(const KeyValueConfig& cfg, const std::string& prefix) {
  const auto kind = cfg.get_string(prefix + ".kind");
  try {
    if (kind == "constant") return OffsetLaw::constant(cfg.get_double(prefix + ".value"));
    if (kind == "normal")
      return OffsetLaw::normal(cfg.get_double(prefix + ".mean"), cfg.get_double(prefix + ".sd"));
    if (kind == "uniform")
      return OffsetLaw::uniform(cfg.get_double(prefix + ".lo"), cfg.get_double(prefix + ".hi"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
  throw ConfigError(prefix + ".kind: unknown offset law '" + kind + "'");
}

ClusterModel parse_cluster(const KeyValueConfig& cfg, const std::string& prefix) {
  const auto kind = cfg.get_string(prefix + ".kind", "empty");
  try {
    if (kind == "empty") return ClusterModel::empty();
    if (kind == "iid")
      return cluster::Iid{parse_size(cfg, prefix + ".size"), parse_offset(cfg, prefix + ".offset")};
    if (kind == "bartlett_lewis")
      return cluster::BartlettLewis{parse_size(cfg, prefix + ".size"),
                                    parse_law(cfg, prefix + ".step")};
    if (kind == "threshold")
      return cluster::Threshold{cfg.get_double(prefix + ".threshold"),
                                cfg.get_double(prefix + ".mean_above"),
                                cfg.get_double(prefix + ".mean_below"),
                                cfg.get_double(prefix + ".offset_sd")};
  } catch (const InvalidArgument& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
  throw ConfigError(prefix + ".kind: unknown cluster kind '" + kind + "'");
}

void law_to_config(KeyValueConfig& cfg, const std::string& prefix, const InterarrivalLaw& law) {
  std::visit(overloaded{
                 [&](const law::Exponential& e) {
                   cfg.set(prefix + ".kind", "exponential");
                   cfg.set(prefix + ".rate", format_double(e.rate));
                 },
                 [&](const law::Uniform& u) {
                   cfg.set(prefix + ".kind", "uniform");
                   cfg.set(prefix + ".lo", format_double(u.lo));
                   cfg.set(prefix + ".hi", format_double(u.hi));
                 },
                 [&](const law::Gamma& g) {
                   cfg.set(prefix + ".kind", "gamma");
                   cfg.set(prefix + ".shape", format_double(g.shape));
                   cfg.set(prefix + ".scale", format_double(g.scale));
                 },
                 [&](const law::Mixture& m) {
                   cfg.set(prefix + ".kind", "mixture");
                   cfg.set(prefix + ".components", std::to_string(m.components.size()));
                   for (std::size_t i = 0; i < m.components.size(); ++i) {
                     const auto p = prefix + "." + std::to_string(i);
                     cfg.set(p + ".weight", format_double(m.weights[i]));
                     law_to_config(cfg, p, m.components[i]);
                   }
                 },
             },
             law.variant());
}

void size_to_config(KeyValueConfig& cfg, const std::string& prefix, const SizeLaw& size) {
  std::visit(overloaded{
                 [&](const size_law::Constant& c) {
                   cfg.set(prefix + ".kind", "constant");
                   cfg.set(prefix + ".value", std::to_string(c.value));
                 },
                 [&](const size_law::Poisson& p) {
                   cfg.set(prefix + ".kind", "poisson");
                   cfg.set(prefix + ".mean", format_double(p.mean));
                 },
             },
             size.variant());
}

void cluster_to_config(KeyValueConfig& cfg, const std::string& prefix, const ClusterModel& model) {
  std::visit(
      overloaded{
          [&](const cluster::Empty&) { cfg.set(prefix + ".kind", "empty"); },
          [&](const cluster::Iid& m) {
            cfg.set(prefix + ".kind", "iid");
            size_to_config(cfg, prefix + ".size", m.size);
            const auto o = prefix + ".offset";
            std::visit(overloaded{
                           [&](const offset_law::Constant& c) {
                             cfg.set(o + ".kind", "constant");
                             cfg.set(o + ".value", format_double(c.value));
                           },
                           [&](const offset_law::Normal& n) {
                             cfg.set(o + ".kind", "normal");
                             cfg.set(o + ".mean", format_double(n.mean));
                             cfg.set(o + ".sd", format_double(n.sd));
                           },
                           [&](const offset_law::Uniform& u) {
                             cfg.set(o + ".kind", "uniform");
                             cfg.set(o + ".lo", format_double(u.lo));
                             cfg.set(o + ".hi", format_double(u.hi));
                           },
                       },
                       m.offset.variant());
          },
          [&](const cluster::BartlettLewis& m) {
            cfg.set(prefix + ".kind", "bartlett_lewis");
            size_to_config(cfg, prefix + ".size", m.size);
            law_to_config(cfg, prefix + ".step", m.step);
          },
          [&](const cluster::Threshold& m) {
            cfg.set(prefix + ".kind", "threshold");
            cfg.set(prefix + ".threshold", format_double(m.threshold));
            cfg.set(prefix + ".mean_above", format_double(m.mean_above));
            cfg.set(prefix + ".mean_below", format_double(m.mean_below));
            cfg.set(prefix + ".offset_sd", format_double(m.offset_sd));
          },
      },
      model.variant());
}

std::vector<StepPiece> parse_step_pieces(const std::string& key, const std::string& text) {
  std::vector<StepPiece> out;
  for (const auto& piece : split(text, ';')) {
    if (piece.empty()) continue;
    const auto f = split(piece, ':');
    if (f.size() != 3) throw ConfigError(key + ": pieces are 'a:b:height' separated by ';'");
    out.push_back({to_double(key, f[0]), to_double(key, f[1]), to_double(key, f[2])});
  }
  return out;
}

}  // namespace

ProcessSpec parse_process_spec(const KeyValueConfig& cfg) {
  ProcessSpec spec;
  spec.interarrival = parse_law(cfg, "interarrival");
  const auto delay_kind = cfg.get_string("delay.kind", "zero");
  if (delay_kind != "zero") spec.delay = parse_law(cfg, "delay");
  spec.cluster = parse_cluster(cfg, "cluster");
  if (cfg.get_string("delay_cluster.kind", "empty") == "same")
    spec.delay_cluster = spec.cluster;
  else
    spec.delay_cluster = parse_cluster(cfg, "delay_cluster");
  spec.include_parents = cfg.get_bool("include_parents", false);
  return spec;
}

KeyValueConfig process_spec_to_config(const ProcessSpec& spec) {
  KeyValueConfig cfg;
  law_to_config(cfg, "interarrival", spec.interarrival);
  if (spec.delay)
    law_to_config(cfg, "delay", *spec.delay);
  else
    cfg.set("delay.kind", "zero");
  cluster_to_config(cfg, "cluster", spec.cluster);
  cluster_to_config(cfg, "delay_cluster", spec.delay_cluster);
  cfg.set("include_parents", spec.include_parents ? "true" : "false");
  return cfg;
}

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::WindowMean, "window_mean"},
    {ExperimentKind::Elementary, "elementary"},
    {ExperimentKind::RecurrenceCdf, "recurrence_cdf"},
    {ExperimentKind::VoidProb, "void_prob"},
    {ExperimentKind::RenewalFunction, "renewal_function"},
    {ExperimentKind::KeyRenewal, "key_renewal"},
    {ExperimentKind::Coupling, "coupling"},
    {ExperimentKind::StationarityCheck, "stationarity_check"},
    {ExperimentKind::FlipTest, "flip_test"},
};

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ConfigError("experiment.kind: unknown experiment '" + name + "'");
}

ExperimentConfig parse_experiment_config(const KeyValueConfig& cfg) {
  ExperimentConfig ec;
  ec.entries = cfg.entries();
  ec.spec = parse_process_spec(cfg);
  ec.kind = parse_experiment_kind(cfg.get_string("experiment.kind"));

  auto& p = ec.params;
  p.t = cfg.get_double("experiment.t", p.t);
  p.x = cfg.get_double("experiment.x", p.x);
  if (cfg.has("experiment.x_grid")) p.x_grid = cfg.get_list("experiment.x_grid");
  if (cfg.has("experiment.t_grid")) p.t_grid = cfg.get_list("experiment.t_grid");
  if (cfg.has("experiment.g"))
    p.g = parse_step_pieces("experiment.g", cfg.get_string("experiment.g"));
  p.epsilon = cfg.get_double("experiment.epsilon", p.epsilon);
  p.steps_cap = cfg.get_uint("experiment.steps_cap", p.steps_cap);
  p.k_checks = cfg.get_uint("experiment.k_checks", p.k_checks);
  p.min_coupled = cfg.get_double("experiment.min_coupled", p.min_coupled);
  if (cfg.has("experiment.shifts")) p.shifts = cfg.get_list("experiment.shifts");
  p.length = cfg.get_double("experiment.length", p.length);
  p.n = cfg.get_uint("experiment.n", p.n);
  p.alpha = cfg.get_double("experiment.alpha", p.alpha);
  p.level = cfg.get_double("experiment.level", p.level);
  p.band = cfg.get_double("experiment.band", p.band);
  if (cfg.has("experiment.abs_tolerance"))
    p.abs_tolerance = cfg.get_double("experiment.abs_tolerance");
  p.rel_tolerance = cfg.get_double("experiment.rel_tolerance", p.rel_tolerance);
  ec.n_rep = cfg.get_uint("experiment.reps", ec.n_rep);
  ec.seed = cfg.get_uint("experiment.seed", ec.seed);
  ec.guard.delta = cfg.get_double("guard.delta", ec.guard.delta);
  ec.guard.pilot_draws = cfg.get_uint("guard.pilot_draws", ec.guard.pilot_draws);
  ec.sampling.runaway_cap = cfg.get_uint("sampling.runaway_cap", ec.sampling.runaway_cap);

  const auto unknown = cfg.unread();
  if (!unknown.empty()) throw ConfigError("unknown key '" + unknown.front() + "'");
  if (!(p.level > 0.0 && p.level < 1.0)) throw ConfigError("experiment.level must be in (0, 1)");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ConfigError("experiment.alpha must be in (0, 1)");
  if (ec.n_rep < 2) throw ConfigError("experiment.reps must be >= 2");
  return ec;
}

}  // namespace rcs
