#include "gfd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gfd/benchmark_models.hpp"
#include "gfd/format.hpp"

namespace gfd {

namespace {

const std::set<std::string> kSections = {"model",       "growth", "division",  "kernel",
                                         "environment", "solver", "simulation"};

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Document = std::map<std::string, std::map<std::string, Entry>>;

Document tokenize(std::string_view text, const std::string& source) {
  Document doc;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError(source + ":" + std::to_string(line_no) + ": key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    auto& slot = doc[section];
    if (slot.count(key))
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key " + section + "." + key);
    slot[key] = Entry{value, line_no, false};
  }
  return doc;
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(where + ": not a number: '" + t + "'");
  return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(where + ": not a non-negative integer: '" + t + "'");
  return value;
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number(item, where));
  }
  return out;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(where + ": not a boolean: '" + t + "'");
}

class Reader {
 public:
  Reader(Document& doc, std::string source, std::vector<std::string>& log)
      : doc_(doc), source_(std::move(source)), log_(log) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    auto sit = doc_.find(section);
    if (sit == doc_.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    kit->second.used = true;
    return kit->second.value;
  }

  std::string where(const std::string& section, const std::string& key) const {
    return source_ + ": " + section + "." + key;
  }

  double number(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (!v) throw ConfigError(source_ + ": missing required key " + section + "." + key);
    const double x = parse_number(*v, where(section, key));
    echo(section, key, format_double(x), false);
    return x;
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    auto v = raw(section, key);
    const double x = v ? parse_number(*v, where(section, key)) : fallback;
    echo(section, key, format_double(x), !v);
    return x;
  }

  std::uint64_t integer(const std::string& section, const std::string& key, std::uint64_t fallback) {
    auto v = raw(section, key);
    const std::uint64_t x = v ? parse_unsigned(*v, where(section, key)) : fallback;
    echo(section, key, std::to_string(x), !v);
    return x;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    auto v = raw(section, key);
    const bool x = v ? parse_bool(*v, where(section, key)) : fallback;
    echo(section, key, x ? "true" : "false", !v);
    return x;
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) {
    auto v = raw(section, key);
    const std::string x = v ? trim(*v) : fallback;
    echo(section, key, x, !v);
    return x;
  }

  std::vector<double> list(const std::string& section, const std::string& key,
                           const std::vector<double>& fallback) {
    auto v = raw(section, key);
    std::vector<double> x = v ? parse_list(*v, where(section, key)) : fallback;
    echo(section, key, format_list(x), !v);
    return x;
  }

  void reject_unused() const {
    for (const auto& [section, keys] : doc_)
      for (const auto& [key, entry] : keys)
        if (!entry.used)
          throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key " + section + "." + key);
  }

 private:
  void echo(const std::string& section, const std::string& key, const std::string& value, bool defaulted) {
    log_.push_back(section + "." + key + " = " + value + (defaulted ? " (default)" : ""));
  }

  Document& doc_;
  std::string source_;
  std::vector<std::string>& log_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace

LoadedConfig parse_config(std::string_view text, std::string source) {
  Document doc = tokenize(text, source);
  LoadedConfig out;
  Reader r(doc, source, out.log);
  RunConfig& cfg = out.config;
  cfg.source = source;

  // [model]
  const double M = r.number("model", "max_mass");
  require(M > 0.0 && std::isfinite(M), source + ": model.max_mass must be positive");
  const double D = r.number("model", "death_rate");
  require(D >= 0.0 && std::isfinite(D), source + ": model.death_rate must be >= 0");
  cfg.x0 = r.number("model", "x0", M / 2.0);
  require(cfg.x0 > 0.0 && cfg.x0 < M, source + ": model.x0 must lie in (0,M)");

  // [growth]
  GrowthModel::Params gp;
  gp.max_mass = M;
  const std::string gfam = r.text("growth", "family", "logistic_monod");
  const auto gtag = growth_family_from_string(gfam);
  require(gtag.has_value(), source + ": unknown growth family '" + gfam + "'");
  gp.family = *gtag;
  if (gp.family == GrowthFamily::logistic_monod) {
    gp.mu_max = r.number("growth", "mu_max", 1.0);
    gp.half_saturation = r.number("growth", "half_saturation", 0.0);
    require(gp.mu_max > 0.0, source + ": growth.mu_max must be positive");
    require(gp.half_saturation >= 0.0, source + ": growth.half_saturation must be >= 0");
  } else {
    gp.mu_s = r.list("growth", "mu_s", {});
    gp.mu_values = r.list("growth", "mu_values", {});
    gp.shape_x = r.list("growth", "shape_x", {});
    gp.shape_values = r.list("growth", "shape_values", {});
    require(gp.mu_s.size() >= 2 && gp.mu_s.size() == gp.mu_values.size() && strictly_increasing(gp.mu_s),
            source + ": growth.mu_s/mu_values must be matching increasing tables");
    require(gp.shape_x.size() >= 3 && gp.shape_x.size() == gp.shape_values.size() &&
                strictly_increasing(gp.shape_x),
            source + ": growth.shape_x/shape_values must be matching increasing tables");
    require(gp.shape_x.front() == 0.0 && gp.shape_x.back() == M,
            source + ": growth.shape_x must span [0,M]");
  }

  // [division]
  DivisionRateModel::Params dp;
  dp.max_mass = M;
  const std::string dfam = r.text("division", "family", "constant");
  const auto dtag = division_family_from_string(dfam);
  require(dtag.has_value(), source + ": unknown division family '" + dfam + "'");
  dp.family = *dtag;
  dp.b_max = r.number("division", "b_max");
  require(dp.b_max >= 0.0 && std::isfinite(dp.b_max), source + ": division.b_max must be >= 0");
  dp.m_div = r.number("division", "m_div", 0.0);
  require(dp.m_div >= 0.0 && dp.m_div < M, "m_div must lie in [0,M)");
  dp.gamma = r.number("division", "gamma", 1.0);
  require(dp.gamma > 0.0, source + ": division.gamma must be positive");
  dp.s_half = r.number("division", "s_half", 0.0);
  require(dp.s_half >= 0.0, source + ": division.s_half must be >= 0");
  auto b_bar_raw = r.raw("division", "b_bar");

  // [kernel]
  DivisionKernel::Params kp;
  kp.max_mass = M;
  const std::string kfam = r.text("kernel", "family", "uniform");
  const auto ktag = kernel_family_from_string(kfam);
  require(ktag.has_value(), source + ": unknown kernel family '" + kfam + "'");
  kp.family = *ktag;
  if (kp.family == KernelFamily::uniform || kp.family == KernelFamily::beta_ramp) {
    kp.l0 = r.number("kernel", "l", 0.25);
    kp.l1 = r.number("kernel", "l_slope", 0.0);
    const double l_end = kp.l0 + kp.l1;
    require(kp.l0 >= 0.0 && kp.l0 < 0.5 && l_end >= 0.0 && l_end < 0.5,
            source + ": kernel cut-off l(x) must stay in [0,1/2) on [0,M]");
  }
  if (kp.family == KernelFamily::beta_ramp) {
    kp.beta0 = r.number("kernel", "beta", 0.0);
    kp.beta1 = r.number("kernel", "beta_slope", 0.0);
    require(kp.beta0 >= 0.0 && kp.beta0 + kp.beta1 >= 0.0,
            source + ": kernel exponent beta(x) must stay >= 0 on [0,M]");
  }

  // [environment]
  cfg.env.resource = r.list("environment", "S", {1.0});
  cfg.env.death = r.list("environment", "D", {D});
  require(!cfg.env.resource.empty() && strictly_increasing(cfg.env.resource),
          source + ": environment.S must be a non-empty strictly increasing list");
  require(!cfg.env.death.empty() && strictly_increasing(cfg.env.death),
          source + ": environment.D must be a non-empty strictly increasing list");
  for (double s : cfg.env.resource) require(s > 0.0, source + ": environment.S values must be positive");
  for (double d : cfg.env.death) require(d >= 0.0, source + ": environment.D values must be >= 0");

  // [solver]
  auto& sv = cfg.solver;
  sv.grid = r.integer("solver", "grid", sv.grid);
  sv.tol = r.number("solver", "tol", sv.tol);
  sv.max_generations = r.integer("solver", "max_generations", sv.max_generations);
  sv.from_above = r.boolean("solver", "from_above", sv.from_above);
  sv.from_above_offset = r.number("solver", "from_above_offset", sv.from_above_offset);
  sv.eigen_tol = r.number("solver", "eigen_tol", sv.eigen_tol);
  sv.eigen_max_iterations = r.integer("solver", "eigen_max_iterations", sv.eigen_max_iterations);
  sv.probe = r.integer("solver", "probe", sv.probe);
  sv.epsilon_lambda = r.number("solver", "epsilon_lambda", sv.epsilon_lambda);
  sv.epsilon_p = r.number("solver", "epsilon_p", sv.epsilon_p);
  sv.monotone_slack = r.number("solver", "monotone_slack", sv.monotone_slack);
  require(sv.grid >= 16, source + ": solver.grid must be >= 16");
  require(sv.tol > 0.0 && sv.eigen_tol > 0.0, source + ": solver tolerances must be positive");
  require(sv.max_generations >= 1, source + ": solver.max_generations must be >= 1");
  require(sv.probe >= 16, source + ": solver.probe must be >= 16");
  require(sv.from_above_offset > 0.0 && sv.from_above_offset < 1.0,
          source + ": solver.from_above_offset must lie in (0,1)");

  // [simulation]
  auto& sm = cfg.sim;
  sm.trials = r.integer("simulation", "trials", sm.trials);
  sm.seed = r.integer("simulation", "seed", sm.seed);
  sm.gen_limit = r.integer("simulation", "gen_limit", sm.gen_limit);
  sm.pop_cap = r.integer("simulation", "pop_cap", sm.pop_cap);
  sm.time_horizon = r.number("simulation", "time_horizon", sm.time_horizon);
  sm.threads = r.integer("simulation", "threads", sm.threads);
  sm.checkpoints = r.list("simulation", "checkpoints", sm.checkpoints);
  require(sm.trials >= 1, source + ": simulation.trials must be >= 1");
  require(sm.gen_limit >= 1 && sm.pop_cap >= 1, source + ": simulation limits must be >= 1");
  require(sm.time_horizon > 0.0, source + ": simulation.time_horizon must be positive");
  require(sm.threads >= 1, source + ": simulation.threads must be >= 1");
  for (double t : sm.checkpoints) require(t >= 0.0, source + ": checkpoints must be >= 0");

  r.reject_unused();

  ModelDefinition& model = cfg.model;
  model.max_mass = M;
  model.death_rate = D;
  model.growth = GrowthModel(gp);
  model.division = DivisionRateModel(dp);
  model.kernel = DivisionKernel(kp);
  if (b_bar_raw) {
    model.division_bound = parse_number(*b_bar_raw, r.where("division", "b_bar"));
    out.log.push_back("division.b_bar = " + format_double(model.division_bound));
  } else {
    model.division_bound = certified_division_bound(model.division, cfg.env.resource, M);
    out.log.push_back("division.b_bar = " + format_double(model.division_bound) + " (default)");
  }
  require(model.division_bound >= 0.0, source + ": division.b_bar must be >= 0");
  return out;
}

LoadedConfig load_config(const std::string& path) {
  constexpr std::string_view prefix = "builtin:";
  if (path.rfind(prefix, 0) == 0) {
    const std::string name = path.substr(prefix.size());
    const auto named = find_builtin(name);
    if (!named) throw ConfigError("unknown builtin model '" + name + "'");
    return parse_config(write_config(named->config), path);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string write_config(const RunConfig& cfg) {
  std::ostringstream o;
  const auto& m = cfg.model;
  const auto f = [](double v) { return format_double(v); };
  o << "[model]\n";
  o << "max_mass = " << f(m.max_mass) << "\n";
  o << "death_rate = " << f(m.death_rate) << "\n";
  o << "x0 = " << f(cfg.x0) << "\n\n";

  const auto& g = m.growth.params();
  o << "[growth]\nfamily = " << to_string(g.family) << "\n";
  if (g.family == GrowthFamily::logistic_monod) {
    o << "mu_max = " << f(g.mu_max) << "\n";
    o << "half_saturation = " << f(g.half_saturation) << "\n\n";
  } else {
    o << "mu_s = " << format_list(g.mu_s) << "\n";
    o << "mu_values = " << format_list(g.mu_values) << "\n";
    o << "shape_x = " << format_list(g.shape_x) << "\n";
    o << "shape_values = " << format_list(g.shape_values) << "\n\n";
  }

  const auto& d = m.division.params();
  o << "[division]\nfamily = " << to_string(d.family) << "\n";
  o << "b_max = " << f(d.b_max) << "\n";
  o << "m_div = " << f(d.m_div) << "\n";
  o << "gamma = " << f(d.gamma) << "\n";
  o << "s_half = " << f(d.s_half) << "\n";
  o << "b_bar = " << f(m.division_bound) << "\n\n";

  const auto& k = m.kernel.params();
  o << "[kernel]\nfamily = " << to_string(k.family) << "\n";
  if (k.family == KernelFamily::uniform || k.family == KernelFamily::beta_ramp) {
    o << "l = " << f(k.l0) << "\n";
    o << "l_slope = " << f(k.l1) << "\n";
  }
  if (k.family == KernelFamily::beta_ramp) {
    o << "beta = " << f(k.beta0) << "\n";
    o << "beta_slope = " << f(k.beta1) << "\n";
  }
  o << "\n";

  o << "[environment]\n";
  o << "S = " << format_list(cfg.env.resource) << "\n";
  o << "D = " << format_list(cfg.env.death) << "\n\n";

  const auto& s = cfg.solver;
  o << "[solver]\n";
  o << "grid = " << s.grid << "\n";
  o << "tol = " << f(s.tol) << "\n";
  o << "max_generations = " << s.max_generations << "\n";
  o << "from_above = " << (s.from_above ? "true" : "false") << "\n";
  o << "from_above_offset = " << f(s.from_above_offset) << "\n";
  o << "eigen_tol = " << f(s.eigen_tol) << "\n";
  o << "eigen_max_iterations = " << s.eigen_max_iterations << "\n";
  o << "probe = " << s.probe << "\n";
  o << "epsilon_lambda = " << f(s.epsilon_lambda) << "\n";
  o << "epsilon_p = " << f(s.epsilon_p) << "\n";
  o << "monotone_slack = " << f(s.monotone_slack) << "\n\n";

  const auto& sm = cfg.sim;
  o << "[simulation]\n";
  o << "trials = " << sm.trials << "\n";
  o << "seed = " << sm.seed << "\n";
  o << "gen_limit = " << sm.gen_limit << "\n";
  o << "pop_cap = " << sm.pop_cap << "\n";
  o << "time_horizon = " << f(sm.time_horizon) << "\n";
  o << "threads = " << sm.threads << "\n";
  o << "checkpoints = " << format_list(sm.checkpoints) << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& config) {
  // worker count never changes results
  RunConfig canonical = config;
  canonical.sim.threads = 1;
  canonical.source.clear();
  return hex64(fnv1a64(write_config(canonical)));
}

}  // namespace gfd
