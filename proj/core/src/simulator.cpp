#include "gfd/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <thread>

#include "gfd/format.hpp"
#include "gfd/grid.hpp"

namespace gfd {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

struct Individual {
  double mass = 0.0;
  double birth = 0.0;
  std::size_t generation = 0;
  std::uint64_t id = 0;
};

// Individual whose next event has been drawn.
struct Scheduled {
  Individual who;
  EventDraw event;
  double time = 0.0;  // absolute event time
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.who.id > b.who.id;
  }
};

void put_le(std::ostream& out, std::uint64_t bits, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(buf, bytes);
}

void log_event(std::ostream* log, double time, std::uint64_t parent, const EventDraw& ev) {
  if (log) write_event_record(*log, {time, parent, ev.kind, ev.kind == EventKind::division ? ev.alpha : 0.0});
}

}  // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::extinct: return "EXTINCT";
    case Outcome::censored_generations: return "SURVIVED_CENSORED(generation limit)";
    case Outcome::censored_population: return "SURVIVED_CENSORED(population cap)";
    case Outcome::censored_time: return "SURVIVED_CENSORED(time horizon)";
    case Outcome::immortal: return "IMMORTAL";
  }
  return "UNKNOWN";
}

void write_event_record(std::ostream& out, const EventRecord& record) {
  put_le(out, std::bit_cast<std::uint64_t>(record.time), 8);
  put_le(out, record.parent, 8);
  put_le(out, static_cast<std::uint8_t>(record.tag), 1);
  put_le(out, std::bit_cast<std::uint64_t>(record.alpha), 8);
}

BranchingSimulator::BranchingSimulator(const ModelDefinition& model, double S, double D)
    : model_(model), S_(S), D_(D), clock_(model, S, D) {}

EventDraw BranchingSimulator::next_event(double x, RandomStream& rng) const {
  EventDraw ev;
  const auto hit = clock_.next_event(x, rng.exponential());
  if (hit.immortal) {
    ev.kind = EventKind::immortal;
    ev.elapsed = std::numeric_limits<double>::infinity();
    ev.mass = model_.max_mass;
    return ev;
  }
  ev.elapsed = hit.elapsed;
  ev.mass = hit.mass;
  const double b = model_.b(S_, hit.mass);
  const double u = rng.uniform();
  const bool death = D_ > 0.0 && u * (D_ + b) < D_;
  if (death) {
    ev.kind = EventKind::death;
  } else {
    ev.kind = EventKind::division;
    ev.alpha = model_.kernel.sample(hit.mass, rng.uniform());
  }
  return ev;
}

SimulationOutcome BranchingSimulator::simulate(double x0, const SimulationLimits& limits, std::uint64_t seed,
                                               std::uint64_t trial, std::ostream* log) const {
  if (!(x0 > 0.0 && x0 < model_.max_mass)) throw std::invalid_argument("x0 must lie in (0, M)");
  if (std::isfinite(limits.time_horizon)) return time_ordered(x0, limits, seed, trial, log);
  return depth_first(x0, limits, seed, trial, log);
}

SimulationOutcome BranchingSimulator::depth_first(double x0, const SimulationLimits& limits, std::uint64_t seed,
                                                  std::uint64_t trial, std::ostream* log) const {
  SimulationOutcome out;
  std::vector<Individual> stack{{x0, 0.0, 0, 0}};
  std::uint64_t next_id = 1;
  while (!stack.empty()) {
    const Individual ind = stack.back();
    stack.pop_back();
    RandomStream rng(seed, trial, ind.id);
    const EventDraw ev = next_event(ind.mass, rng);
    const double t = ind.birth + ev.elapsed;
    log_event(log, t, ind.id, ev);
    if (ev.kind == EventKind::immortal) {
      out.kind = Outcome::immortal;
      out.final_population = stack.size() + 1;
      out.time = t;
      return out;
    }
    if (ev.kind == EventKind::death) {
      ++out.deaths;
      out.time = std::max(out.time, t);
      continue;
    }
    ++out.divisions;
    const std::size_t gen = ind.generation + 1;
    out.generation = std::max(out.generation, gen);
    const double first = ev.alpha * ev.mass;
    stack.push_back({ev.mass - first, t, gen, next_id + 1});
    stack.push_back({first, t, gen, next_id});
    next_id += 2;
    if (gen >= limits.gen_limit || stack.size() >= limits.pop_cap) {
      out.kind = gen >= limits.gen_limit ? Outcome::censored_generations : Outcome::censored_population;
      out.final_population = stack.size();
      out.time = t;
      return out;
    }
  }
  out.kind = Outcome::extinct;
  return out;
}

SimulationOutcome BranchingSimulator::time_ordered(double x0, const SimulationLimits& limits, std::uint64_t seed,
                                                   std::uint64_t trial, std::ostream* log) const {
  SimulationOutcome out;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue;
  auto schedule = [&](const Individual& who) {
    RandomStream rng(seed, trial, who.id);
    const EventDraw ev = next_event(who.mass, rng);
    queue.push({who, ev, who.birth + ev.elapsed});
  };
  schedule({x0, 0.0, 0, 0});
  std::uint64_t next_id = 1;
  while (!queue.empty()) {
    const Scheduled s = queue.top();
    if (s.time > limits.time_horizon) {
      out.kind = Outcome::censored_time;
      out.final_population = queue.size();
      out.time = limits.time_horizon;
      return out;
    }
    queue.pop();
    log_event(log, s.time, s.who.id, s.event);
    out.time = s.time;
    if (s.event.kind == EventKind::death) {
      ++out.deaths;
      continue;
    }
    // An immortal individual never rings, so it cannot get here before the
    // horizon; the division branch follows.
    ++out.divisions;
    const std::size_t gen = s.who.generation + 1;
    out.generation = std::max(out.generation, gen);
    const double first = s.event.alpha * s.event.mass;
    schedule({first, s.time, gen, next_id});
    schedule({s.event.mass - first, s.time, gen, next_id + 1});
    next_id += 2;
    if (gen >= limits.gen_limit || queue.size() >= limits.pop_cap) {
      out.kind = gen >= limits.gen_limit ? Outcome::censored_generations : Outcome::censored_population;
      out.final_population = queue.size();
      return out;
    }
  }
  out.kind = Outcome::extinct;
  return out;
}

std::vector<double> BranchingSimulator::population_sums(double x0, const std::vector<double>& checkpoints,
                                                        const std::vector<double>& weight_nodes, double max_mass,
                                                        std::size_t pop_cap, std::uint64_t seed,
                                                        std::uint64_t trial, bool& capped) const {
  const MassGrid grid(max_mass, weight_nodes.size());
  const double horizon = checkpoints.empty() ? 0.0 : *std::max_element(checkpoints.begin(), checkpoints.end());
  std::vector<double> sums(checkpoints.size(), 0.0);
  capped = false;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue;
  auto add_life = [&](const Individual& who, double end) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      const double t = checkpoints[k];
      if (t >= who.birth && t < end) {
        const double mass = t == who.birth ? who.mass : clock_.advance(who.mass, t - who.birth);
        sums[k] += grid.interpolate(weight_nodes, mass);
      }
    }
  };
  auto schedule = [&](const Individual& who) {
    RandomStream rng(seed, trial, who.id);
    const EventDraw ev = next_event(who.mass, rng);
    const double end = who.birth + ev.elapsed;
    add_life(who, end);
    if (end <= horizon && ev.kind != EventKind::immortal) queue.push({who, ev, end});
  };
  schedule({x0, 0.0, 0, 0});
  std::uint64_t next_id = 1;
  while (!queue.empty()) {
    const Scheduled s = queue.top();
    queue.pop();
    if (s.event.kind == EventKind::death) continue;
    const double first = s.event.alpha * s.event.mass;
    schedule({first, s.time, s.who.generation + 1, next_id});
    schedule({s.event.mass - first, s.time, s.who.generation + 1, next_id + 1});
    next_id += 2;
    if (queue.size() >= pop_cap) {
      capped = true;
      break;
    }
  }
  return sums;
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::string SurvivalEstimate::policy() const {
  return "censored trials count as survival (generation limit " + std::to_string(limits.gen_limit) +
         ", population cap " + std::to_string(limits.pop_cap) + ", time horizon " +
         format_double(limits.time_horizon) + ")";
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SurvivalEstimate estimate_survival(const BranchingSimulator& sim, double x0, std::size_t trials,
                                   const SimulationLimits& limits, std::uint64_t seed, std::size_t threads) {
  if (trials < 100) throw std::invalid_argument("estimate_survival needs at least 100 trials");
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, threads, [&](std::size_t i) { outcomes[i] = sim.simulate(x0, limits, seed, i).kind; });
  SurvivalEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.limits = limits;
  for (Outcome o : outcomes) {
    if (o == Outcome::extinct) continue;
    ++est.survived;
    if (o == Outcome::censored_generations) ++est.censored_generations;
    if (o == Outcome::censored_population) ++est.censored_population;
    if (o == Outcome::censored_time) ++est.censored_time;
    if (o == Outcome::immortal) ++est.immortal;
  }
  est.estimate = static_cast<double>(est.survived) / static_cast<double>(trials);
  est.ci = wilson_interval(est.survived, trials);
  return est;
}

double MartingaleReport::max_abs_z() const {
  double worst = 0.0;
  for (const auto& c : checkpoints) worst = std::max(worst, std::abs(c.z));
  return worst;
}

MartingaleReport martingale_check(const BranchingSimulator& sim, double x0, double lambda,
                                  const std::vector<double>& v_nodes, const std::vector<double>& checkpoints,
                                  std::size_t trials, std::size_t pop_cap, std::uint64_t seed, std::size_t threads) {
  const double M = sim.model().max_mass;
  const MassGrid grid(M, v_nodes.size());
  MartingaleReport report;
  report.expected = grid.interpolate(v_nodes, x0);
  report.lambda = lambda;
  report.trials = trials;
  std::vector<std::vector<double>> sums(trials);
  std::vector<char> capped(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    bool cap = false;
    sums[i] = sim.population_sums(x0, checkpoints, v_nodes, M, pop_cap, seed, i, cap);
    capped[i] = cap ? 1 : 0;
  });
  for (char c : capped) report.capped += static_cast<std::size_t>(c);
  const double n = static_cast<double>(trials);
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double scale = std::exp(-lambda * checkpoints[k]);
    double mean = 0.0;
    for (const auto& s : sums) mean += scale * s[k];
    mean /= n;
    double var = 0.0;
    for (const auto& s : sums) var += (scale * s[k] - mean) * (scale * s[k] - mean);
    var /= std::max(1.0, n - 1.0);
    MartingaleCheckpoint cp;
    cp.time = checkpoints[k];
    cp.mean = mean;
    cp.std_error = std::sqrt(var / n);
    const double diff = mean - report.expected;
    // differences at rounding level count as exact agreement
    if (std::abs(diff) <= 1e-12 * (1.0 + std::abs(report.expected))) cp.z = 0.0;
    else if (cp.std_error > 0.0) cp.z = diff / cp.std_error;
    else cp.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    report.checkpoints.push_back(cp);
  }
  return report;
}

}  // namespace gfd
