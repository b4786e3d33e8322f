#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gfd/hazard_clock.hpp"
#include "gfd/model.hpp"
#include "gfd/random.hpp"

namespace gfd {

struct SimulationLimits {
  std::size_t gen_limit = 200;
  std::size_t pop_cap = 10000;
  double time_horizon = std::numeric_limits<double>::infinity();
};

enum class EventKind : std::uint8_t { death = 0, division = 1, immortal = 2 };

struct EventDraw {
  EventKind kind = EventKind::death;
  double elapsed = 0.0;  // time since the individual's birth
  double mass = 0.0;     // mass at the event
  double alpha = 0.0;    // fraction kept by the first daughter
};

enum class Outcome { extinct, censored_generations, censored_population, censored_time, immortal };

std::string to_string(Outcome outcome);

struct SimulationOutcome {
  Outcome kind = Outcome::extinct;
  std::size_t generation = 0;  // highest generation reached
  double time = 0.0;           // extinction time, or time when censored
  std::size_t final_population = 0;
  std::size_t deaths = 0;
  std::size_t divisions = 0;

  bool survived() const { return kind != Outcome::extinct; }
};

/// One binary event-log record, written little-endian and packed (25 bytes):
/// time f64, parent id u64, tag u8, alpha f64.
struct EventRecord {
  double time = 0.0;
  std::uint64_t parent = 0;
  EventKind tag = EventKind::death;
  double alpha = 0.0;
};

void write_event_record(std::ostream& out, const EventRecord& record);
inline constexpr std::size_t kEventRecordBytes = 25;

/// Event-driven simulation of the branching process in a fixed environment.
/// Each individual draws from its own random stream, keyed by
/// (seed, trial, individual id), with ids handed out in birth order.
class BranchingSimulator {
 public:
  BranchingSimulator(const ModelDefinition& model, double S, double D);

  /// Exact clock inversion followed by a death-or-division draw at the
  /// realized mass.
  EventDraw next_event(double x, RandomStream& rng) const;

  /// One trial. Without a finite time horizon the tree is explored
  /// depth-first (memory grows with depth); with one, events are processed
  /// in time order. `log`, when given, receives one record per event.
  SimulationOutcome simulate(double x0, const SimulationLimits& limits, std::uint64_t seed, std::uint64_t trial,
                             std::ostream* log = nullptr) const;

  /// Time-ordered run up to the last checkpoint returning, for each
  /// checkpoint t, the sum of weight(X_i(t)) over the individuals alive at t.
  /// `capped` is set when the population cap stopped the run early.
  std::vector<double> population_sums(double x0, const std::vector<double>& checkpoints,
                                      const std::vector<double>& weight_nodes, double max_mass,
                                      std::size_t pop_cap, std::uint64_t seed, std::uint64_t trial,
                                      bool& capped) const;

  const HazardClock& clock() const { return clock_; }
  const ModelDefinition& model() const { return model_; }
  double resource() const { return S_; }
  double death_rate() const { return D_; }

 private:
  SimulationOutcome depth_first(double x0, const SimulationLimits& limits, std::uint64_t seed, std::uint64_t trial,
                                std::ostream* log) const;
  SimulationOutcome time_ordered(double x0, const SimulationLimits& limits, std::uint64_t seed,
                                 std::uint64_t trial, std::ostream* log) const;

  ModelDefinition model_;
  double S_;
  double D_;
  HazardClock clock_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

struct SurvivalEstimate {
  double estimate = 0.0;
  Interval ci;
  std::size_t trials = 0;
  std::size_t survived = 0;
  std::size_t censored_generations = 0;
  std::size_t censored_population = 0;
  std::size_t censored_time = 0;
  std::size_t immortal = 0;
  std::uint64_t seed = 0;
  SimulationLimits limits;

  double half_width() const { return 0.5 * (ci.hi - ci.lo); }
  /// Human-readable echo of the censoring rule.
  std::string policy() const;
};

/// Runs `trials` independent simulations on `threads` workers. The result
/// does not depend on the number of workers. Throws std::invalid_argument
/// for fewer than 100 trials.
SurvivalEstimate estimate_survival(const BranchingSimulator& sim, double x0, std::size_t trials,
                                   const SimulationLimits& limits, std::uint64_t seed, std::size_t threads);

struct MartingaleCheckpoint {
  double time = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

struct MartingaleReport {
  double expected = 0.0;  // weight at x0
  double lambda = 0.0;
  std::size_t trials = 0;
  std::size_t capped = 0;
  std::vector<MartingaleCheckpoint> checkpoints;

  double max_abs_z() const;
};

/// Monte Carlo mean of e^{-lambda t} sum_i v(X_i(t)) at each checkpoint,
/// compared with v(x0). `v_nodes` holds v on the cell-centred grid of
/// `max_mass`, evaluated by linear interpolation.
MartingaleReport martingale_check(const BranchingSimulator& sim, double x0, double lambda,
                                  const std::vector<double>& v_nodes, const std::vector<double>& checkpoints,
                                  std::size_t trials, std::size_t pop_cap, std::uint64_t seed, std::size_t threads);

/// Calls body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace gfd
