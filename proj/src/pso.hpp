#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rng.hpp"

namespace psum::pso {

using BitVector = std::vector<std::uint8_t>;

inline constexpr double kUnevaluated = -std::numeric_limits<double>::infinity();

struct Range {
  double lower = 0.0;
  double upper = 0.0;

  // clamp radius: values are kept in [-radius, radius]
  double radius() const { return (upper - lower) / 2.0; }
};

struct InertiaSchedule {
  double start = 1.0;
  double end = 1.0;
};

struct SwarmConfig {
  std::size_t dimensions = 16;
  std::size_t pop_size = 10;
  std::size_t max_ite = 100;
  double phi1 = 1.0, phi2 = 1.0, phi3 = 1.0, phi4 = 1.0;
  std::vector<Range> limit1, limit2, limit3, limit4;  // one entry per dimension
  InertiaSchedule w_bin{0.2, 1.0};
  InertiaSchedule w_real{1.0, 0.4};
  std::uint64_t seed = 0;
  double stall_fraction = 0.2;  // 0 disables the stall test
  double stall_epsilon = 1e-6;

  // limit1 = [0,1], limit2 = [0,6], limit3 = [0,0.5], limit4 = [0,6] on every dimension
  static SwarmConfig defaults(std::size_t dimensions);
  static std::vector<Range> uniform_limits(std::size_t dimensions, Range range);

  // throws Error(InvalidArgument) on inconsistent settings
  void validate() const;
};

struct Particle {
  BitVector bin, best_bin;
  std::vector<double> real, best_real;
  std::vector<double> v1, v2, v3;
  double fit = kUnevaluated;
  double fit_best = kUnevaluated;
  BitVector fit_mask;       // winning combination of the last evaluation
  BitVector best_fit_mask;  // winning combination at the personal best

  bool operator==(const Particle&) const = default;
};

struct GlobalBest {
  std::size_t index = 0;
  BitVector bin;
  std::vector<double> real;
  BitVector fit_mask;
  double fitness = kUnevaluated;
};

struct SwarmState {
  std::vector<Particle> particles;
  GlobalBest best;
  std::size_t ite = 0;  // completed iterations
  double w_bin = 0.0;
  double w_real = 0.0;
  std::vector<double> best_history;  // global best after each completed iteration
};

struct Evaluation {
  double fitness = kUnevaluated;
  BitVector mask;
};

struct IterationStats {
  std::size_t ite = 0;
  double best_fit = 0.0;
  double mean_fit = 0.0;
  double w_bin = 0.0;
  double w_real = 0.0;
};

struct SwarmResult {
  GlobalBest best;
  std::size_t iterations = 0;
  std::vector<IterationStats> trace;
};

SwarmState init_swarm(const SwarmConfig& config, Rng& rng);

// Linear schedule from start (ite = 0) to end (ite = max_ite - 1).
double inertia(std::size_t ite, std::size_t max_ite, double start, double end);

double sigmoid(double x);

// V1 <- clamp(w V1 + phi1 r1 (2 BestBinInd - 1) + phi2 r2 (2 TheBestBinInd - 1)); V2 <- clamp(V2 + V1).
// Never reads the particle's current BinInd.
void update_binary_velocity(Particle& p, const BitVector& global_best_bin, double w_bin, const SwarmConfig& config,
                            std::span<const double> r1, std::span<const double> r2);

// BinInd_j <- draw_j < sigmoid(V2_j)
void binarize(Particle& p, std::span<const double> draws);

void update_continuous(Particle& p, std::span<const double> global_best_real, double w_real,
                       const SwarmConfig& config, std::span<const double> r3, std::span<const double> r4);

// Draws r1, r2, the binarize draw, r3, r4 for each dimension in turn, then moves the particle.
void move_particle(Particle& p, const GlobalBest& best, double w_bin, double w_real, const SwarmConfig& config,
                   Rng& rng);

// Overwrites the lowest-fit particle (lowest index on ties) with previous_best.
void apply_elitism(SwarmState& state, const Particle& previous_best);

// Refreshes state.best from the particles' personal bests; never lowers it.
void update_global_best(SwarmState& state);

bool should_stop(const SwarmState& state, const SwarmConfig& config);

using Evaluator = std::function<Evaluation(const Particle&)>;
using ParticleHook = std::function<void(Particle&)>;

// Runs the hybrid binary/continuous swarm. after_evaluate runs right after each
// particle's fitness is set and before personal bests are updated.
SwarmResult run_swarm(const SwarmConfig& config, const Evaluator& evaluate, const ParticleHook& after_evaluate = {});

}  // namespace psum::pso
