#include "pso.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "error.hpp"

namespace psum::pso {
namespace {

double clamp_radius(double v, double radius) { return std::clamp(v, -radius, radius); }

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace

std::vector<Range> SwarmConfig::uniform_limits(std::size_t dimensions, Range range) {
  return std::vector<Range>(dimensions, range);
}

SwarmConfig SwarmConfig::defaults(std::size_t dimensions) {
  SwarmConfig c;
  c.dimensions = dimensions;
  c.limit1 = uniform_limits(dimensions, {0.0, 1.0});
  c.limit2 = uniform_limits(dimensions, {0.0, 6.0});
  c.limit3 = uniform_limits(dimensions, {0.0, 0.5});
  c.limit4 = uniform_limits(dimensions, {0.0, 6.0});
  return c;
}

void SwarmConfig::validate() const {
  require(dimensions >= 1, "swarm needs at least one dimension");
  require(pop_size >= 2, "population size must be at least 2");
  require(max_ite >= 1, "max iterations must be at least 1");
  for (const auto* limits : {&limit1, &limit2, &limit3, &limit4}) {
    require(limits->size() == dimensions, "every limit vector must have one range per dimension");
    for (const auto& r : *limits) require(r.upper >= r.lower && std::isfinite(r.lower) && std::isfinite(r.upper),
                                          "limit ranges need finite bounds with upper >= lower");
  }
  require(stall_fraction >= 0.0 && stall_fraction <= 1.0, "stall fraction must lie in [0, 1]");
  require(stall_epsilon >= 0.0, "stall epsilon must be non-negative");
}

SwarmState init_swarm(const SwarmConfig& config, Rng& rng) {
  config.validate();
  const std::size_t n = config.dimensions;
  SwarmState state;
  state.particles.resize(config.pop_size);
  for (auto& p : state.particles) {
    p.bin.assign(n, 0);
    p.best_bin.assign(n, 0);
    p.real.resize(n);
    p.v1.resize(n);
    p.v2.assign(n, 0.0);
    p.v3.resize(n);
    p.fit_mask.assign(n, 0);
    p.best_fit_mask.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const double r4 = config.limit4[j].radius();
      const double r1 = config.limit1[j].radius();
      const double r3 = config.limit3[j].radius();
      p.real[j] = rng.uniform(-r4, r4);
      p.v1[j] = rng.uniform(-r1, r1);
      p.v3[j] = rng.uniform(-r3, r3);
    }
    p.best_real = p.real;
  }
  state.best.bin.assign(n, 0);
  state.best.real.assign(n, 0.0);
  state.best.fit_mask.assign(n, 0);
  state.w_bin = config.w_bin.start;
  state.w_real = config.w_real.start;
  return state;
}

double inertia(std::size_t ite, std::size_t max_ite, double start, double end) {
  if (max_ite < 2) return start;
  return start - (start - end) * static_cast<double>(ite) / static_cast<double>(max_ite - 1);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void update_binary_velocity(Particle& p, const BitVector& global_best_bin, double w_bin, const SwarmConfig& config,
                            std::span<const double> r1, std::span<const double> r2) {
  for (std::size_t j = 0; j < config.dimensions; ++j) {
    const double own = 2.0 * p.best_bin[j] - 1.0;
    const double social = 2.0 * global_best_bin[j] - 1.0;
    const double v1 = w_bin * p.v1[j] + config.phi1 * r1[j] * own + config.phi2 * r2[j] * social;
    p.v1[j] = clamp_radius(v1, config.limit1[j].radius());
    p.v2[j] = clamp_radius(p.v2[j] + p.v1[j], config.limit2[j].radius());
  }
}

void binarize(Particle& p, std::span<const double> draws) {
  for (std::size_t j = 0; j < p.bin.size(); ++j) p.bin[j] = draws[j] < sigmoid(p.v2[j]) ? 1 : 0;
}

void update_continuous(Particle& p, std::span<const double> global_best_real, double w_real,
                       const SwarmConfig& config, std::span<const double> r3, std::span<const double> r4) {
  for (std::size_t j = 0; j < config.dimensions; ++j) {
    const double v3 = w_real * p.v3[j] + config.phi3 * r3[j] * (p.best_real[j] - p.real[j]) +
                      config.phi4 * r4[j] * (global_best_real[j] - p.real[j]);
    p.v3[j] = clamp_radius(v3, config.limit3[j].radius());
    p.real[j] = clamp_radius(p.real[j] + p.v3[j], config.limit4[j].radius());
  }
}

void move_particle(Particle& p, const GlobalBest& best, double w_bin, double w_real, const SwarmConfig& config,
                   Rng& rng) {
  const std::size_t n = config.dimensions;
  std::vector<double> r1(n), r2(n), rb(n), r3(n), r4(n);
  for (std::size_t j = 0; j < n; ++j) {
    r1[j] = rng.uniform01();
    r2[j] = rng.uniform01();
    rb[j] = rng.uniform01();
    r3[j] = rng.uniform01();
    r4[j] = rng.uniform01();
  }
  update_binary_velocity(p, best.bin, w_bin, config, r1, r2);
  binarize(p, rb);
  update_continuous(p, best.real, w_real, config, r3, r4);
}

void apply_elitism(SwarmState& state, const Particle& previous_best) {
  if (state.particles.empty()) return;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < state.particles.size(); ++i)
    if (state.particles[i].fit < state.particles[worst].fit) worst = i;
  state.particles[worst] = previous_best;
}

void update_global_best(SwarmState& state) {
  std::size_t leader = 0;
  for (std::size_t i = 1; i < state.particles.size(); ++i)
    if (state.particles[i].fit_best > state.particles[leader].fit_best) leader = i;
  const Particle& p = state.particles[leader];
  if (p.fit_best > state.best.fitness) {
    state.best.index = leader;
    state.best.bin = p.best_bin;
    state.best.real = p.best_real;
    state.best.fit_mask = p.best_fit_mask;
    state.best.fitness = p.fit_best;
  }
}

bool should_stop(const SwarmState& state, const SwarmConfig& config) {
  if (state.ite >= config.max_ite) return true;
  if (config.stall_fraction <= 0.0) return false;
  const auto window =
      static_cast<std::size_t>(std::ceil(config.stall_fraction * static_cast<double>(config.max_ite)));
  const auto& h = state.best_history;
  if (window == 0 || h.size() <= window) return false;
  return h.back() - h[h.size() - 1 - window] < config.stall_epsilon;
}

SwarmResult run_swarm(const SwarmConfig& config, const Evaluator& evaluate, const ParticleHook& after_evaluate) {
  Rng rng(config.seed);
  SwarmState state = init_swarm(config, rng);
  SwarmResult result;
  std::optional<Particle> elite;

  for (std::size_t ite = 0;; ++ite) {
    state.w_bin = inertia(ite, config.max_ite, config.w_bin.start, config.w_bin.end);
    state.w_real = inertia(ite, config.max_ite, config.w_real.start, config.w_real.end);

    for (auto& p : state.particles) {
      Evaluation e = evaluate(p);
      p.fit = e.fitness;
      p.fit_mask = std::move(e.mask);
      if (after_evaluate) after_evaluate(p);
      if (p.fit > p.fit_best) {
        p.fit_best = p.fit;
        p.best_bin = p.bin;
        p.best_real = p.real;
        p.best_fit_mask = p.fit_mask;
      }
    }
    if (elite) apply_elitism(state, *elite);
    update_global_best(state);

    state.ite = ite + 1;
    state.best_history.push_back(state.best.fitness);
    double mean = 0.0;
    for (const auto& p : state.particles) mean += p.fit;
    mean /= static_cast<double>(state.particles.size());
    result.trace.push_back({ite, state.best.fitness, mean, state.w_bin, state.w_real});

    // snapshot of the particle holding the global best, reinserted next iteration
    std::size_t holder = 0;
    for (std::size_t i = 1; i < state.particles.size(); ++i)
      if (state.particles[i].fit_best > state.particles[holder].fit_best) holder = i;
    elite = state.particles[holder];

    if (should_stop(state, config)) break;
    for (auto& p : state.particles) move_particle(p, state.best, state.w_bin, state.w_real, config, rng);
  }

  result.best = state.best;
  result.iterations = state.ite;
  return result;
}

}  // namespace psum::pso
