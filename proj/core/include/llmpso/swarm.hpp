#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "llmpso/random.hpp"
#include "llmpso/search_space.hpp"

namespace llmpso {

class ObjectiveHandle;

struct CoefficientConfig {
    double w = 0.7;   ///< inertia
    double c1 = 0.5;  ///< pull toward the particle's own best
    double c2 = 0.5;  ///< pull toward the swarm's best

    /// Throws config_error on a negative coefficient.
    void validate() const;
    bool operator==(const CoefficientConfig&) const = default;
};

struct SwarmConfig {
    std::size_t pop_size = 5;
    CoefficientConfig coefficients;
    /// Draw r1, r2 per axis. When false one pair is shared by all axes of a particle.
    bool per_axis_random = true;
    /// Evaluate a batch concurrently when the objective is reentrant.
    bool parallel_evaluation = false;
};

inline constexpr double unevaluated = std::numeric_limits<double>::infinity();

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    double current_cost = unevaluated;
    std::vector<double> pbest_position;
    double pbest_cost = unevaluated;

    bool evaluated() const noexcept { return pbest_cost != unevaluated; }
};

struct Swarm {
    SearchSpace space;
    SwarmConfig config;
    std::vector<Particle> particles;
    std::vector<double> gbest_position;
    double gbest_cost = unevaluated;
    std::size_t iteration = 0;
    rng_type rng;

    /// Index of the particle holding the lowest pbest (first on ties).
    std::size_t best_index() const;
};

struct StepReport {
    std::size_t iteration = 0;
    std::vector<double> costs;  ///< per particle, index order
    std::size_t evaluations = 0;
    double gbest_before = unevaluated;
    double gbest_after = unevaluated;
};

/// Source of r1/r2 draws in [0, 1].
using UniformSource = std::function<double()>;

/// Random positions and velocities; costs left unevaluated.
/// Same (config, space, seed) gives an identical swarm.
Swarm initialize_swarm(const SwarmConfig& config, const SearchSpace& space, std::uint64_t seed);

/// Evaluates every particle once and seeds pbest/gbest.
StepReport evaluate_initial(Swarm& swarm, ObjectiveHandle& objective);

/// w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), clamped to +-v_max.
std::vector<double> update_velocity(const Particle& particle, std::span<const double> gbest,
                                    const CoefficientConfig& coeffs, const SearchSpace& space,
                                    const UniformSource& draw, bool per_axis_random = true);

/// x + v, clipped to the axis bounds. Velocity is kept when clipping.
std::vector<double> update_position(std::span<const double> position,
                                    std::span<const double> velocity, const SearchSpace& space);

/// One synchronous PSO iteration: move every particle, evaluate the batch,
/// then update personal and global bests in index order. On an evaluation
/// failure the swarm is restored and step_error is thrown.
StepReport step(Swarm& swarm, ObjectiveHandle& objective);

/// Re-derives gbest from the particles' pbest values.
void refresh_gbest(Swarm& swarm);

}  // namespace llmpso
