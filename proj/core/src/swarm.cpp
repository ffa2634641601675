#include "llmpso/swarm.hpp"

#include <cmath>
#include <utility>

#include "llmpso/errors.hpp"
#include "llmpso/objective.hpp"

namespace llmpso {

void CoefficientConfig::validate() const {
    if (!(w >= 0.0) || !std::isfinite(w)) throw config_error("inertia weight w must be >= 0");
    if (!(c1 >= 0.0) || !std::isfinite(c1)) throw config_error("coefficient c1 must be >= 0");
    if (!(c2 >= 0.0) || !std::isfinite(c2)) throw config_error("coefficient c2 must be >= 0");
}

std::size_t Swarm::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles.size(); ++i) {
        if (particles[i].pbest_cost < particles[best].pbest_cost) best = i;
    }
    return best;
}

Swarm initialize_swarm(const SwarmConfig& config, const SearchSpace& space, std::uint64_t seed) {
    if (config.pop_size < 1) throw config_error("population size must be at least 1");
    if (space.size() == 0) throw config_error("search space has no axes");
    config.coefficients.validate();

    Swarm swarm;
    swarm.space = space;
    swarm.config = config;
    swarm.rng.seed(seed);
    swarm.particles.resize(config.pop_size);

    for (auto& p : swarm.particles) {
        p.position.resize(space.size());
        p.velocity.resize(space.size());
        for (std::size_t k = 0; k < space.size(); ++k) {
            const Axis& axis = space[k];
            if (axis.integral) {
                const double levels = axis.max - axis.min + 1.0;
                p.position[k] = std::min(axis.max, axis.min + std::floor(uniform01(swarm.rng) * levels));
            } else {
                p.position[k] = uniform(swarm.rng, axis.min, axis.max);
            }
            p.velocity[k] = uniform(swarm.rng, -axis.v_max, axis.v_max);
        }
    }
    return swarm;
}

namespace {

std::vector<std::vector<double>> positions_of(const Swarm& swarm) {
    std::vector<std::vector<double>> out;
    out.reserve(swarm.particles.size());
    for (const auto& p : swarm.particles) out.push_back(p.position);
    return out;
}

}  // namespace

void refresh_gbest(Swarm& swarm) {
    for (const auto& p : swarm.particles) {
        if (p.pbest_cost < swarm.gbest_cost) {
            swarm.gbest_cost = p.pbest_cost;
            swarm.gbest_position = p.pbest_position;
        }
    }
}

StepReport evaluate_initial(Swarm& swarm, ObjectiveHandle& objective) {
    StepReport report;
    report.iteration = swarm.iteration;
    report.gbest_before = swarm.gbest_cost;

    auto results = objective.evaluate_batch(positions_of(swarm), swarm.config.parallel_evaluation);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        auto& p = swarm.particles[i];
        p.current_cost = results[i].cost;
        p.pbest_cost = results[i].cost;
        p.pbest_position = p.position;
        report.costs.push_back(results[i].cost);
    }
    refresh_gbest(swarm);

    report.evaluations = results.size();
    report.gbest_after = swarm.gbest_cost;
    return report;
}

std::vector<double> update_velocity(const Particle& particle, std::span<const double> gbest,
                                    const CoefficientConfig& coeffs, const SearchSpace& space,
                                    const UniformSource& draw, bool per_axis_random) {
    if (!particle.evaluated()) throw config_error("particle has no personal best yet");

    const std::size_t d = space.size();
    std::vector<double> v(d);
    double r1 = 0.0;
    double r2 = 0.0;
    if (!per_axis_random) {
        r1 = draw();
        r2 = draw();
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (per_axis_random) {
            r1 = draw();
            r2 = draw();
        }
        const double x = particle.position[k];
        v[k] = coeffs.w * particle.velocity[k] + coeffs.c1 * r1 * (particle.pbest_position[k] - x) +
               coeffs.c2 * r2 * (gbest[k] - x);
    }
    space.clamp_velocity(v);
    return v;
}

std::vector<double> update_position(std::span<const double> position,
                                    std::span<const double> velocity, const SearchSpace& space) {
    std::vector<double> x(position.begin(), position.end());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += velocity[k];
    space.clip(x);
    return x;
}

StepReport step(Swarm& swarm, ObjectiveHandle& objective) {
    if (swarm.gbest_position.empty()) throw config_error("swarm must be evaluated before stepping");

    Swarm snapshot = swarm;
    StepReport report;
    report.gbest_before = swarm.gbest_cost;

    const UniformSource draw = [&swarm] { return uniform01(swarm.rng); };
    const std::vector<double> gbest = swarm.gbest_position;
    for (auto& p : swarm.particles) {
        p.velocity = update_velocity(p, gbest, swarm.config.coefficients, swarm.space, draw,
                                     swarm.config.per_axis_random);
        p.position = update_position(p.position, p.velocity, swarm.space);
    }

    std::vector<Evaluation> results;
    try {
        results = objective.evaluate_batch(positions_of(swarm), swarm.config.parallel_evaluation);
    } catch (...) {
        swarm = std::move(snapshot);
        throw;
    }

    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        auto& p = swarm.particles[i];
        p.current_cost = results[i].cost;
        if (p.current_cost < p.pbest_cost) {
            p.pbest_cost = p.current_cost;
            p.pbest_position = p.position;
        }
        report.costs.push_back(p.current_cost);
    }
    refresh_gbest(swarm);
    ++swarm.iteration;

    report.iteration = swarm.iteration;
    report.evaluations = results.size();
    report.gbest_after = swarm.gbest_cost;
    return report;
}

}  // namespace llmpso
