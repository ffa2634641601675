#include "llmpso/hybrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "llmpso/errors.hpp"
#include "llmpso/objective.hpp"

namespace llmpso {

void StoppingCriterion::validate() const {
    if (target_cost && !std::isfinite(*target_cost)) throw config_error("target cost must be finite");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw config_error("epsilon must be >= 0");
    if (stagnation_window && *stagnation_window == 0) {
        throw config_error("stagnation window must be at least 1");
    }
    if (max_iterations == 0 && !target_cost && !stagnation_window) {
        throw config_error("stopping criterion has no active condition");
    }
}

const char* to_string(Decision decision) {
    switch (decision) {
        case Decision::proceed: return "continue";
        case Decision::converged: return "converged";
        case Decision::exhausted: return "exhausted";
    }
    return "unknown";
}

Decision check_convergence(const ProgressState& state, const StoppingCriterion& criterion) {
    if (criterion.target_cost && state.gbest_cost <= *criterion.target_cost + criterion.epsilon) {
        return Decision::converged;
    }
    if (criterion.max_iterations > 0 && state.iteration >= criterion.max_iterations) {
        return Decision::exhausted;
    }
    if (criterion.stagnation_window && state.stagnant_iterations >= *criterion.stagnation_window) {
        return Decision::exhausted;
    }
    return Decision::proceed;
}

std::vector<std::string> RunConfig::validate(bool hybrid) const {
    if (pop_size < 1) throw config_error("population size must be at least 1");
    coefficients.validate();
    stop.validate();
    if (replace_k && *replace_k == 0) throw config_error("replace_k must be at least 1");
    if (hybrid) {
        if (initial_pso_iterations < 1) throw config_error("initial PSO iterations must be at least 1");
        if (stop.max_iterations > 0 && initial_pso_iterations > stop.max_iterations) {
            throw config_error("initial PSO iterations exceed the iteration budget");
        }
        if (consult_period < 1) throw config_error("consult period must be at least 1");
        if (advisor.max_attempts < 1) throw config_error("advisor needs at least one attempt");
    }

    std::vector<std::string> warnings;
    constexpr std::array<std::size_t, 6> usual{5, 10, 15, 20, 50, 100};
    if (std::find(usual.begin(), usual.end(), pop_size) == usual.end()) {
        warnings.push_back("population size " + std::to_string(pop_size) +
                           " is outside the usual {5, 10, 15, 20, 50, 100}");
    }
    return warnings;
}

SwarmConfig RunConfig::swarm_config() const {
    SwarmConfig sc;
    sc.pop_size = pop_size;
    sc.coefficients = coefficients;
    sc.per_axis_random = per_axis_random;
    sc.parallel_evaluation = parallel_evaluation;
    return sc;
}

std::optional<double> RunReport::best_value(const std::string& axis) const {
    for (std::size_t k = 0; k < axis_names.size() && k < global_best.size(); ++k) {
        if (axis_names[k] == axis) return global_best[k];
    }
    return std::nullopt;
}

InjectionRecord inject_suggestions(Swarm& swarm, std::span<const EvaluatedSuggestion> evaluated,
                                   std::optional<std::size_t> replace_k) {
    InjectionRecord record;
    record.iteration = swarm.iteration;
    record.gbest_before = swarm.gbest_cost;

    std::vector<std::size_t> worst_first(swarm.particles.size());
    std::iota(worst_first.begin(), worst_first.end(), 0);
    std::stable_sort(worst_first.begin(), worst_first.end(), [&](std::size_t a, std::size_t b) {
        return swarm.particles[a].current_cost > swarm.particles[b].current_cost;
    });

    std::vector<std::size_t> best_first(evaluated.size());
    std::iota(best_first.begin(), best_first.end(), 0);
    std::stable_sort(best_first.begin(), best_first.end(), [&](std::size_t a, std::size_t b) {
        return evaluated[a].cost < evaluated[b].cost;
    });
    for (std::size_t s : best_first) record.suggestion_costs.push_back(evaluated[s].cost);

    std::size_t limit = std::min(worst_first.size(), best_first.size());
    if (replace_k) limit = std::min(limit, *replace_k);

    const std::size_t holder = swarm.particles.empty() ? 0 : swarm.best_index();
    const SearchSpace& space = swarm.space;

    for (std::size_t i = 0; i < limit; ++i) {
        const EvaluatedSuggestion& s = evaluated[best_first[i]];
        const std::size_t idx = worst_first[i];
        Particle& p = swarm.particles[idx];
        if (!(s.cost < p.current_cost)) break;

        p.position = s.suggestion.position;
        space.clip(p.position);
        if (s.suggestion.velocity && s.suggestion.velocity->size() == space.size()) {
            p.velocity = *s.suggestion.velocity;
            space.clamp_velocity(p.velocity);
        } else {
            for (std::size_t k = 0; k < space.size(); ++k) {
                p.velocity[k] = uniform(swarm.rng, -space[k].v_max, space[k].v_max);
            }
        }
        p.current_cost = s.cost;
        // the gbest holder keeps a better pbest so gbest stays the min over pbests
        if (!(idx == holder && p.pbest_cost <= s.cost)) {
            p.pbest_cost = s.cost;
            p.pbest_position = p.position;
        }
        record.replaced_indices.push_back(idx);
    }

    refresh_gbest(swarm);
    record.gbest_after = swarm.gbest_cost;
    return record;
}

namespace {

class Runner {
public:
    Runner(const RunConfig& config, ObjectiveHandle& objective, AdvisorBackend* backend,
           AuditLog* audit)
        : config_(config), objective_(objective), backend_(backend), audit_(audit) {}

    RunReport run() {
        config_.validate(backend_ != nullptr);
        swarm_ = initialize_swarm(config_.swarm_config(), objective_.space(),
                                  derive_seed(config_.seed, 0));
        advisor_rng_.seed(derive_seed(config_.seed, 1));
        fill_metadata();

        base_count_ = objective_.eval_count();
        evaluate_initial(swarm_, objective_);
        report_.init_evaluations = objective_.eval_count() - base_count_;

        state_.gbest_cost = swarm_.gbest_cost;
        record(false);
        Decision decision = check_convergence(state_, config_.stop);

        bool consulting = backend_ != nullptr;
        std::size_t next_consult = config_.initial_pso_iterations;
        while (decision == Decision::proceed) {
            const double before = swarm_.gbest_cost;
            step(swarm_, objective_);
            advance(before);
            record(false);
            decision = check_convergence(state_, config_.stop);
            if (decision != Decision::proceed) break;

            if (consulting && swarm_.iteration == next_consult) {
                next_consult += config_.consult_period;
                consulting = consult();
                decision = check_convergence(state_, config_.stop);
            }
        }

        finish(decision);
        return std::move(report_);
    }

private:
    void fill_metadata() {
        report_.seed = config_.seed;
        report_.pop_size = config_.pop_size;
        report_.coefficients = config_.coefficients;
        for (const auto& axis : objective_.space().axes()) report_.axis_names.push_back(axis.name);
        if (backend_) {
            report_.advisor = backend_->info();
            report_.initial_pso_iterations = config_.initial_pso_iterations;
            report_.consult_period = config_.consult_period;
        }
    }

    std::size_t model_calls() const {
        return objective_.eval_count() - base_count_ - report_.init_evaluations;
    }

    void advance(double gbest_before) {
        state_.iteration = swarm_.iteration;
        if (swarm_.gbest_cost < gbest_before) {
            state_.stagnant_iterations = 0;
        } else {
            ++state_.stagnant_iterations;
        }
        state_.gbest_cost = swarm_.gbest_cost;
    }

    void record(bool injection) {
        report_.gbest_trajectory.push_back({swarm_.iteration, swarm_.gbest_cost, model_calls(), injection});
    }

    /// Returns false once the advisor is dropped for the rest of the run.
    bool consult() {
        AdvisorExchange exchange;
        try {
            exchange = suggest(*backend_, snapshot_of(swarm_), advisor_rng_, config_.advisor);
        } catch (const advisor_error&) {
            if (config_.on_advisor_failure == AdvisorFailurePolicy::abort) throw;
            report_.advisor_degraded = true;
            return false;
        }

        std::vector<std::vector<double>> positions;
        positions.reserve(exchange.parsed.size());
        for (const auto& s : exchange.parsed) positions.push_back(s.position);
        const auto results = objective_.evaluate_batch(positions, config_.parallel_evaluation);
        ++report_.consults_evaluated;

        std::vector<EvaluatedSuggestion> evaluated;
        evaluated.reserve(results.size());
        for (std::size_t i = 0; i < results.size(); ++i) {
            evaluated.push_back({exchange.parsed[i], results[i].cost});
        }

        const double before = swarm_.gbest_cost;
        report_.injections.push_back(inject_suggestions(swarm_, evaluated, config_.replace_k));
        if (swarm_.gbest_cost < before) state_.stagnant_iterations = 0;
        state_.gbest_cost = swarm_.gbest_cost;
        record(true);

        if (audit_) audit_->append(exchange, config_.seed, swarm_.iteration);
        report_.advisor_exchanges.push_back({swarm_.iteration, std::move(exchange)});
        return true;
    }

    void finish(Decision decision) {
        report_.global_best = objective_.space().to_candidate(swarm_.gbest_position);
        report_.global_best_cost = swarm_.gbest_cost;
        report_.model_calls = model_calls();
        report_.iterations_used = swarm_.iteration;
        report_.converged = decision == Decision::converged;
        if (decision == Decision::converged) {
            report_.stop_reason = "converged";
        } else if (config_.stop.max_iterations > 0 && state_.iteration >= config_.stop.max_iterations) {
            report_.stop_reason = "max-iterations";
        } else {
            report_.stop_reason = "stagnation";
        }

        const std::size_t expected =
            config_.pop_size * (report_.iterations_used + report_.consults_evaluated);
        if (report_.model_calls != expected) {
            throw std::logic_error("model call accounting mismatch: counted " +
                                   std::to_string(report_.model_calls) + ", expected " +
                                   std::to_string(expected));
        }
    }

    const RunConfig& config_;
    ObjectiveHandle& objective_;
    AdvisorBackend* backend_;
    AuditLog* audit_;

    Swarm swarm_;
    rng_type advisor_rng_;
    RunReport report_;
    ProgressState state_;
    std::size_t base_count_ = 0;
};

}  // namespace

RunReport run_pso(const RunConfig& config, ObjectiveHandle& objective) {
    return Runner(config, objective, nullptr, nullptr).run();
}

RunReport run_llm_pso(const RunConfig& config, ObjectiveHandle& objective,
                      AdvisorBackend& backend, AuditLog* audit) {
    return Runner(config, objective, &backend, audit).run();
}

}  // namespace llmpso
