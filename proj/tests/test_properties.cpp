#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "llmpso/advisor.hpp"
#include "llmpso/hybrid.hpp"
#include "llmpso/objective.hpp"
#include "llmpso/swarm.hpp"

using namespace llmpso;

namespace {

constexpr int cases = 1000;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    std::size_t pick(std::initializer_list<std::size_t> xs) {
        return *(xs.begin() + integer(0, static_cast<int>(xs.size()) - 1));
    }
};

bool within(const Swarm& swarm) {
    for (const auto& p : swarm.particles) {
        if (!swarm.space.contains(p.position)) return false;
        for (std::size_t k = 0; k < swarm.space.size(); ++k) {
            if (std::abs(p.velocity[k]) > swarm.space[k].v_max) return false;
        }
    }
    return true;
}

Suggestion random_suggestion(Gen& g, const SearchSpace& space, bool with_velocity) {
    Suggestion s;
    std::vector<double> v;
    for (std::size_t k = 0; k < space.size(); ++k) {
        s.position.push_back(g.integer(static_cast<int>(space[k].min), static_cast<int>(space[k].max)));
        v.push_back(std::round(g.real(-space[k].v_max, space[k].v_max) * 100.0) / 100.0);
    }
    if (with_velocity) s.velocity = v;
    return s;
}

}  // namespace

TEST_CASE("swarm steps keep gbest monotone, bounds, velocities and pbest dominance") {
    Gen g(101);
    for (int c = 0; c < cases; ++c) {
        const bool rastrigin = g.integer(0, 1) == 0;
        const SearchSpace space = rastrigin ? SearchSpace::rastrigin(g.pick({1, 2, 3}))
                                            : SearchSpace::neurons_layers();
        std::unique_ptr<Objective> obj;
        if (rastrigin) {
            obj = std::make_unique<RastriginObjective>();
        } else {
            obj = std::make_unique<SyntheticObjective>(space);
        }
        ObjectiveHandle objective(std::move(obj), space);

        SwarmConfig config;
        config.pop_size = g.pick({1, 2, 5, 10, 20});
        config.coefficients = {g.real(0, 1.2), g.real(0, 2.5), g.real(0, 2.5)};
        config.per_axis_random = g.integer(0, 1) == 1;
        Swarm swarm = initialize_swarm(config, space, g.rng());
        REQUIRE(within(swarm));
        evaluate_initial(swarm, objective);

        std::vector<double> history_min(swarm.particles.size());
        for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
            history_min[i] = swarm.particles[i].current_cost;
        }
        double gbest = swarm.gbest_cost;
        const int steps = g.integer(1, 8);
        for (int s = 0; s < steps; ++s) {
            const StepReport r = step(swarm, objective);
            REQUIRE(swarm.gbest_cost <= gbest);
            REQUIRE(r.gbest_after <= r.gbest_before);
            gbest = swarm.gbest_cost;
            REQUIRE(within(swarm));
            for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
                const auto& p = swarm.particles[i];
                history_min[i] = std::min(history_min[i], p.current_cost);
                REQUIRE(p.pbest_cost == history_min[i]);
                REQUIRE(p.pbest_cost <= p.current_cost);
                REQUIRE(swarm.gbest_cost <= p.pbest_cost);
            }
        }
    }
}

TEST_CASE("injection never raises gbest and keeps the swarm in bounds") {
    Gen g(202);
    const SearchSpace space = SearchSpace::neurons_layers();
    ObjectiveHandle objective(std::make_unique<SyntheticObjective>(space), space);
    for (int c = 0; c < cases; ++c) {
        SwarmConfig config;
        config.pop_size = g.pick({1, 3, 5, 10});
        Swarm swarm = initialize_swarm(config, space, g.rng());
        evaluate_initial(swarm, objective);
        for (int s = g.integer(0, 3); s > 0; --s) step(swarm, objective);

        std::vector<EvaluatedSuggestion> evaluated;
        const std::size_t n = g.pick({1, 2, 5, 10});
        for (std::size_t i = 0; i < n; ++i) {
            Suggestion sug = random_suggestion(g, space, g.integer(0, 1) == 1);
            if (g.integer(0, 4) == 0) sug.position = space.to_candidate(swarm.gbest_position);
            const double cost = objective.evaluate(sug.position).cost;
            evaluated.push_back({sug, cost});
        }
        std::optional<std::size_t> k;
        if (g.integer(0, 3) == 0) k = g.pick({1, 2});

        const double before = swarm.gbest_cost;
        const InjectionRecord r = inject_suggestions(swarm, evaluated, k);
        REQUIRE(r.gbest_before == before);
        REQUIRE(r.gbest_after <= r.gbest_before);
        REQUIRE(swarm.gbest_cost == r.gbest_after);
        REQUIRE(within(swarm));
        if (k) REQUIRE(r.replaced_indices.size() <= *k);
        for (const auto& p : swarm.particles) {
            REQUIRE(p.pbest_cost <= p.current_cost);
            REQUIRE(swarm.gbest_cost <= p.pbest_cost);
        }
        // the swarm keeps moving monotonically after the injection
        const StepReport after = step(swarm, objective);
        REQUIRE(after.gbest_after <= r.gbest_after);
    }
}

TEST_CASE("hybrid runs keep a non-increasing trajectory and exact accounting") {
    Gen g(303);
    const SearchSpace space = SearchSpace::neurons_layers();
    for (int c = 0; c < cases; ++c) {
        ObjectiveHandle objective(std::make_unique<SyntheticObjective>(space), space);
        RunConfig config;
        config.pop_size = g.pick({2, 5, 10});
        config.initial_pso_iterations = g.pick({1, 2, 3});
        config.consult_period = g.pick({1, 2, 3});
        config.stop.max_iterations = g.pick({3, 5, 8});
        config.seed = g.rng();
        if (g.integer(0, 1)) config.stop.target_cost = 0.13;
        std::optional<std::vector<double>> optimum;
        if (g.integer(0, 3) == 0) optimum = std::vector<double>{120, 3};
        MockAdvisor mock(g.rng(), optimum);
        const RunReport r = run_llm_pso(config, objective, mock);
        for (std::size_t i = 1; i < r.gbest_trajectory.size(); ++i) {
            REQUIRE(r.gbest_trajectory[i].cost <= r.gbest_trajectory[i - 1].cost);
        }
        for (const auto& inj : r.injections) REQUIRE(inj.gbest_after <= inj.gbest_before);
        REQUIRE(r.model_calls == config.pop_size * (r.iterations_used + r.consults_evaluated));
        REQUIRE(r.global_best_cost == r.gbest_trajectory.back().cost);
        for (const auto& ex : r.advisor_exchanges) REQUIRE(ex.exchange.parsed.size() == config.pop_size);
    }
}

TEST_CASE("render then parse returns the same suggestions") {
    Gen g(404);
    for (int c = 0; c < cases; ++c) {
        const SearchSpace space = g.integer(0, 1) ? SearchSpace::neurons_layers()
                                                  : SearchSpace::neurons_layers(g.integer(1, 50),
                                                                                g.integer(60, 1000),
                                                                                g.integer(1, 3),
                                                                                g.integer(4, 12));
        const std::size_t npop = g.pick({1, 5, 10, 15, 20, 50, 100});
        const bool velocities = g.integer(0, 1) == 1;
        std::vector<Suggestion> suggestions;
        for (std::size_t i = 0; i < npop; ++i) suggestions.push_back(random_suggestion(g, space, velocities));
        const std::string text = render_response(suggestions, space);
        const auto parsed = parse_response(text, npop, space);
        REQUIRE(parsed.size() == npop);
        REQUIRE(parsed == suggestions);
    }
}

TEST_CASE("advisor suggestions always number npop and stay in bounds") {
    Gen g(505);
    const SearchSpace space = SearchSpace::neurons_layers();
    for (int c = 0; c < cases; ++c) {
        SwarmSnapshot snap;
        snap.space = space;
        const std::size_t npop = g.pick({1, 5, 10, 15, 20, 50, 100});
        for (std::size_t i = 0; i < npop; ++i) {
            const Suggestion s = random_suggestion(g, space, true);
            snap.particles.push_back({s.position, *s.velocity, g.real(0.13, 0.2)});
        }
        rng_type rng(g.rng());
        const auto mock = heuristic_mock_suggest(snap, rng, {}, g.real(0.01, 0.5));
        REQUIRE(mock.size() == npop);
        for (const auto& s : mock) REQUIRE(space.contains(s.position));

        // free text with a random amount of noise: either a valid grouping or a parse error
        std::string text;
        const std::size_t tokens = static_cast<std::size_t>(g.integer(0, static_cast<int>(5 * npop)));
        for (std::size_t t = 0; t < tokens; ++t) {
            text += (t ? " ; " : "") + std::to_string(g.integer(-500, 500));
        }
        ScriptedAdvisor scripted({text, text, text});
        rng_type fallback(g.rng());
        const AdvisorExchange ex = suggest(scripted, snap, fallback);
        REQUIRE(ex.parsed.size() == npop);
        REQUIRE(ex.attempts <= 3);
        REQUIRE(ex.fallback == !(tokens == 2 * npop || tokens == 4 * npop));
        for (const auto& s : ex.parsed) {
            REQUIRE(space.contains(s.position));
            if (s.velocity) {
                REQUIRE(std::abs((*s.velocity)[0]) <= space[0].v_max);
                REQUIRE(std::abs((*s.velocity)[1]) <= space[1].v_max);
            }
        }
    }
}
