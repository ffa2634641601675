#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llmpso/advisor.hpp"
#include "llmpso/swarm.hpp"

namespace llmpso {

class ObjectiveHandle;

struct StoppingCriterion {
    /// Converged once gbest <= target_cost + epsilon.
    std::optional<double> target_cost;
    double epsilon = 0.0;
    /// Exhausted once gbest has not improved for this many iterations.
    std::optional<std::size_t> stagnation_window;
    std::size_t max_iterations = 50;

    void validate() const;
};

enum class Decision { proceed, converged, exhausted };

const char* to_string(Decision decision);

struct ProgressState {
    double gbest_cost = unevaluated;
    std::size_t iteration = 0;
    std::size_t stagnant_iterations = 0;
};

Decision check_convergence(const ProgressState& state, const StoppingCriterion& criterion);

enum class AdvisorFailurePolicy { abort, degrade };

struct RunConfig {
    std::size_t pop_size = 5;
    /// PSO iterations before the first consult.
    std::size_t initial_pso_iterations = 2;
    /// PSO iterations between later consults.
    std::size_t consult_period = 2;
    CoefficientConfig coefficients;
    StoppingCriterion stop;
    std::uint64_t seed = 1;
    bool per_axis_random = true;
    bool parallel_evaluation = false;
    AdvisorConfig advisor;
    AdvisorFailurePolicy on_advisor_failure = AdvisorFailurePolicy::degrade;
    /// Caps the number of particles replaced per injection.
    std::optional<std::size_t> replace_k;

    std::size_t max_iterations() const noexcept { return stop.max_iterations; }

    /// Throws config_error; returns warnings for unusual but legal settings.
    /// Consult settings are only checked when `hybrid`.
    std::vector<std::string> validate(bool hybrid = true) const;
    SwarmConfig swarm_config() const;
};

struct TrajectoryPoint {
    std::size_t iteration = 0;
    double cost = 0.0;
    std::size_t model_calls = 0;
    bool injection = false;

    bool operator==(const TrajectoryPoint&) const = default;
};

struct InjectionRecord {
    std::size_t iteration = 0;
    std::vector<std::size_t> replaced_indices;
    std::vector<double> suggestion_costs;  ///< best first
    double gbest_before = 0.0;
    double gbest_after = 0.0;

    bool operator==(const InjectionRecord&) const = default;
};

struct ExchangeRecord {
    std::size_t iteration = 0;
    AdvisorExchange exchange;

    bool operator==(const ExchangeRecord&) const = default;
};

struct RunReport {
    std::vector<std::string> axis_names;
    std::vector<TrajectoryPoint> gbest_trajectory;
    std::vector<double> global_best;  ///< rounded candidate
    double global_best_cost = 0.0;
    std::size_t model_calls = 0;        ///< evaluations after initialization
    std::size_t init_evaluations = 0;
    std::size_t iterations_used = 0;    ///< PSO iterations executed
    std::size_t consults_evaluated = 0;
    std::vector<ExchangeRecord> advisor_exchanges;
    std::vector<InjectionRecord> injections;
    bool converged = false;
    bool advisor_degraded = false;
    std::string stop_reason;
    std::uint64_t seed = 0;
    std::size_t pop_size = 0;
    CoefficientConfig coefficients;
    std::string boundary_policy = "clip-keep-velocity";
    std::optional<BackendInfo> advisor;
    std::size_t initial_pso_iterations = 0;
    std::size_t consult_period = 0;

    /// Value of the named axis in global_best, if the axis exists.
    std::optional<double> best_value(const std::string& axis) const;

    bool operator==(const RunReport&) const = default;
};

struct EvaluatedSuggestion {
    Suggestion suggestion;
    double cost = 0.0;
};

/// Replaces the worst particles with better suggestions. Particles are taken
/// worst-first by current cost, suggestions best-first by cost, and pairing
/// stops at the first suggestion that does not beat its particle. A replaced
/// particle takes the suggestion's position and velocity (fresh uniform draw
/// when absent) and restarts its pbest there, except that the particle holding
/// gbest keeps its better pbest.
InjectionRecord inject_suggestions(Swarm& swarm, std::span<const EvaluatedSuggestion> evaluated,
                                   std::optional<std::size_t> replace_k = {});

/// Plain PSO until the stopping criterion fires.
RunReport run_pso(const RunConfig& config, ObjectiveHandle& objective);

/// PSO with periodic advisor consults whose suggestions replace the worst particles.
RunReport run_llm_pso(const RunConfig& config, ObjectiveHandle& objective,
                      AdvisorBackend& backend, AuditLog* audit = nullptr);

}  // namespace llmpso
