#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "llmpso/advisor.hpp"
#include "llmpso/external.hpp"
#include "llmpso/hybrid.hpp"
#include "llmpso/objective.hpp"
#include "llmpso/statistics.hpp"

namespace llmpso {

/// "rastrigin", "synthetic", "ext-proc:<cmd>" or "ext-http:<url>".
struct ObjectiveSpec {
    std::string kind = "synthetic";
    std::string target;  ///< command or url for external kinds
    std::size_t dims = 2;
    ExternalBackendConfig external;

    static ObjectiveSpec parse(const std::string& text);
    std::string str() const;
    bool operator==(const ObjectiveSpec& o) const {
        return kind == o.kind && target == o.target && dims == o.dims;
    }
};

SearchSpace space_for(const ObjectiveSpec& spec);
std::unique_ptr<ObjectiveHandle> make_objective(const ObjectiveSpec& spec);

/// Known minimizer for objectives that have one (synthetic via grid scan,
/// rastrigin at the origin); empty for external objectives.
std::optional<std::vector<double>> known_optimum(const ObjectiveSpec& spec);

/// "mock", "mock-oracle", "scripted:<file>" or "http:<url>".
struct AdvisorSpec {
    std::string kind = "mock";
    std::string target;
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.7;

    static AdvisorSpec parse(const std::string& text);
    std::string str() const;
    bool operator==(const AdvisorSpec&) const = default;
};

/// Builds a backend for one run. Mocks are seeded from `seed`.
std::unique_ptr<AdvisorBackend> make_advisor(const AdvisorSpec& spec, const ObjectiveSpec& objective,
                                             std::uint64_t seed);

struct Sweep {
    std::vector<std::size_t> pop_sizes;
    std::vector<double> c1;
    std::vector<double> c2;
    std::vector<std::size_t> initial_iterations;
};

struct ExperimentSpec {
    RunConfig base;
    ObjectiveSpec objective;
    std::optional<AdvisorSpec> advisor;
    std::size_t repeats = 10;
    std::uint64_t seed_base = 1;
    Sweep sweep;
    /// Run every cell both without and with the advisor, on the same seeds.
    bool paired = false;
    /// 0 picks hardware concurrency. External objectives always run serially.
    std::size_t workers = 0;
    std::string audit_path;

    void validate() const;
};

struct Cell {
    std::size_t pop_size = 0;
    double c1 = 0.0;
    double c2 = 0.0;
    std::size_t initial_iterations = 0;
    bool hybrid = false;

    bool operator==(const Cell&) const = default;
};

/// Sweep cells in deterministic order (pop, c1, c2, initial, pso before hybrid).
std::vector<Cell> expand_cells(const ExperimentSpec& spec);

struct TrialOutcome {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::optional<RunReport> report;
    std::string error;  ///< set when the run failed

    bool operator==(const TrialOutcome&) const = default;
};

struct CellResult {
    Cell cell;
    std::vector<TrialOutcome> trials;
    /// Over converged runs only; empty when none converged.
    std::optional<TrialStatistics> iterations;
    std::optional<TrialStatistics> model_calls;
    std::optional<TrialStatistics> final_cost;
    std::size_t converged = 0;
    std::size_t not_converged = 0;
    std::size_t failed = 0;

    bool operator==(const CellResult&) const = default;
};

/// Per-seed hybrid minus PSO model calls for a paired cell.
struct PairedComparison {
    std::size_t pso_cell = 0;
    std::size_t hybrid_cell = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<long long> model_call_deltas;

    bool operator==(const PairedComparison&) const = default;
};

struct ExperimentResults {
    std::string objective;
    std::string advisor;
    std::size_t repeats = 0;
    std::uint64_t seed_base = 0;
    double w = 0.0;
    std::optional<double> target_cost;
    double epsilon = 0.0;
    std::size_t max_iterations = 0;
    std::size_t consult_period = 0;
    std::string audit_path;
    std::vector<CellResult> cells;
    std::vector<PairedComparison> comparisons;

    bool operator==(const ExperimentResults&) const = default;
};

/// Runs every cell `repeats` times with seeds seed_base + trial. A failing
/// run is recorded in its cell and the sweep continues.
ExperimentResults run_trials(const ExperimentSpec& spec);

/// Recomputes the statistics of a cell from its trials.
void aggregate(CellResult& cell);

}  // namespace llmpso
