#include "llmpso/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "llmpso/errors.hpp"

namespace llmpso {

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

}  // namespace

ObjectiveSpec ObjectiveSpec::parse(const std::string& text) {
    ObjectiveSpec spec;
    if (text == "rastrigin" || text == "synthetic") {
        spec.kind = text;
    } else if (starts_with(text, "ext-proc:")) {
        spec.kind = "ext-proc";
        spec.target = text.substr(9);
    } else if (starts_with(text, "ext-http:")) {
        spec.kind = "ext-http";
        spec.target = text.substr(9);
    } else {
        throw config_error("unknown objective '" + text + "'");
    }
    if (spec.kind.starts_with("ext-") && spec.target.empty()) {
        throw config_error("objective '" + text + "' needs a target");
    }
    return spec;
}

std::string ObjectiveSpec::str() const { return target.empty() ? kind : kind + ":" + target; }

SearchSpace space_for(const ObjectiveSpec& spec) {
    if (spec.kind == "rastrigin") return SearchSpace::rastrigin(spec.dims);
    return SearchSpace::neurons_layers();
}

std::unique_ptr<ObjectiveHandle> make_objective(const ObjectiveSpec& spec) {
    SearchSpace space = space_for(spec);
    std::unique_ptr<Objective> objective;
    if (spec.kind == "rastrigin") {
        objective = std::make_unique<RastriginObjective>();
    } else if (spec.kind == "synthetic") {
        objective = std::make_unique<SyntheticObjective>(space);
    } else if (spec.kind == "ext-proc") {
        objective = std::make_unique<ExternalProcessObjective>(spec.target, space, spec.external);
    } else if (spec.kind == "ext-http") {
        objective = std::make_unique<ExternalHttpObjective>(spec.target, space, spec.external);
    } else {
        throw config_error("unknown objective kind '" + spec.kind + "'");
    }
    return std::make_unique<ObjectiveHandle>(std::move(objective), std::move(space));
}

std::optional<std::vector<double>> known_optimum(const ObjectiveSpec& spec) {
    if (spec.kind == "rastrigin") return std::vector<double>(spec.dims, 0.0);
    if (spec.kind == "synthetic") {
        auto handle = make_objective(spec);
        return scan_grid(*handle).argmin;
    }
    return std::nullopt;
}

AdvisorSpec AdvisorSpec::parse(const std::string& text) {
    AdvisorSpec spec;
    if (text == "mock" || text == "mock-oracle") {
        spec.kind = text;
    } else if (starts_with(text, "scripted:")) {
        spec.kind = "scripted";
        spec.target = text.substr(9);
    } else if (starts_with(text, "http:")) {
        spec.kind = "http";
        spec.target = text.substr(5);
    } else {
        throw config_error("unknown advisor '" + text + "'");
    }
    if ((spec.kind == "scripted" || spec.kind == "http") && spec.target.empty()) {
        throw config_error("advisor '" + text + "' needs a target");
    }
    return spec;
}

std::string AdvisorSpec::str() const { return target.empty() ? kind : kind + ":" + target; }

std::unique_ptr<AdvisorBackend> make_advisor(const AdvisorSpec& spec, const ObjectiveSpec& objective,
                                             std::uint64_t seed) {
    if (spec.kind == "mock") return std::make_unique<MockAdvisor>(seed);
    if (spec.kind == "mock-oracle") {
        auto optimum = known_optimum(objective);
        if (!optimum) {
            throw config_error("mock-oracle needs an objective with a known optimum, not '" +
                               objective.str() + "'");
        }
        return std::make_unique<MockAdvisor>(seed, std::move(optimum));
    }
    if (spec.kind == "scripted") {
        return std::make_unique<ScriptedAdvisor>(ScriptedAdvisor::from_file(spec.target));
    }
    if (spec.kind == "http") {
        HttpAdvisorConfig config;
        config.base_url = spec.target;
        config.model = spec.model;
        config.temperature = spec.temperature;
        return std::make_unique<HttpChatAdvisor>(std::move(config));
    }
    throw config_error("unknown advisor kind '" + spec.kind + "'");
}

std::vector<Cell> expand_cells(const ExperimentSpec& spec) {
    const auto or_base = [](const auto& values, auto base) {
        using T = decltype(base);
        return values.empty() ? std::vector<T>{base} : std::vector<T>(values.begin(), values.end());
    };
    const auto pops = or_base(spec.sweep.pop_sizes, spec.base.pop_size);
    const auto c1s = or_base(spec.sweep.c1, spec.base.coefficients.c1);
    const auto c2s = or_base(spec.sweep.c2, spec.base.coefficients.c2);
    const auto inits = or_base(spec.sweep.initial_iterations, spec.base.initial_pso_iterations);

    std::vector<Cell> cells;
    for (std::size_t pop : pops) {
        for (double c1 : c1s) {
            for (double c2 : c2s) {
                for (std::size_t init : inits) {
                    Cell cell{pop, c1, c2, init, false};
                    if (spec.paired) {
                        cells.push_back(cell);
                        cell.hybrid = true;
                        cells.push_back(cell);
                    } else {
                        cell.hybrid = spec.advisor.has_value();
                        cells.push_back(cell);
                    }
                }
            }
        }
    }
    return cells;
}

namespace {

RunConfig config_for(const ExperimentSpec& spec, const Cell& cell, std::uint64_t seed) {
    RunConfig config = spec.base;
    config.pop_size = cell.pop_size;
    config.coefficients.c1 = cell.c1;
    config.coefficients.c2 = cell.c2;
    config.initial_pso_iterations = cell.initial_iterations;
    config.seed = seed;
    return config;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (repeats < 1) throw config_error("repeats must be at least 1");
    if (paired && !advisor) throw config_error("paired comparison needs an advisor");
    for (const Cell& cell : expand_cells(*this)) {
        config_for(*this, cell, seed_base).validate(cell.hybrid);
    }
    if (advisor && advisor->kind == "mock-oracle" && !known_optimum(objective)) {
        throw config_error("mock-oracle needs an objective with a known optimum");
    }
}

void aggregate(CellResult& cell) {
    std::vector<double> iterations;
    std::vector<double> calls;
    std::vector<double> costs;
    cell.converged = cell.not_converged = cell.failed = 0;
    for (const auto& t : cell.trials) {
        if (!t.report) {
            ++cell.failed;
            continue;
        }
        calls.push_back(static_cast<double>(t.report->model_calls));
        costs.push_back(t.report->global_best_cost);
        if (t.report->converged) {
            ++cell.converged;
            iterations.push_back(static_cast<double>(t.report->iterations_used));
        } else {
            ++cell.not_converged;
        }
    }
    const auto stats = [](const std::vector<double>& xs) {
        return xs.empty() ? std::nullopt : std::optional<TrialStatistics>(summarize(xs));
    };
    cell.iterations = stats(iterations);
    cell.model_calls = stats(calls);
    cell.final_cost = stats(costs);
}

ExperimentResults run_trials(const ExperimentSpec& spec) {
    spec.validate();

    ExperimentResults results;
    results.objective = spec.objective.str();
    results.advisor = spec.advisor ? spec.advisor->str() : "";
    results.repeats = spec.repeats;
    results.seed_base = spec.seed_base;
    results.w = spec.base.coefficients.w;
    results.target_cost = spec.base.stop.target_cost;
    results.epsilon = spec.base.stop.epsilon;
    results.max_iterations = spec.base.stop.max_iterations;
    results.consult_period = spec.base.consult_period;
    results.audit_path = spec.audit_path;

    const std::vector<Cell> cells = expand_cells(spec);
    results.cells.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        results.cells[c].cell = cells[c];
        results.cells[c].trials.resize(spec.repeats);
    }

    std::unique_ptr<AuditLog> audit;
    if (!spec.audit_path.empty()) audit = std::make_unique<AuditLog>(spec.audit_path);

    const std::size_t total = cells.size() * spec.repeats;
    const auto run_one = [&](std::size_t task) {
        const std::size_t c = task / spec.repeats;
        const std::size_t trial = task % spec.repeats;
        TrialOutcome& out = results.cells[c].trials[trial];
        out.trial = trial;
        out.seed = spec.seed_base + trial;
        try {
            const RunConfig config = config_for(spec, cells[c], out.seed);
            auto objective = make_objective(spec.objective);
            if (cells[c].hybrid) {
                auto backend = make_advisor(*spec.advisor, spec.objective, derive_seed(out.seed, 2));
                out.report = run_llm_pso(config, *objective, *backend, audit.get());
            } else {
                out.report = run_pso(config, *objective);
            }
        } catch (const std::exception& e) {
            out.report.reset();
            out.error = e.what();
            if (out.error.empty()) out.error = "run failed";
        }
    };

    const bool serial = spec.objective.kind.starts_with("ext-") ||
                        (spec.advisor && spec.advisor->kind == "http");
    std::size_t workers = spec.workers ? spec.workers : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(serial ? 1 : workers, 1, std::max<std::size_t>(total, 1));

    if (workers == 1) {
        for (std::size_t t = 0; t < total; ++t) run_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) run_one(t);
            });
        }
    }

    for (auto& cell : results.cells) aggregate(cell);

    if (spec.paired) {
        for (std::size_t c = 0; c + 1 < results.cells.size(); c += 2) {
            PairedComparison cmp;
            cmp.pso_cell = c;
            cmp.hybrid_cell = c + 1;
            for (std::size_t t = 0; t < spec.repeats; ++t) {
                const auto& a = results.cells[c].trials[t];
                const auto& b = results.cells[c + 1].trials[t];
                if (!a.report || !b.report) continue;
                cmp.seeds.push_back(a.seed);
                cmp.model_call_deltas.push_back(static_cast<long long>(b.report->model_calls) -
                                                static_cast<long long>(a.report->model_calls));
            }
            results.comparisons.push_back(std::move(cmp));
        }
    }
    return results;
}

}  // namespace llmpso
