#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmpso/errors.hpp"
#include "llmpso/experiment.hpp"
#include "llmpso/report.hpp"

namespace llmpso::cli {

namespace {

using nlohmann::json;

struct Options {
    std::optional<std::string> objective;
    std::optional<std::string> advisor;
    std::optional<std::string> model;
    std::optional<std::string> audit;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> on_advisor_failure;
    std::optional<std::vector<std::size_t>> particles;
    std::optional<std::vector<std::size_t>> initial_iters;
    std::optional<std::vector<double>> c1;
    std::optional<std::vector<double>> c2;
    std::optional<std::size_t> iters;
    std::optional<std::size_t> consult_period;
    std::optional<std::size_t> repeats;
    std::optional<std::size_t> stagnation;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> max_attempts;
    std::optional<std::size_t> replace_k;
    std::optional<int> retries;
    std::optional<long> timeout_ms;
    std::optional<double> w;
    std::optional<double> tolerance;
    std::optional<double> target_cost;
    std::optional<double> temperature;
    std::optional<std::uint64_t> seed;
    std::optional<bool> compare;
};

template <typename T>
void overlay(std::optional<T>& base, const std::optional<T>& top) {
    if (top) base = top;
}

Options merge(Options base, const Options& top) {
    overlay(base.objective, top.objective);
    overlay(base.advisor, top.advisor);
    overlay(base.model, top.model);
    overlay(base.audit, top.audit);
    overlay(base.out, top.out);
    overlay(base.format, top.format);
    overlay(base.on_advisor_failure, top.on_advisor_failure);
    overlay(base.particles, top.particles);
    overlay(base.initial_iters, top.initial_iters);
    overlay(base.c1, top.c1);
    overlay(base.c2, top.c2);
    overlay(base.iters, top.iters);
    overlay(base.consult_period, top.consult_period);
    overlay(base.repeats, top.repeats);
    overlay(base.stagnation, top.stagnation);
    overlay(base.workers, top.workers);
    overlay(base.max_attempts, top.max_attempts);
    overlay(base.replace_k, top.replace_k);
    overlay(base.retries, top.retries);
    overlay(base.timeout_ms, top.timeout_ms);
    overlay(base.w, top.w);
    overlay(base.tolerance, top.tolerance);
    overlay(base.target_cost, top.target_cost);
    overlay(base.temperature, top.temperature);
    overlay(base.seed, top.seed);
    overlay(base.compare, top.compare);
    return base;
}

template <typename T>
void read_scalar(const json& doc, const char* key, std::optional<T>& out) {
    if (const auto it = doc.find(key); it != doc.end()) out = it->get<T>();
}

template <typename T>
void read_list(const json& doc, const char* key, std::optional<std::vector<T>>& out) {
    const auto it = doc.find(key);
    if (it == doc.end()) return;
    out = it->is_array() ? it->get<std::vector<T>>() : std::vector<T>{it->get<T>()};
}

/// Config file: one JSON object whose keys are the long flag names with '_' for '-'.
Options load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("config file " + path + " is not JSON: " + e.what());
    }
    if (!doc.is_object()) throw config_error("config file must hold a JSON object");

    static const std::vector<std::string> known = {
        "objective", "advisor",   "model",      "audit",       "out",          "format",
        "on_advisor_failure",     "particles",  "initial_iters", "c1",         "c2",
        "iters",     "consult_period", "repeats", "stagnation", "workers",     "max_attempts",
        "replace_k", "retries",   "timeout_ms", "w",           "tolerance",    "target_cost",
        "temperature", "seed",    "compare"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw config_error("unknown config key '" + key + "'");
        }
    }

    Options o;
    try {
        read_scalar(doc, "objective", o.objective);
        read_scalar(doc, "advisor", o.advisor);
        read_scalar(doc, "model", o.model);
        read_scalar(doc, "audit", o.audit);
        read_scalar(doc, "out", o.out);
        read_scalar(doc, "format", o.format);
        read_scalar(doc, "on_advisor_failure", o.on_advisor_failure);
        read_list(doc, "particles", o.particles);
        read_list(doc, "initial_iters", o.initial_iters);
        read_list(doc, "c1", o.c1);
        read_list(doc, "c2", o.c2);
        read_scalar(doc, "iters", o.iters);
        read_scalar(doc, "consult_period", o.consult_period);
        read_scalar(doc, "repeats", o.repeats);
        read_scalar(doc, "stagnation", o.stagnation);
        read_scalar(doc, "workers", o.workers);
        read_scalar(doc, "max_attempts", o.max_attempts);
        read_scalar(doc, "replace_k", o.replace_k);
        read_scalar(doc, "retries", o.retries);
        read_scalar(doc, "timeout_ms", o.timeout_ms);
        read_scalar(doc, "w", o.w);
        read_scalar(doc, "tolerance", o.tolerance);
        read_scalar(doc, "target_cost", o.target_cost);
        read_scalar(doc, "temperature", o.temperature);
        read_scalar(doc, "seed", o.seed);
        read_scalar(doc, "compare", o.compare);
    } catch (const json::exception& e) {
        throw config_error("config file " + path + ": " + e.what());
    }
    return o;
}

/// Binds CLI flags; values land in `Options` only when the flag is given.
class Flags {
public:
    void attach(CLI::App& app, bool with_advisor, bool run_flags) {
        add(app, "--objective", objective_, "rastrigin | synthetic | ext-proc:<cmd> | ext-http:<url>");
        if (!run_flags) return;
        add_list(app, "--particles", particles_, "population size(s), comma separated");
        add(app, "--iters", iters_, "maximum PSO iterations");
        add_list(app, "--c1", c1_, "exploration coefficient(s)");
        add_list(app, "--c2", c2_, "exploitation coefficient(s)");
        add(app, "--w", w_, "inertia weight (default 0.95 on rastrigin, 0.7 otherwise)");
        add(app, "--tolerance", tolerance_, "convergence tolerance on the target cost");
        add(app, "--target-cost", target_cost_, "stop once gbest reaches this cost");
        add(app, "--stagnation", stagnation_, "stop after this many iterations without improvement");
        add(app, "--repeats", repeats_, "runs per cell");
        add(app, "--seed", seed_, "seed of the first run; run i uses seed + i");
        add(app, "--workers", workers_, "parallel runs (0 = hardware concurrency)");
        add(app, "--timeout-ms", timeout_ms_, "external evaluator timeout");
        add(app, "--retries", retries_, "external evaluator retries after a timeout");
        add(app, "--out", out_, "report path");
        add(app, "--format", format_, "csv | json (default from --out extension)");
        add(app, "--config", config_, "JSON config file; flags override its values");
        if (!with_advisor) return;
        add(app, "--advisor", advisor_, "mock | mock-oracle | scripted:<file> | http:<url>");
        add_list(app, "--initial-iters", initial_iters_, "PSO iterations before the first consult");
        add(app, "--consult-period", consult_period_, "PSO iterations between consults");
        add(app, "--model", model_, "chat model name for http advisors");
        add(app, "--temperature", temperature_, "sampling temperature for http advisors");
        add(app, "--audit", audit_, "append advisor exchanges to this JSON-lines file");
        add(app, "--max-attempts", max_attempts_, "advisor attempts before falling back");
        add(app, "--replace-k", replace_k_, "cap on particles replaced per consult");
        add(app, "--on-advisor-failure", on_failure_, "abort | degrade");
    }

    void add_compare(CLI::App& app) {
        compare_opt_ = app.add_flag("--compare", compare_, "run every cell with and without the advisor");
    }

    Options collect() const {
        Options o;
        take(objective_, o.objective);
        take(advisor_, o.advisor);
        take(model_, o.model);
        take(audit_, o.audit);
        take(out_, o.out);
        take(format_, o.format);
        take(on_failure_, o.on_advisor_failure);
        take(particles_, o.particles);
        take(initial_iters_, o.initial_iters);
        take(c1_, o.c1);
        take(c2_, o.c2);
        take(iters_, o.iters);
        take(consult_period_, o.consult_period);
        take(repeats_, o.repeats);
        take(stagnation_, o.stagnation);
        take(workers_, o.workers);
        take(max_attempts_, o.max_attempts);
        take(replace_k_, o.replace_k);
        take(retries_, o.retries);
        take(timeout_ms_, o.timeout_ms);
        take(w_, o.w);
        take(tolerance_, o.tolerance);
        take(target_cost_, o.target_cost);
        take(temperature_, o.temperature);
        take(seed_, o.seed);
        if (compare_opt_ && compare_opt_->count() > 0) o.compare = compare_;
        return o;
    }

    std::optional<std::string> config_path() const {
        if (config_.opt && config_.opt->count() > 0) return config_.value;
        return std::nullopt;
    }

private:
    template <typename T>
    struct Bound {
        T value{};
        CLI::Option* opt = nullptr;
    };

    template <typename T>
    static void add(CLI::App& app, const char* name, Bound<T>& b, const char* help) {
        b.opt = app.add_option(name, b.value, help);
    }
    template <typename T>
    static void add_list(CLI::App& app, const char* name, Bound<std::vector<T>>& b, const char* help) {
        b.opt = app.add_option(name, b.value, help)->delimiter(',');
    }
    template <typename T>
    static void take(const Bound<T>& b, std::optional<T>& out) {
        if (b.opt && b.opt->count() > 0) out = b.value;
    }

    Bound<std::string> objective_, advisor_, model_, audit_, out_, format_, on_failure_, config_;
    Bound<std::vector<std::size_t>> particles_, initial_iters_;
    Bound<std::vector<double>> c1_, c2_;
    Bound<std::size_t> iters_, consult_period_, repeats_, stagnation_, workers_, max_attempts_, replace_k_;
    Bound<int> retries_;
    Bound<long> timeout_ms_;
    Bound<double> w_, tolerance_, target_cost_, temperature_;
    Bound<std::uint64_t> seed_;
    bool compare_ = false;
    CLI::Option* compare_opt_ = nullptr;
};

ExperimentSpec build_spec(const Options& o, const std::string& command) {
    ExperimentSpec spec;
    spec.objective = ObjectiveSpec::parse(o.objective.value_or("synthetic"));
    const bool rastrigin = spec.objective.kind == "rastrigin";

    if (o.timeout_ms) {
        if (*o.timeout_ms <= 0) throw config_error("--timeout-ms must be positive");
        spec.objective.external.timeout = std::chrono::milliseconds(*o.timeout_ms);
    }
    if (o.retries) spec.objective.external.retries = *o.retries;

    if (command == "llm-pso" && !o.advisor) throw config_error("llm-pso needs --advisor");
    if (command == "pso" && o.advisor) throw config_error("pso does not take --advisor; use llm-pso");
    if (o.advisor) {
        AdvisorSpec advisor = AdvisorSpec::parse(*o.advisor);
        if (o.model) advisor.model = *o.model;
        if (o.temperature) advisor.temperature = *o.temperature;
        spec.advisor = advisor;
    }
    spec.paired = o.compare.value_or(false);

    RunConfig& base = spec.base;
    base.stop.max_iterations = o.iters.value_or(rastrigin ? 500 : 50);
    if (rastrigin) {
        base.stop.target_cost = o.target_cost.value_or(0.0);
        base.stop.epsilon = o.tolerance.value_or(1e-2);
    } else {
        base.stop.target_cost = o.target_cost;
        base.stop.epsilon = o.tolerance.value_or(1e-9);
    }
    base.stop.stagnation_window = o.stagnation;
    base.coefficients.w = o.w.value_or(rastrigin ? 0.95 : 0.7);
    if (o.consult_period) base.consult_period = *o.consult_period;
    if (o.max_attempts) base.advisor.max_attempts = *o.max_attempts;
    base.replace_k = o.replace_k;
    if (o.on_advisor_failure) {
        if (*o.on_advisor_failure == "abort") {
            base.on_advisor_failure = AdvisorFailurePolicy::abort;
        } else if (*o.on_advisor_failure == "degrade") {
            base.on_advisor_failure = AdvisorFailurePolicy::degrade;
        } else {
            throw config_error("--on-advisor-failure must be abort or degrade");
        }
    }

    const auto first_or = [](const auto& list, auto fallback) {
        return list && !list->empty() ? list->front() : fallback;
    };
    base.pop_size = first_or(o.particles, std::size_t{5});
    base.coefficients.c1 = first_or(o.c1, 0.5);
    base.coefficients.c2 = first_or(o.c2, 0.5);
    base.initial_pso_iterations = first_or(o.initial_iters, std::size_t{2});
    if (o.particles) spec.sweep.pop_sizes = *o.particles;
    if (o.c1) spec.sweep.c1 = *o.c1;
    if (o.c2) spec.sweep.c2 = *o.c2;
    if (o.initial_iters) spec.sweep.initial_iterations = *o.initial_iters;

    spec.repeats = o.repeats.value_or(1);
    spec.seed_base = o.seed.value_or(1);
    spec.workers = o.workers.value_or(0);
    spec.audit_path = o.audit.value_or("");
    return spec;
}

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void print_summary(const ExperimentResults& results, std::ostream& out) {
    for (const auto& cell : results.cells) {
        const Cell& c = cell.cell;
        out << (c.hybrid ? "llm-pso" : "pso") << " pop=" << c.pop_size << " c1=" << fmt(c.c1)
            << " c2=" << fmt(c.c2);
        if (c.hybrid) out << " initial=" << c.initial_iterations;
        out << ": converged " << cell.converged << "/" << cell.trials.size();
        if (cell.failed) out << " (" << cell.failed << " failed)";
        if (cell.iterations) {
            out << ", iterations mean " << fmt(cell.iterations->mean) << " sd "
                << fmt(cell.iterations->std);
        }
        if (cell.model_calls) out << ", model calls mean " << fmt(cell.model_calls->mean);
        if (cell.final_cost) out << ", best cost mean " << fmt(cell.final_cost->mean);
        out << "\n";
        if (cell.trials.size() == 1 && cell.trials.front().report) {
            const RunReport& r = *cell.trials.front().report;
            out << "  best";
            for (std::size_t k = 0; k < r.axis_names.size(); ++k) {
                out << " " << r.axis_names[k] << "=" << fmt(r.global_best[k], 10);
            }
            out << " cost=" << fmt(r.global_best_cost, 10) << " model_calls=" << r.model_calls
                << " converged=" << (r.converged ? "true" : "false") << "\n";
        }
    }
    for (const auto& cmp : results.comparisons) {
        out << "paired cells " << cmp.pso_cell << "/" << cmp.hybrid_cell << " model-call deltas:";
        for (long long d : cmp.model_call_deltas) out << " " << d;
        out << "\n";
    }
}

int run_experiment(const Options& o, const std::string& command, std::ostream& out,
                   std::ostream& err) {
    ExperimentSpec spec = build_spec(o, command);
    for (const auto& cell : expand_cells(spec)) {
        RunConfig probe = spec.base;
        probe.pop_size = cell.pop_size;
        for (const auto& warning : probe.validate(cell.hybrid)) err << "warning: " << warning << "\n";
    }

    const ExperimentResults results = run_trials(spec);
    print_summary(results, out);

    if (o.out) {
        ReportFormat format = ReportFormat::json;
        if (o.format) {
            format = parse_report_format(*o.format);
        } else if (std::filesystem::path(*o.out).extension() == ".csv") {
            format = ReportFormat::csv;
        }
        emit_report(results, format, *o.out);
    }

    int failures = 0;
    for (const auto& cell : results.cells) {
        for (const auto& t : cell.trials) {
            if (!t.report) {
                err << "run with seed " << t.seed << " failed: " << t.error << "\n";
                ++failures;
            }
        }
    }
    return failures ? exit_run_error : exit_ok;
}

int eval_grid(const Options& o, std::ostream& out) {
    const ObjectiveSpec spec = ObjectiveSpec::parse(o.objective.value_or("synthetic"));
    auto objective = make_objective(spec);
    const GridScan scan = scan_grid(*objective);

    out << "argmin";
    const SearchSpace& space = objective->space();
    for (std::size_t k = 0; k < space.size(); ++k) {
        out << " " << space[k].name << "=" << fmt(scan.argmin[k], 10);
    }
    out << " cost=" << fmt(scan.cost, 10) << " points=" << scan.points << "\n";

    if (o.out) {
        json doc;
        doc["objective"] = spec.str();
        for (std::size_t k = 0; k < space.size(); ++k) doc["argmin"][space[k].name] = scan.argmin[k];
        doc["cost"] = scan.cost;
        doc["points"] = scan.points;
        write_file_atomic(*o.out, doc.dump(2) + "\n");
    }
    return exit_ok;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Particle swarm optimization with advisor-guided particle replacement", "llmpso"};
    app.require_subcommand(1);

    Flags pso_flags, llm_flags, sweep_flags, grid_flags;
    auto* pso = app.add_subcommand("pso", "plain PSO runs");
    pso_flags.attach(*pso, false, true);
    auto* llm = app.add_subcommand("llm-pso", "PSO with advisor consults");
    llm_flags.attach(*llm, true, true);
    auto* sweep = app.add_subcommand("sweep", "grid over particles, c1, c2 and initial iterations");
    sweep_flags.attach(*sweep, true, true);
    sweep_flags.add_compare(*sweep);
    auto* grid = app.add_subcommand("eval-grid", "brute-force scan of an integer search space");
    grid_flags.attach(*grid, false, false);
    std::string grid_out;
    grid->add_option("--out", grid_out, "write the argmin as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_config_error;
    }

    try {
        if (grid->parsed()) {
            Options o = grid_flags.collect();
            if (!grid_out.empty()) o.out = grid_out;
            return eval_grid(o, out);
        }
        const auto [command, flags] = pso->parsed()   ? std::pair{std::string("pso"), &pso_flags}
                                      : llm->parsed() ? std::pair{std::string("llm-pso"), &llm_flags}
                                                      : std::pair{std::string("sweep"), &sweep_flags};
        Options o = flags->collect();
        if (const auto path = flags->config_path()) o = merge(load_config(*path), o);
        return run_experiment(o, command, out, err);
    } catch (const config_error& e) {
        err << "configuration error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_run_error;
    }
}

}  // namespace llmpso::cli
