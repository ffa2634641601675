#include "llmpso/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json_convert.hpp"
#include "llmpso/errors.hpp"

namespace llmpso {

void to_json(json& j, const RunReport& r) {
    j = json{{"axis_names", r.axis_names},
             {"gbest_trajectory", r.gbest_trajectory},
             {"global_best", r.global_best},
             {"global_best_cost", r.global_best_cost},
             {"model_calls", r.model_calls},
             {"init_evaluations", r.init_evaluations},
             {"iterations_used", r.iterations_used},
             {"consults_evaluated", r.consults_evaluated},
             {"advisor_exchanges", r.advisor_exchanges},
             {"injections", r.injections},
             {"converged", r.converged},
             {"advisor_degraded", r.advisor_degraded},
             {"stop_reason", r.stop_reason},
             {"seed", r.seed},
             {"pop_size", r.pop_size},
             {"coefficients", r.coefficients},
             {"boundary_policy", r.boundary_policy},
             {"advisor", r.advisor},
             {"initial_pso_iterations", r.initial_pso_iterations},
             {"consult_period", r.consult_period}};
}

void from_json(const json& j, RunReport& r) {
    j.at("axis_names").get_to(r.axis_names);
    j.at("gbest_trajectory").get_to(r.gbest_trajectory);
    j.at("global_best").get_to(r.global_best);
    j.at("global_best_cost").get_to(r.global_best_cost);
    j.at("model_calls").get_to(r.model_calls);
    j.at("init_evaluations").get_to(r.init_evaluations);
    j.at("iterations_used").get_to(r.iterations_used);
    j.at("consults_evaluated").get_to(r.consults_evaluated);
    j.at("advisor_exchanges").get_to(r.advisor_exchanges);
    j.at("injections").get_to(r.injections);
    j.at("converged").get_to(r.converged);
    j.at("advisor_degraded").get_to(r.advisor_degraded);
    j.at("stop_reason").get_to(r.stop_reason);
    j.at("seed").get_to(r.seed);
    j.at("pop_size").get_to(r.pop_size);
    j.at("coefficients").get_to(r.coefficients);
    j.at("boundary_policy").get_to(r.boundary_policy);
    read_optional(j, "advisor", r.advisor);
    j.at("initial_pso_iterations").get_to(r.initial_pso_iterations);
    j.at("consult_period").get_to(r.consult_period);
}

void to_json(json& j, const ExperimentResults& r) {
    j = json{{"objective", r.objective},
             {"advisor", r.advisor},
             {"repeats", r.repeats},
             {"seed_base", r.seed_base},
             {"w", r.w},
             {"target_cost", r.target_cost},
             {"epsilon", r.epsilon},
             {"max_iterations", r.max_iterations},
             {"consult_period", r.consult_period},
             {"audit_path", r.audit_path},
             {"cells", r.cells},
             {"comparisons", r.comparisons}};
}

void from_json(const json& j, ExperimentResults& r) {
    j.at("objective").get_to(r.objective);
    j.at("advisor").get_to(r.advisor);
    j.at("repeats").get_to(r.repeats);
    j.at("seed_base").get_to(r.seed_base);
    j.at("w").get_to(r.w);
    read_optional(j, "target_cost", r.target_cost);
    j.at("epsilon").get_to(r.epsilon);
    j.at("max_iterations").get_to(r.max_iterations);
    j.at("consult_period").get_to(r.consult_period);
    j.at("audit_path").get_to(r.audit_path);
    j.at("cells").get_to(r.cells);
    j.at("comparisons").get_to(r.comparisons);
}

ReportFormat parse_report_format(const std::string& text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw config_error("unknown report format '" + text + "'");
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Layout {
    bool initial = false;
    bool mode = false;
};

Layout layout_of(const ExperimentResults& r) {
    std::set<std::size_t> inits;
    std::set<bool> modes;
    for (const auto& c : r.cells) {
        inits.insert(c.cell.initial_iterations);
        modes.insert(c.cell.hybrid);
    }
    return {inits.size() > 1, modes.size() > 1};
}

std::string cell_prefix(const Cell& c, const Layout& layout) {
    std::string s = std::to_string(c.pop_size) + "," + num(c.c1) + "," + num(c.c2);
    if (layout.initial) s += "," + std::to_string(c.initial_iterations);
    if (layout.mode) s += c.hybrid ? ",llm-pso" : ",pso";
    return s;
}

}  // namespace

std::string to_csv(const ExperimentResults& results) {
    const Layout layout = layout_of(results);
    std::string out = "pop_size,c1,c2";
    if (layout.initial) out += ",initial_iters";
    if (layout.mode) out += ",mode";
    out += ",metric,mean,std,ci_low,ci_high,n\n";

    for (const auto& cell : results.cells) {
        const std::pair<const char*, const std::optional<TrialStatistics>*> metrics[] = {
            {"iterations", &cell.iterations},
            {"model_calls", &cell.model_calls},
            {"final_cost", &cell.final_cost},
        };
        for (const auto& [name, stats] : metrics) {
            out += cell_prefix(cell.cell, layout) + "," + name + ",";
            if (*stats) {
                const TrialStatistics& s = **stats;
                out += num(s.mean) + "," + num(s.std) + "," + num(s.ci_low) + "," + num(s.ci_high) +
                       "," + std::to_string(s.n);
            } else {
                out += ",,,,0";
            }
            out += "\n";
        }
    }
    return out;
}

std::string samples_csv(const ExperimentResults& results) {
    std::string out =
        "pop_size,c1,c2,initial_iters,mode,trial,seed,status,iterations,model_calls,final_cost\n";
    for (const auto& cell : results.cells) {
        const Cell& c = cell.cell;
        for (const auto& t : cell.trials) {
            out += std::to_string(c.pop_size) + "," + num(c.c1) + "," + num(c.c2) + "," +
                   std::to_string(c.initial_iterations) + "," + (c.hybrid ? "llm-pso" : "pso") + "," +
                   std::to_string(t.trial) + "," + std::to_string(t.seed) + ",";
            if (!t.report) {
                out += "failed,,,\n";
                continue;
            }
            out += std::string(t.report->converged ? "converged" : "not-converged") + "," +
                   std::to_string(t.report->iterations_used) + "," +
                   std::to_string(t.report->model_calls) + "," + num(t.report->global_best_cost) + "\n";
        }
    }
    return out;
}

std::string to_json(const ExperimentResults& results) {
    return json(results).dump(2) + "\n";
}

std::string run_report_json(const RunReport& report) { return json(report).dump(2) + "\n"; }

ExperimentResults results_from_json(const std::string& text) {
    try {
        return json::parse(text).get<ExperimentResults>();
    } catch (const json::exception& e) {
        throw io_error(std::string("malformed results document: ") + e.what());
    }
}

ExperimentResults load_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return results_from_json(buf.str());
}

std::filesystem::path samples_path(const std::filesystem::path& path) {
    std::filesystem::path out = path;
    out.replace_filename(path.stem().string() + ".samples.csv");
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + path.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw io_error("failed writing " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw io_error("cannot move report into place at " + path.string() + ": " + ec.message());
    }
}

void emit_report(const ExperimentResults& results, ReportFormat format,
                 const std::filesystem::path& path) {
    if (results.cells.empty()) throw config_error("no results to report");
    if (format == ReportFormat::json) {
        write_file_atomic(path, to_json(results));
        return;
    }
    const std::string table = to_csv(results);
    const std::string raw = samples_csv(results);
    write_file_atomic(samples_path(path), raw);
    write_file_atomic(path, table);
}

}  // namespace llmpso
