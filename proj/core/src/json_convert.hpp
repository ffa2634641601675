#pragma once

// nlohmann/json bindings for the report types. Internal to the library.

#include <optional>

#include <json.hpp>

#include "llmpso/advisor.hpp"
#include "llmpso/experiment.hpp"
#include "llmpso/hybrid.hpp"
#include "llmpso/statistics.hpp"

namespace nlohmann {

template <typename T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& value) {
        if (value) {
            j = *value;
        } else {
            j = nullptr;
        }
    }
    static void from_json(const json& j, std::optional<T>& value) {
        if (j.is_null()) {
            value.reset();
        } else {
            value = j.get<T>();
        }
    }
};

}  // namespace nlohmann

namespace llmpso {

using nlohmann::json;

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        out.reset();
    } else {
        out = it->get<T>();
    }
}

inline void to_json(json& j, const Suggestion& s) {
    j = json{{"position", s.position}, {"velocity", s.velocity}, {"clipped", s.clipped}};
}
inline void from_json(const json& j, Suggestion& s) {
    j.at("position").get_to(s.position);
    read_optional(j, "velocity", s.velocity);
    s.clipped = j.value("clipped", false);
}

inline void to_json(json& j, const BackendInfo& b) {
    j = json{{"name", b.name}, {"model", b.model}, {"temperature", b.temperature}};
}
inline void from_json(const json& j, BackendInfo& b) {
    j.at("name").get_to(b.name);
    j.at("model").get_to(b.model);
    read_optional(j, "temperature", b.temperature);
}

inline void to_json(json& j, const AdvisorExchange& e) {
    j = json{{"prompt", e.prompt},     {"raw_response", e.raw_response}, {"parsed", e.parsed},
             {"attempts", e.attempts}, {"backend", e.backend},           {"fallback", e.fallback},
             {"failures", e.failures}};
}
inline void from_json(const json& j, AdvisorExchange& e) {
    j.at("prompt").get_to(e.prompt);
    j.at("raw_response").get_to(e.raw_response);
    j.at("parsed").get_to(e.parsed);
    j.at("attempts").get_to(e.attempts);
    j.at("backend").get_to(e.backend);
    j.at("fallback").get_to(e.fallback);
    j.at("failures").get_to(e.failures);
}

inline void to_json(json& j, const CoefficientConfig& c) {
    j = json{{"w", c.w}, {"c1", c.c1}, {"c2", c.c2}};
}
inline void from_json(const json& j, CoefficientConfig& c) {
    c.w = j.value("w", c.w);
    c.c1 = j.value("c1", c.c1);
    c.c2 = j.value("c2", c.c2);
}

inline void to_json(json& j, const TrajectoryPoint& p) {
    j = json{{"iteration", p.iteration}, {"cost", p.cost}, {"model_calls", p.model_calls},
             {"injection", p.injection}};
}
inline void from_json(const json& j, TrajectoryPoint& p) {
    j.at("iteration").get_to(p.iteration);
    j.at("cost").get_to(p.cost);
    j.at("model_calls").get_to(p.model_calls);
    j.at("injection").get_to(p.injection);
}

inline void to_json(json& j, const InjectionRecord& r) {
    j = json{{"iteration", r.iteration},
             {"replaced_indices", r.replaced_indices},
             {"suggestion_costs", r.suggestion_costs},
             {"gbest_before", r.gbest_before},
             {"gbest_after", r.gbest_after}};
}
inline void from_json(const json& j, InjectionRecord& r) {
    j.at("iteration").get_to(r.iteration);
    j.at("replaced_indices").get_to(r.replaced_indices);
    j.at("suggestion_costs").get_to(r.suggestion_costs);
    j.at("gbest_before").get_to(r.gbest_before);
    j.at("gbest_after").get_to(r.gbest_after);
}

inline void to_json(json& j, const ExchangeRecord& r) {
    j = json{{"iteration", r.iteration}, {"exchange", r.exchange}};
}
inline void from_json(const json& j, ExchangeRecord& r) {
    j.at("iteration").get_to(r.iteration);
    j.at("exchange").get_to(r.exchange);
}

void to_json(json& j, const RunReport& r);
void from_json(const json& j, RunReport& r);

inline void to_json(json& j, const TrialStatistics& s) {
    j = json{{"samples", s.samples}, {"mean", s.mean},       {"std", s.std},
             {"ci_low", s.ci_low},   {"ci_high", s.ci_high}, {"n", s.n},
             {"degenerate", s.degenerate}};
}
inline void from_json(const json& j, TrialStatistics& s) {
    j.at("samples").get_to(s.samples);
    j.at("mean").get_to(s.mean);
    j.at("std").get_to(s.std);
    j.at("ci_low").get_to(s.ci_low);
    j.at("ci_high").get_to(s.ci_high);
    j.at("n").get_to(s.n);
    j.at("degenerate").get_to(s.degenerate);
}

inline void to_json(json& j, const Cell& c) {
    j = json{{"pop_size", c.pop_size}, {"c1", c.c1}, {"c2", c.c2},
             {"initial_iterations", c.initial_iterations}, {"hybrid", c.hybrid}};
}
inline void from_json(const json& j, Cell& c) {
    j.at("pop_size").get_to(c.pop_size);
    j.at("c1").get_to(c.c1);
    j.at("c2").get_to(c.c2);
    j.at("initial_iterations").get_to(c.initial_iterations);
    j.at("hybrid").get_to(c.hybrid);
}

inline void to_json(json& j, const TrialOutcome& t) {
    j = json{{"trial", t.trial}, {"seed", t.seed}, {"report", t.report}, {"error", t.error}};
}
inline void from_json(const json& j, TrialOutcome& t) {
    j.at("trial").get_to(t.trial);
    j.at("seed").get_to(t.seed);
    read_optional(j, "report", t.report);
    j.at("error").get_to(t.error);
}

inline void to_json(json& j, const CellResult& c) {
    j = json{{"cell", c.cell},
             {"trials", c.trials},
             {"iterations", c.iterations},
             {"model_calls", c.model_calls},
             {"final_cost", c.final_cost},
             {"converged", c.converged},
             {"not_converged", c.not_converged},
             {"failed", c.failed}};
}
inline void from_json(const json& j, CellResult& c) {
    j.at("cell").get_to(c.cell);
    j.at("trials").get_to(c.trials);
    read_optional(j, "iterations", c.iterations);
    read_optional(j, "model_calls", c.model_calls);
    read_optional(j, "final_cost", c.final_cost);
    j.at("converged").get_to(c.converged);
    j.at("not_converged").get_to(c.not_converged);
    j.at("failed").get_to(c.failed);
}

inline void to_json(json& j, const PairedComparison& p) {
    j = json{{"pso_cell", p.pso_cell}, {"hybrid_cell", p.hybrid_cell}, {"seeds", p.seeds},
             {"model_call_deltas", p.model_call_deltas}};
}
inline void from_json(const json& j, PairedComparison& p) {
    j.at("pso_cell").get_to(p.pso_cell);
    j.at("hybrid_cell").get_to(p.hybrid_cell);
    j.at("seeds").get_to(p.seeds);
    j.at("model_call_deltas").get_to(p.model_call_deltas);
}

void to_json(json& j, const ExperimentResults& r);
void from_json(const json& j, ExperimentResults& r);

}  // namespace llmpso
