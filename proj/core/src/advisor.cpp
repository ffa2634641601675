#include "llmpso/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include "json_convert.hpp"
#include "llmpso/errors.hpp"
#include "llmpso/swarm.hpp"

namespace llmpso {

SwarmSnapshot snapshot_of(const Swarm& swarm) {
    SwarmSnapshot snap;
    snap.space = swarm.space;
    snap.particles.reserve(swarm.particles.size());
    for (const auto& p : swarm.particles) {
        snap.particles.push_back({swarm.space.to_candidate(p.position), p.velocity, p.current_cost});
    }
    return snap;
}

namespace {

std::string trim_decimals(std::string s) {
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

void check_particle(const SearchSpace& space, const ParticleSummary& p, std::size_t index) {
    if (p.position.size() != space.size() || p.velocity.size() != space.size()) {
        throw config_error("snapshot particle " + std::to_string(index) + " has " +
                           std::to_string(p.position.size()) + " position and " +
                           std::to_string(p.velocity.size()) + " velocity components, space has " +
                           std::to_string(space.size()));
    }
}

}  // namespace

std::string format_cost(double cost) { return fixed(cost, 4); }

std::string format_velocity(double velocity) { return trim_decimals(fixed(velocity, 2)); }

std::string format_position(double value, bool integral) {
    if (integral) return trim_decimals(fixed(std::round(value), 0));
    return trim_decimals(fixed(value, 4));
}

std::string render_particle_string(const SwarmSnapshot& snapshot) {
    std::string out;
    for (std::size_t i = 0; i < snapshot.particles.size(); ++i) {
        const auto& p = snapshot.particles[i];
        check_particle(snapshot.space, p, i);
        for (std::size_t k = 0; k < snapshot.space.size(); ++k) {
            if (!out.empty()) out += ", ";
            out += format_position(p.position[k], snapshot.space[k].integral);
        }
        for (double v : p.velocity) out += ", " + format_velocity(v);
        out += ", " + format_cost(p.cost);
    }
    return out;
}

std::string build_prompt(const SwarmSnapshot& snapshot) {
    const SearchSpace& space = snapshot.space;
    if (space.size() != 2) {
        throw config_error("prompt needs a two-axis (neurons, layers) space, got " +
                           std::to_string(space.size()) + " axes");
    }
    if (snapshot.particles.empty()) throw config_error("snapshot has no particles");

    const std::string npop = std::to_string(snapshot.npop());
    const auto bound = [&](std::size_t k, double v) { return format_position(v, space[k].integral); };

    std::string prompt;
    prompt += "Below is the string showing the best number of neurons as the first entry and best "
              "number of layers as the second entry of the DL model for ";
    prompt += npop;
    prompt += " particles with their corresponding cost as the fifth entry, while dynamically "
              "updating the number of neurons and layers to reduce the cost for the same model "
              "using Particle Swarm Optimization. The third and the fourth entries are the neurons "
              "velocities and layers velocities, respectively. The first entry (Neurons) of the "
              "string ranges from ";
    prompt += bound(0, space[0].min) + " to " + bound(0, space[0].max);
    prompt += ", while the second entry (Layers) of the string ranges from ";
    prompt += bound(1, space[1].min) + " to " + bound(1, space[1].max) + ".";
    prompt += "\n\n";
    prompt += render_particle_string(snapshot);
    prompt += "\n\n";
    prompt += "Give me exactly " + npop +
              " more number of neurons and layers for the same model in order to reduce the cost "
              "further. Your response must be exactly in the same format as input and must contain "
              "only values. Your response must not contain the cost values.";
    return prompt;
}

std::string render_response(std::span<const Suggestion> suggestions, const SearchSpace& space) {
    std::string out;
    for (const auto& s : suggestions) {
        for (std::size_t k = 0; k < space.size(); ++k) {
            if (!out.empty()) out += ", ";
            out += format_position(s.position[k], space[k].integral);
        }
        if (s.velocity) {
            for (double v : *s.velocity) out += ", " + format_velocity(v);
        }
    }
    return out;
}

std::vector<Suggestion> parse_response(const std::string& text, std::size_t npop,
                                       const SearchSpace& space) {
    static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");

    std::vector<double> tokens;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number);
         it != std::sregex_iterator(); ++it) {
        tokens.push_back(std::strtod(it->str().c_str(), nullptr));
    }

    const std::size_t d = space.size();
    std::size_t stride = 0;
    if (npop > 0 && tokens.size() == 2 * d * npop) {
        stride = 2 * d;
    } else if (npop > 0 && tokens.size() == d * npop) {
        stride = d;
    } else {
        throw parse_error("expected " + std::to_string(2 * d * npop) + " or " +
                              std::to_string(d * npop) + " numbers, found " +
                              std::to_string(tokens.size()),
                          text);
    }

    std::vector<Suggestion> out(npop);
    for (std::size_t i = 0; i < npop; ++i) {
        const double* rec = tokens.data() + i * stride;
        Suggestion& s = out[i];
        s.position.assign(rec, rec + d);
        for (std::size_t k = 0; k < d; ++k) {
            if (!std::isfinite(s.position[k])) throw parse_error("non-finite value in response", text);
            const double clipped = std::clamp(s.position[k], space[k].min, space[k].max);
            if (clipped != s.position[k]) s.clipped = true;
            s.position[k] = space[k].integral ? std::round(clipped) : clipped;
        }
        if (stride == 2 * d) {
            std::vector<double> v(rec + d, rec + 2 * d);
            for (std::size_t k = 0; k < d; ++k) {
                if (!std::isfinite(v[k])) throw parse_error("non-finite value in response", text);
                const double clamped = std::clamp(v[k], -space[k].v_max, space[k].v_max);
                if (clamped != v[k]) s.clipped = true;
                v[k] = clamped;
            }
            s.velocity = std::move(v);
        }
    }
    return out;
}

std::vector<Suggestion> heuristic_mock_suggest(const SwarmSnapshot& snapshot, rng_type& rng,
                                               const std::optional<std::vector<double>>& optimum,
                                               double radius_fraction) {
    const SearchSpace& space = snapshot.space;
    if (snapshot.particles.empty()) throw config_error("snapshot has no particles");
    for (std::size_t i = 0; i < snapshot.particles.size(); ++i) {
        check_particle(space, snapshot.particles[i], i);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < snapshot.particles.size(); ++i) {
        if (snapshot.particles[i].cost < snapshot.particles[best].cost) best = i;
    }
    const auto& centre = snapshot.particles[best].position;

    std::vector<Suggestion> out;
    out.reserve(snapshot.npop());
    for (std::size_t i = 0; i < snapshot.npop(); ++i) {
        Suggestion s;
        s.position.resize(space.size());
        std::vector<double> v(space.size());
        for (std::size_t k = 0; k < space.size(); ++k) {
            const Axis& axis = space[k];
            const double r = radius_fraction * (axis.max - axis.min);
            double x = std::clamp(uniform(rng, centre[k] - r, centre[k] + r), axis.min, axis.max);
            if (axis.integral) x = std::round(x);
            s.position[k] = x;
            v[k] = std::round(uniform(rng, -axis.v_max, axis.v_max) * 100.0) / 100.0;
        }
        s.velocity = std::move(v);
        out.push_back(std::move(s));
    }

    if (optimum) {
        if (optimum->size() != space.size()) throw config_error("optimum does not match the space");
        out.front().position = space.to_candidate(*optimum);
        out.front().velocity = std::vector<double>(space.size(), 0.0);
    }
    return out;
}

namespace {

std::vector<Suggestion> random_suggestions(const SearchSpace& space, std::size_t npop,
                                           rng_type& rng) {
    std::vector<Suggestion> out(npop);
    for (auto& s : out) {
        s.position.resize(space.size());
        for (std::size_t k = 0; k < space.size(); ++k) {
            const Axis& axis = space[k];
            if (axis.integral) {
                const double levels = axis.max - axis.min + 1.0;
                s.position[k] = std::min(axis.max, axis.min + std::floor(uniform01(rng) * levels));
            } else {
                s.position[k] = uniform(rng, axis.min, axis.max);
            }
        }
    }
    return out;
}

}  // namespace

AdvisorExchange suggest(AdvisorBackend& backend, const SwarmSnapshot& snapshot,
                        rng_type& fallback_rng, const AdvisorConfig& config) {
    if (config.max_attempts == 0) throw config_error("advisor needs at least one attempt");

    AdvisorExchange exchange;
    exchange.backend = backend.info();
    exchange.prompt = build_prompt(snapshot);

    bool any_reply = false;
    for (std::size_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
        exchange.attempts = attempt;
        try {
            exchange.raw_response = backend.complete({snapshot, exchange.prompt, attempt});
            any_reply = true;
            exchange.parsed = parse_response(exchange.raw_response, snapshot.npop(), snapshot.space);
            return exchange;
        } catch (const parse_error& e) {
            exchange.failures.push_back(std::string("parse: ") + e.what());
        } catch (const protocol_error& e) {
            any_reply = true;
            exchange.raw_response = e.raw();
            exchange.failures.push_back(std::string("protocol: ") + e.what());
        } catch (const transport_error& e) {
            exchange.failures.push_back(std::string("transport: ") + e.what());
        }
    }

    if (!any_reply) {
        throw advisor_error(exchange.backend.name + " unreachable after " +
                            std::to_string(config.max_attempts) + " attempt(s): " +
                            exchange.failures.back());
    }
    exchange.fallback = true;
    exchange.parsed = random_suggestions(snapshot.space, snapshot.npop(), fallback_rng);
    return exchange;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {
    out_.open(path_, std::ios::app);
    if (!out_) throw io_error("cannot open audit log " + path_.string());
}

void AuditLog::append(const AdvisorExchange& exchange, std::uint64_t run_seed,
                      std::size_t iteration) {
    json line = exchange;
    line["seed"] = run_seed;
    line["iteration"] = iteration;
    std::lock_guard lock(mutex_);
    out_ << line.dump() << '\n';
    out_.flush();
    if (!out_) throw io_error("cannot write audit log " + path_.string());
    ++records_;
}

std::size_t AuditLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

}  // namespace llmpso
