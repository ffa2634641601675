#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llmpso/random.hpp"
#include "llmpso/search_space.hpp"

namespace llmpso {

struct Swarm;

struct ParticleSummary {
    std::vector<double> position;  ///< rounded candidate
    std::vector<double> velocity;
    double cost = 0.0;

    bool operator==(const ParticleSummary&) const = default;
};

/// What the advisor is shown: one entry per particle, in particle order.
struct SwarmSnapshot {
    SearchSpace space;
    std::vector<ParticleSummary> particles;

    std::size_t npop() const noexcept { return particles.size(); }
};

SwarmSnapshot snapshot_of(const Swarm& swarm);

struct Suggestion {
    std::vector<double> position;
    std::optional<std::vector<double>> velocity;
    bool clipped = false;  ///< some value was outside the space and got clipped

    bool operator==(const Suggestion&) const = default;
};

// Number rendering used in prompts and responses.
std::string format_cost(double cost);                  // exactly 4 decimals
std::string format_velocity(double velocity);          // up to 2 decimals, zeros trimmed
std::string format_position(double value, bool integral);

/// Flat "pos..., vel..., cost" list, particles joined with ", ".
std::string render_particle_string(const SwarmSnapshot& snapshot);

/// The full advisor prompt for a two-axis (neurons, layers) snapshot.
/// Throws config_error when a particle does not match the space.
std::string build_prompt(const SwarmSnapshot& snapshot);

/// Renders suggestions in the response format the prompt asks for
/// (positions then velocities, no costs).
std::string render_response(std::span<const Suggestion> suggestions, const SearchSpace& space);

/// Pulls numeric tokens out of free text and groups them per particle:
/// 2*d tokens (positions + velocities) or d tokens (positions only).
/// Values outside the space are clipped and flagged. Throws parse_error.
std::vector<Suggestion> parse_response(const std::string& text, std::size_t npop,
                                       const SearchSpace& space);

/// Suggestions drawn uniformly from a box around the lowest-cost particle,
/// half-width `radius_fraction` of each axis range, clipped to the space.
/// With `optimum` set, the first suggestion is that point.
std::vector<Suggestion> heuristic_mock_suggest(const SwarmSnapshot& snapshot, rng_type& rng,
                                               const std::optional<std::vector<double>>& optimum = {},
                                               double radius_fraction = 0.1);

struct AdvisorRequest {
    const SwarmSnapshot& snapshot;
    const std::string& prompt;
    std::size_t attempt;  ///< 1-based
};

struct BackendInfo {
    std::string name;
    std::string model;
    std::optional<double> temperature;

    bool operator==(const BackendInfo&) const = default;
};

/// Something that answers a prompt with text. Throws transport_error when it
/// cannot produce a reply and protocol_error when the reply envelope is bad.
class AdvisorBackend {
public:
    virtual ~AdvisorBackend() = default;
    virtual BackendInfo info() const = 0;
    virtual std::string complete(const AdvisorRequest& request) = 0;
};

/// Seeded offline stand-in for a chat model. Answers with heuristic_mock_suggest
/// rendered as text, so replies go through the same parser as real ones.
class MockAdvisor final : public AdvisorBackend {
public:
    explicit MockAdvisor(std::uint64_t seed, std::optional<std::vector<double>> optimum = {},
                         double radius_fraction = 0.1);

    BackendInfo info() const override;
    std::string complete(const AdvisorRequest& request) override;

private:
    rng_type rng_;
    std::optional<std::vector<double>> optimum_;
    double radius_fraction_;
};

/// Replays a transcript: one response body per line, consumed in order.
class ScriptedAdvisor final : public AdvisorBackend {
public:
    explicit ScriptedAdvisor(std::vector<std::string> responses, std::string label = "scripted");
    static ScriptedAdvisor from_file(const std::filesystem::path& transcript);

    BackendInfo info() const override;
    std::string complete(const AdvisorRequest& request) override;

    std::size_t remaining() const noexcept { return responses_.size() - next_; }

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::string label_;
};

struct HttpAdvisorConfig {
    std::string base_url;
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.7;
    /// Empty means read ADVISOR_API_KEY from the environment.
    std::string api_key;
    std::chrono::milliseconds timeout{60000};
};

/// OpenAI-compatible POST <base>/v1/chat/completions.
class HttpChatAdvisor final : public AdvisorBackend {
public:
    explicit HttpChatAdvisor(HttpAdvisorConfig config);

    BackendInfo info() const override;
    std::string complete(const AdvisorRequest& request) override;

    /// Request body for a single-user-message completion.
    static std::string request_body(const std::string& model, const std::string& prompt,
                                    double temperature);
    /// choices[0].message.content, or protocol_error.
    static std::string extract_content(const std::string& body);

private:
    HttpAdvisorConfig config_;
};

struct AdvisorConfig {
    std::size_t max_attempts = 3;
};

struct AdvisorExchange {
    std::string prompt;
    std::string raw_response;  ///< last response received
    std::vector<Suggestion> parsed;
    std::size_t attempts = 0;
    BackendInfo backend;
    bool fallback = false;
    std::vector<std::string> failures;  ///< one message per failed attempt

    bool operator==(const AdvisorExchange&) const = default;
};

/// Prompt, ask, parse. Parse and protocol failures are retried with a fresh
/// request; once attempts run out the exchange falls back to uniform random
/// in-bounds suggestions drawn from `fallback_rng`. If every attempt failed
/// in transport, advisor_error is thrown instead.
AdvisorExchange suggest(AdvisorBackend& backend, const SwarmSnapshot& snapshot,
                        rng_type& fallback_rng, const AdvisorConfig& config = {});

/// Appends exchanges as JSON lines. Safe to share between runs.
class AuditLog {
public:
    explicit AuditLog(std::filesystem::path path);

    void append(const AdvisorExchange& exchange, std::uint64_t run_seed, std::size_t iteration);
    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t records() const;

private:
    std::filesystem::path path_;
    std::ofstream out_;
    mutable std::mutex mutex_;
    std::size_t records_ = 0;
};

}  // namespace llmpso
