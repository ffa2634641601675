#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include "llmpso/objective.hpp"

namespace llmpso {

struct ExternalBackendConfig {
    std::chrono::milliseconds timeout{30000};
    /// Extra attempts after a timeout.
    int retries = 1;
    bool reentrant = false;
};

/// Request line/body for one candidate:
/// {"id": <int>, "candidate": {"<axis>": <value>, ...}} with axes in space order.
std::string encode_evaluation_request(std::int64_t id, const SearchSpace& space,
                                      std::span<const double> candidate);

/// Parses {"id": <int>, "cost": <float>}. A reply carrying "accuracy" instead
/// of "cost" is converted to cost = 1 - accuracy. Throws protocol_error.
double decode_evaluation_reply(const std::string& raw, std::int64_t expected_id);

/// Child process speaking newline-delimited JSON on stdin/stdout.
/// The child is started lazily and restarted after a timeout.
class ExternalProcessObjective final : public Objective {
public:
    ExternalProcessObjective(std::string command, SearchSpace space,
                             ExternalBackendConfig config = {});
    ~ExternalProcessObjective() override;

    std::string kind() const override { return "external-process"; }
    bool reentrant() const override { return config_.reentrant; }
    double cost(std::span<const double> candidate) override;

private:
    struct Child;

    void start();
    void stop();

    std::string command_;
    SearchSpace space_;
    ExternalBackendConfig config_;
    std::unique_ptr<Child> child_;
    std::mutex mutex_;
    std::int64_t next_id_ = 1;
};

/// POST <base>/evaluate with the same body as the process protocol.
class ExternalHttpObjective final : public Objective {
public:
    ExternalHttpObjective(std::string base_url, SearchSpace space,
                          ExternalBackendConfig config = {});

    std::string kind() const override { return "external-http"; }
    bool reentrant() const override { return config_.reentrant; }
    double cost(std::span<const double> candidate) override;

private:
    std::string base_url_;
    SearchSpace space_;
    ExternalBackendConfig config_;
    std::atomic<std::int64_t> next_id_{1};
};

/// Splits "http://host:port/prefix" into origin and path prefix.
struct UrlParts {
    std::string origin;  ///< scheme://host[:port]
    std::string path;    ///< prefix without trailing slash, may be empty
};
UrlParts split_url(const std::string& url);

}  // namespace llmpso
