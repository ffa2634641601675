#include "llmpso/external.hpp"

#include <httplib.h>

#include "llmpso/errors.hpp"

namespace llmpso {

UrlParts split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw config_error("url needs a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    UrlParts parts;
    parts.origin = url.substr(0, slash);
    if (slash != std::string::npos) parts.path = url.substr(slash);
    while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
    if (parts.origin.size() <= scheme + 3) throw config_error("url has no host: " + url);
    return parts;
}

ExternalHttpObjective::ExternalHttpObjective(std::string base_url, SearchSpace space,
                                             ExternalBackendConfig config)
    : base_url_(std::move(base_url)), space_(std::move(space)), config_(config) {
    split_url(base_url_);
}

double ExternalHttpObjective::cost(std::span<const double> candidate) {
    const UrlParts url = split_url(base_url_);
    httplib::Client client(url.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    const int attempts = 1 + std::max(0, config_.retries);
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        const std::int64_t id = next_id_.fetch_add(1);
        const std::string body = encode_evaluation_request(id, space_, candidate);
        auto res = client.Post(url.path + "/evaluate", body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            throw protocol_error("evaluator answered HTTP " + std::to_string(res->status), res->body);
        }
        return decode_evaluation_reply(res->body, id);
    }
    throw evaluation_error("external evaluator " + base_url_ + " failed after " +
                           std::to_string(attempts) + " attempt(s): " + last_error);
}

}  // namespace llmpso
