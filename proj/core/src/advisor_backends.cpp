#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "llmpso/advisor.hpp"
#include "llmpso/errors.hpp"
#include "llmpso/external.hpp"

namespace llmpso {

using nlohmann::json;

MockAdvisor::MockAdvisor(std::uint64_t seed, std::optional<std::vector<double>> optimum,
                         double radius_fraction)
    : rng_(seed), optimum_(std::move(optimum)), radius_fraction_(radius_fraction) {}

BackendInfo MockAdvisor::info() const {
    return {optimum_ ? "mock-oracle" : "mock", "heuristic", std::nullopt};
}

std::string MockAdvisor::complete(const AdvisorRequest& request) {
    const auto suggestions = heuristic_mock_suggest(request.snapshot, rng_, optimum_, radius_fraction_);
    return render_response(suggestions, request.snapshot.space);
}

ScriptedAdvisor::ScriptedAdvisor(std::vector<std::string> responses, std::string label)
    : responses_(std::move(responses)), label_(std::move(label)) {}

ScriptedAdvisor ScriptedAdvisor::from_file(const std::filesystem::path& transcript) {
    std::ifstream in(transcript);
    if (!in) throw config_error("cannot read transcript " + transcript.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return ScriptedAdvisor(std::move(lines), "scripted:" + transcript.string());
}

BackendInfo ScriptedAdvisor::info() const { return {label_, "transcript", std::nullopt}; }

std::string ScriptedAdvisor::complete(const AdvisorRequest&) {
    if (next_ >= responses_.size()) throw transport_error("transcript exhausted");
    return responses_[next_++];
}

HttpChatAdvisor::HttpChatAdvisor(HttpAdvisorConfig config) : config_(std::move(config)) {
    split_url(config_.base_url);
    if (config_.api_key.empty()) {
        if (const char* key = std::getenv("ADVISOR_API_KEY")) config_.api_key = key;
    }
}

BackendInfo HttpChatAdvisor::info() const {
    return {"http:" + config_.base_url, config_.model, config_.temperature};
}

std::string HttpChatAdvisor::request_body(const std::string& model, const std::string& prompt,
                                          double temperature) {
    json body = {
        {"model", model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", temperature},
    };
    return body.dump();
}

std::string HttpChatAdvisor::extract_content(const std::string& body) {
    json reply;
    try {
        reply = json::parse(body);
    } catch (const json::parse_error&) {
        throw protocol_error("chat completion is not JSON", body);
    }
    try {
        const json& content = reply.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw protocol_error("message content is not a string", body);
        return content.get<std::string>();
    } catch (const json::exception&) {
        throw protocol_error("chat completion has no choices[0].message.content", body);
    }
}

std::string HttpChatAdvisor::complete(const AdvisorRequest& request) {
    const UrlParts url = split_url(config_.base_url);
    httplib::Client client(url.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(url.path + "/v1/chat/completions", headers,
                           request_body(config_.model, request.prompt, config_.temperature),
                           "application/json");
    if (!res) throw transport_error("chat completion request failed: " + httplib::to_string(res.error()));
    if (res->status >= 500 || res->status == 429) {
        throw transport_error("chat completion answered HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw protocol_error("chat completion answered HTTP " + std::to_string(res->status), res->body);
    }
    return extract_content(res->body);
}

}  // namespace llmpso
