#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "llmpso/advisor.hpp"
#include "llmpso/errors.hpp"
#include "llmpso/swarm.hpp"
#include "test_support.hpp"

using namespace llmpso;

namespace {

SwarmSnapshot paper_snapshot() {
    SwarmSnapshot s;
    s.space = SearchSpace::neurons_layers();
    s.particles = {
        {{80, 3}, {1.6, 1.2}, 0.1342},
        {{120, 4}, {1.8, 1.5}, 0.1030},
        {{95, 2}, {1.6, 1.0}, 0.0012},
        {{60, 3}, {-0.5, 0.25}, 0.2},
        {{180, 5}, {0.0, -1.0}, 0.15},
    };
    return s;
}

SwarmSnapshot snapshot_with_best(double neurons, double layers) {
    SwarmSnapshot s = paper_snapshot();
    for (auto& p : s.particles) p.cost = 0.5;
    s.particles[2] = {{neurons, layers}, {0.0, 0.0}, 0.01};
    return s;
}

class FailingBackend final : public AdvisorBackend {
public:
    explicit FailingBackend(bool transport) : transport_(transport) {}
    BackendInfo info() const override { return {"failing", "none", std::nullopt}; }
    std::string complete(const AdvisorRequest&) override {
        ++calls;
        if (transport_) throw transport_error("down");
        return "sorry, here are values: 10";
    }
    int calls = 0;

private:
    bool transport_;
};

const char* const compliant =
    "150, 3, 1.6, 1.2, 120, 4, 1.8, 1.5, 95, 2, 1.6, 1, 60, 3, 1.1, 0.9, 180, 5, 2.0, 1.4";

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_cost(0.103) == "0.1030");
    CHECK(format_cost(0.0012) == "0.0012");
    CHECK(format_velocity(1.0) == "1");
    CHECK(format_velocity(1.2) == "1.2");
    CHECK(format_velocity(1.234) == "1.23");
    CHECK(format_velocity(-0.001) == "0");
    CHECK(format_velocity(-1.5) == "-1.5");
    CHECK(format_position(80.0, true) == "80");
    CHECK(format_position(79.6, true) == "80");
}

TEST_CASE("prompt golden fragment") {
    const std::string prompt = build_prompt(paper_snapshot());
    CHECK(prompt.find("80, 3, 1.6, 1.2, 0.1342, 120, 4, 1.8, 1.5, 0.1030, 95, 2, 1.6, 1, 0.0012") !=
          std::string::npos);
    CHECK(prompt.find("exactly 5 more number of neurons") != std::string::npos);
    CHECK(prompt.find("for 5 particles") != std::string::npos);
    CHECK(prompt.find("ranges from 2 to 200") != std::string::npos);
    CHECK(prompt.find("ranges from 2 to 5.") != std::string::npos);
    CHECK(prompt.find("\n\n80, 3,") != std::string::npos);
    CHECK(prompt.find("0.1500\n\nGive me") != std::string::npos);
    CHECK(prompt == build_prompt(paper_snapshot()));
}

TEST_CASE("prompt rejects mismatched snapshots") {
    SwarmSnapshot s = paper_snapshot();
    s.particles[1].velocity = {1.0};
    CHECK_THROWS_AS(build_prompt(s), config_error);
    SwarmSnapshot wrong = paper_snapshot();
    wrong.space = SearchSpace::rastrigin(3);
    CHECK_THROWS_AS(build_prompt(wrong), config_error);
    CHECK_THROWS_AS(build_prompt(SwarmSnapshot{SearchSpace::neurons_layers(), {}}), config_error);
}

TEST_CASE("parse four values per particle") {
    const auto parsed = parse_response(compliant, 5, SearchSpace::neurons_layers());
    REQUIRE(parsed.size() == 5);
    CHECK(parsed[0].position == std::vector<double>{150, 3});
    REQUIRE(parsed[0].velocity);
    CHECK(*parsed[0].velocity == std::vector<double>{1.6, 1.0});
    CHECK(parsed[0].clipped);  // 1.2 exceeds the layer velocity limit
    CHECK(parsed[4].position == std::vector<double>{180, 5});
    CHECK(*parsed[2].velocity == std::vector<double>{1.6, 1.0});
    CHECK_FALSE(parsed[2].clipped);
}

TEST_CASE("parse two values per particle") {
    const auto parsed =
        parse_response("150, 3, 120, 4, 95, 2, 60, 3, 180, 5", 5, SearchSpace::neurons_layers());
    REQUIRE(parsed.size() == 5);
    for (const auto& s : parsed) CHECK_FALSE(s.velocity.has_value());
    CHECK(parsed[3].position == std::vector<double>{60, 3});
}

TEST_CASE("parse tolerates prose and clips out-of-range values") {
    const auto parsed = parse_response("Sure! [[250, 7], [1, 0], [120, 3], [95.4, 2.6], [-3, 4]]", 5,
                                       SearchSpace::neurons_layers());
    CHECK(parsed[0].position == std::vector<double>{200, 5});
    CHECK(parsed[0].clipped);
    CHECK(parsed[1].position == std::vector<double>{2, 2});
    CHECK(parsed[2].position == std::vector<double>{120, 3});
    CHECK_FALSE(parsed[2].clipped);
    CHECK(parsed[3].position == std::vector<double>{95, 3});
    CHECK(parsed[4].position == std::vector<double>{2, 4});
}

TEST_CASE("parse errors carry the raw text") {
    try {
        parse_response("sorry, here are values: 10", 5, SearchSpace::neurons_layers());
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.raw() == "sorry, here are values: 10");
    }
    CHECK_THROWS_AS(parse_response("1, 2, 3", 5, SearchSpace::neurons_layers()), parse_error);
    CHECK_THROWS_AS(parse_response("", 5, SearchSpace::neurons_layers()), parse_error);
}

TEST_CASE("render and parse round trip") {
    const std::vector<Suggestion> s{
        {{150, 3}, std::vector<double>{1.6, 0.5}, false},
        {{2, 5}, std::vector<double>{-12.25, -1}, false},
    };
    const auto space = SearchSpace::neurons_layers();
    CHECK(render_response(s, space) == "150, 3, 1.6, 0.5, 2, 5, -12.25, -1");
    CHECK(parse_response(render_response(s, space), 2, space) == s);
}

TEST_CASE("mock suggestions stay in the box around the best particle") {
    const auto snap = snapshot_with_best(95, 2);
    rng_type rng(7);
    for (int round = 0; round < 50; ++round) {
        const auto suggestions = heuristic_mock_suggest(snap, rng);
        REQUIRE(suggestions.size() == 5);
        for (const auto& s : suggestions) {
            CHECK(s.position[0] >= 75);
            CHECK(s.position[0] <= 115);
            CHECK(s.position[1] >= 2);
            CHECK(s.position[1] <= 3);
            REQUIRE(s.velocity);
            CHECK(std::abs((*s.velocity)[0]) <= 39.6);
            CHECK(std::abs((*s.velocity)[1]) <= 1.0);
        }
    }
}

TEST_CASE("mock is deterministic per seed") {
    const auto snap = paper_snapshot();
    const std::string prompt = build_prompt(snap);
    MockAdvisor a(7);
    MockAdvisor b(7);
    for (std::size_t i = 1; i <= 3; ++i) {
        const std::string ra = a.complete({snap, prompt, i});
        CHECK(ra == b.complete({snap, prompt, i}));
        CHECK(parse_response(ra, 5, snap.space).size() == 5);
    }
    CHECK(a.info().name == "mock");
}

TEST_CASE("oracle mock puts the optimum first") {
    const auto snap = paper_snapshot();
    rng_type rng(1);
    const auto suggestions = heuristic_mock_suggest(snap, rng, std::vector<double>{120, 3});
    REQUIRE(suggestions.size() == 5);
    CHECK(suggestions[0].position == std::vector<double>{120, 3});

    MockAdvisor oracle(1, std::vector<double>{120, 3});
    CHECK(oracle.info().name == "mock-oracle");
    const auto parsed = parse_response(oracle.complete({snap, build_prompt(snap), 1}), 5, snap.space);
    CHECK(parsed[0].position == std::vector<double>{120, 3});
}

TEST_CASE("suggest happy path with the mock") {
    const auto snap = paper_snapshot();
    MockAdvisor mock(7);
    rng_type fallback(1);
    const AdvisorExchange ex = suggest(mock, snap, fallback);
    CHECK(ex.attempts == 1);
    CHECK_FALSE(ex.fallback);
    CHECK(ex.parsed.size() == 5);
    CHECK(ex.prompt == build_prompt(snap));
    CHECK(ex.failures.empty());
    CHECK(ex.backend.name == "mock");
}

TEST_CASE("parse failures are retried then fall back to random suggestions") {
    const auto snap = paper_snapshot();
    FailingBackend backend(false);
    rng_type fallback(1);
    const AdvisorExchange ex = suggest(backend, snap, fallback, {3});
    CHECK(backend.calls == 3);
    CHECK(ex.attempts == 3);
    CHECK(ex.fallback);
    CHECK(ex.failures.size() == 3);
    REQUIRE(ex.parsed.size() == 5);
    for (const auto& s : ex.parsed) {
        CHECK(snap.space.contains(s.position));
        CHECK_FALSE(s.velocity.has_value());
    }
}

TEST_CASE("a retry can recover") {
    const auto snap = paper_snapshot();
    ScriptedAdvisor scripted({"garbage", compliant});
    rng_type fallback(1);
    const AdvisorExchange ex = suggest(scripted, snap, fallback);
    CHECK(ex.attempts == 2);
    CHECK_FALSE(ex.fallback);
    CHECK(ex.failures.size() == 1);
    CHECK(ex.raw_response == compliant);
}

TEST_CASE("transport failures on every attempt raise advisor_error") {
    FailingBackend backend(true);
    rng_type fallback(1);
    CHECK_THROWS_AS(suggest(backend, paper_snapshot(), fallback), advisor_error);
    CHECK(backend.calls == 3);
}

TEST_CASE("scripted transcript playback") {
    const auto path = std::filesystem::path(TEST_TMP_DIR) / "transcript.txt";
    {
        std::ofstream out(path);
        out << compliant << "\n" << "150, 3, 120, 4, 95, 2, 60, 3, 180, 5\n";
    }
    ScriptedAdvisor scripted = ScriptedAdvisor::from_file(path);
    CHECK(scripted.remaining() == 2);
    const auto snap = paper_snapshot();
    rng_type fallback(1);
    const auto first = suggest(scripted, snap, fallback);
    CHECK(first.parsed == parse_response(compliant, 5, snap.space));
    const auto second = suggest(scripted, snap, fallback);
    CHECK(second.parsed[1].position == std::vector<double>{120, 4});
    CHECK(scripted.remaining() == 0);
    CHECK_THROWS_AS(suggest(scripted, snap, fallback), advisor_error);
    CHECK_THROWS_AS(ScriptedAdvisor::from_file("/nonexistent/transcript"), config_error);
}

TEST_CASE("chat completion envelope") {
    const auto body = nlohmann::json::parse(HttpChatAdvisor::request_body("m", "hi", 0.7));
    CHECK(body["model"] == "m");
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "hi");
    CHECK(body["temperature"].get<double>() == 0.7);
    CHECK(HttpChatAdvisor::extract_content(R"({"choices":[{"message":{"content":"x"}}]})") == "x");
    CHECK_THROWS_AS(HttpChatAdvisor::extract_content(R"({"choices":[]})"), protocol_error);
    CHECK_THROWS_AS(HttpChatAdvisor::extract_content("<html>"), protocol_error);
}

TEST_CASE("http chat advisor against a stub") {
    std::string seen_auth;
    std::string seen_model;
    testing::HttpStub server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            seen_auth = req.get_header_value("Authorization");
            seen_model = nlohmann::json::parse(req.body)["model"];
            const nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", compliant}}}}}}};
            res.set_content(reply.dump(), "application/json");
        });
    });
    HttpAdvisorConfig config;
    config.base_url = server.url();
    config.api_key = "secret";
    config.model = "test-model";
    HttpChatAdvisor advisor(config);
    rng_type fallback(1);
    const auto ex = suggest(advisor, paper_snapshot(), fallback);
    CHECK(ex.attempts == 1);
    CHECK_FALSE(ex.fallback);
    CHECK(ex.parsed.size() == 5);
    CHECK(seen_auth == "Bearer secret");
    CHECK(seen_model == "test-model");
    CHECK(ex.backend.model == "test-model");
    CHECK(ex.backend.temperature == 0.7);
}

TEST_CASE("http chat advisor error statuses") {
    std::atomic<int> calls{0};
    testing::HttpStub server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 503;
        });
        s.Post("/bad/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"nope\": 1}", "application/json");
        });
    });
    HttpAdvisorConfig config;
    config.base_url = server.url();
    config.api_key = "k";
    HttpChatAdvisor down(config);
    rng_type fallback(1);
    CHECK_THROWS_AS(suggest(down, paper_snapshot(), fallback), advisor_error);
    CHECK(calls == 3);

    config.base_url = server.url() + "/bad";
    HttpChatAdvisor bad(config);
    const auto ex = suggest(bad, paper_snapshot(), fallback);
    CHECK(ex.fallback);
    CHECK(ex.parsed.size() == 5);
}

TEST_CASE("audit log appends one JSON line per exchange") {
    const auto path = std::filesystem::path(TEST_TMP_DIR) / "audit.jsonl";
    std::filesystem::remove(path);
    {
        AuditLog log(path);
        MockAdvisor mock(3);
        rng_type fallback(1);
        log.append(suggest(mock, paper_snapshot(), fallback), 11, 2);
        log.append(suggest(mock, paper_snapshot(), fallback), 11, 4);
        CHECK(log.records() == 2);
    }
    std::ifstream in(path);
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line); ++lines) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["seed"] == 11);
        CHECK(j.contains("prompt"));
        CHECK(j.contains("raw_response"));
        CHECK(j["parsed"].size() == 5);
    }
    CHECK(lines == 2);
    CHECK_THROWS_AS(AuditLog("/nonexistent/dir/audit.jsonl"), io_error);
}
