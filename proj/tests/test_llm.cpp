#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "classim/llm.hpp"

using namespace classim;
namespace fs = std::filesystem;

namespace {

llm::ChatRequest request(llm::TemplateId id,
                         std::map<std::string, std::string> vars) {
    llm::ChatRequest req;
    req.template_id = id;
    req.variables = std::move(vars);
    return req;
}

std::string write_fixture_file(const std::string& content) {
    const auto path = fs::temp_directory_path() / "classim_fixtures_test.jsonl";
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST_CASE("template names roundtrip") {
    for (int i = 0; i < 8; ++i) {
        const auto t = static_cast<llm::TemplateId>(i);
        CHECK(llm::template_from_name(llm::template_name(t)) == t);
    }
    CHECK_FALSE(llm::template_from_name("oracle").has_value());
}

TEST_CASE("mock chat output is a pure function of the request") {
    llm::MockGateway gw;
    const auto req = request(llm::TemplateId::lecture,
                             {{"topic", "Probability"}, {"directives", "Speak slowly."}});
    const auto first = gw.chat(req);
    CHECK(first == gw.chat(req));
    CHECK(first.find("Probability") != std::string::npos);
    CHECK(first.find("Speak slowly.") != std::string::npos);
    CHECK(first.find("Key terms:") != std::string::npos);
}

TEST_CASE("mock plan yields five to seven numbered steps that carry the question") {
    llm::MockGateway gw;
    for (const char* style : {"read_write", "visual", "auditory"}) {
        const auto text = gw.chat(request(
            llm::TemplateId::plan,
            {{"question", "What is a covalent bond?"}, {"learning_style", style}}));
        int steps = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++steps;
            CHECK(line.find("What is a covalent bond?") != std::string::npos);
        }
        CHECK(steps >= 5);
        CHECK(steps <= 7);
    }
}

TEST_CASE("mock judge extremes: empty answer scores 1, exact match scores 10") {
    llm::MockGateway gw;
    const std::string reference = "the slope measures vertical change over horizontal change";
    CHECK(gw.chat(request(llm::TemplateId::judge,
                          {{"answer", ""}, {"reference", reference}})) == "1");
    CHECK(gw.chat(request(llm::TemplateId::judge,
                          {{"answer", reference}, {"reference", reference}})) == "10");
    const auto partial = std::stoi(gw.chat(request(
        llm::TemplateId::judge,
        {{"answer", "the slope measures change"}, {"reference", reference}})));
    CHECK(partial > 1);
    CHECK(partial < 10);
}

TEST_CASE("mock notes are conditioned on learning style") {
    llm::MockGateway gw;
    const auto visual = gw.chat(request(
        llm::TemplateId::notes,
        {{"lecture", "a lecture"}, {"topic", "T"}, {"learning_style", "visual"}}));
    const auto auditory = gw.chat(request(
        llm::TemplateId::notes,
        {{"lecture", "a lecture"}, {"topic", "T"}, {"learning_style", "auditory"}}));
    CHECK(visual != auditory);
    CHECK(visual.find("Diagram notes") == 0);
}

TEST_CASE("mock embeddings are unit norm with the configured dimension") {
    llm::MockGateway gw(96);
    const auto v = gw.embed_text("some chunk text");
    CHECK(static_cast<int>(v.size()) == 96);
    CHECK(gw.embed_dimension() == 96);
    CHECK(embed::l2_norm(v) == doctest::Approx(1.0f).epsilon(1e-5));
}

TEST_CASE("fixtures override scripted output, most specific match first") {
    const auto path = write_fixture_file(
        R"({"template_id":"judge","response":"4"})"
        "\n"
        R"({"template_id":"judge","match":{"answer":"special"},"response":"9"})"
        "\n");
    const auto fixtures = llm::load_fixtures(path);
    REQUIRE(fixtures.size() == 2);
    llm::MockGateway gw(fixtures);
    CHECK(gw.chat(request(llm::TemplateId::judge, {{"answer", "anything"}})) == "4");
    CHECK(gw.chat(request(llm::TemplateId::judge, {{"answer", "special"}})) == "9");
    // Other templates fall through to the scripted responses.
    CHECK(gw.chat(request(llm::TemplateId::translate, {{"question", "Q"}})) ==
          "Restated for retrieval: Q");
    fs::remove(path);
}

TEST_CASE("fixture parsing errors are precise") {
    CHECK_THROWS_AS(static_cast<void>(llm::load_fixtures("/nonexistent/fixtures.jsonl")),
                    llm::ConfigError);
    const auto path = write_fixture_file(R"({"template_id":"nope","response":"x"})" "\n");
    CHECK_THROWS_AS(static_cast<void>(llm::load_fixtures(path)), llm::ConfigError);
    fs::remove(path);
}

TEST_CASE("render_prompt substitutes every placeholder or raises a config error") {
    const auto prompt = llm::render_prompt(request(
        llm::TemplateId::judge, {{"reference", "R"}, {"answer", "A"}}));
    CHECK(prompt.find("Reference: R") != std::string::npos);
    CHECK(prompt.find("Answer: A") != std::string::npos);
    CHECK_THROWS_AS(static_cast<void>(llm::render_prompt(
                        request(llm::TemplateId::judge, {{"reference", "R"}}))),
                    llm::ConfigError);
}

TEST_CASE("provider config validation") {
    llm::ProviderConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.kind = llm::ProviderKind::http_chat;
    CHECK_THROWS_AS(cfg.validate(), llm::ConfigError);  // no endpoint
    cfg.endpoint = "http://127.0.0.1:1/v1/chat";
    CHECK_NOTHROW(cfg.validate());
    cfg.embed_dimension = 0;
    CHECK_THROWS_AS(cfg.validate(), llm::ConfigError);
}

TEST_CASE("http gateway requires an API key before any request") {
    llm::ProviderConfig cfg;
    cfg.kind = llm::ProviderKind::http_chat;
    cfg.endpoint = "http://127.0.0.1:1/v1/chat";
    cfg.auth_env = "CLASSIM_TEST_MISSING_KEY";
    unsetenv(cfg.auth_env.c_str());
    llm::HttpGateway gw(cfg);
    CHECK_THROWS_AS(static_cast<void>(
                        gw.chat(request(llm::TemplateId::translate, {{"question", "Q"}}))),
                    llm::AuthError);
}

TEST_CASE("http gateway retries transient failures and maps auth statuses") {
    httplib::Server server;
    std::atomic<int> chat_hits{0};
    server.Post("/v1/chat", [&](const httplib::Request&, httplib::Response& res) {
        if (++chat_hits == 1) {
            res.status = 503;  // first attempt fails, retry should succeed
            return;
        }
        nlohmann::json body{
            {"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}}};
        res.set_content(body.dump(), "application/json");
    });
    server.Post("/v1/forbidden", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("CLASSIM_TEST_KEY", "k", 1);
    llm::ProviderConfig cfg;
    cfg.kind = llm::ProviderKind::http_chat;
    cfg.auth_env = "CLASSIM_TEST_KEY";
    cfg.retry.max_attempts = 3;
    cfg.retry.backoff_ms = 10;

    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    {
        llm::HttpGateway gw(cfg);
        CHECK(gw.chat(request(llm::TemplateId::translate, {{"question", "Q"}})) == "pong");
        CHECK(chat_hits == 2);
    }
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/forbidden";
    {
        llm::HttpGateway gw(cfg);
        CHECK_THROWS_AS(static_cast<void>(
                            gw.chat(request(llm::TemplateId::translate, {{"question", "Q"}}))),
                        llm::AuthError);
    }

    server.stop();
    server_thread.join();
}

TEST_CASE("make_gateway picks the provider kind") {
    llm::ProviderConfig cfg;
    auto gw = llm::make_gateway(cfg);
    CHECK(dynamic_cast<llm::MockGateway*>(gw.get()) != nullptr);
    cfg.kind = llm::ProviderKind::http_chat;
    cfg.endpoint = "http://127.0.0.1:1/v1/chat";
    auto live = llm::make_gateway(cfg);
    CHECK(dynamic_cast<llm::HttpGateway*>(live.get()) != nullptr);
}
