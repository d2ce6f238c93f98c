#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "classim/curriculum.hpp"
#include "classim/rag.hpp"

using namespace classim;

namespace {

kb::StudentProfile make_student(kb::LearningStyle style) {
    kb::StudentProfile p;
    p.id = "s";
    p.learning_style = style;
    p.aptitude = {{curriculum::Subject::math, 1},
                  {curriculum::Subject::science, 1},
                  {curriculum::Subject::english, 1}};
    return p;
}

std::unique_ptr<kb::StudentKb> seeded_kb(embed::Embedder& embedder) {
    std::stringstream buf;
    curriculum::write_bundled_corpus(buf);
    const auto corpus = kb::load_corpus_stream(buf, "<bundled>");
    return kb::seed_student_kb(make_student(kb::LearningStyle::read_write), corpus, embedder);
}

// Brute-force per-step-union oracle, written against the public knn only.
std::vector<std::string> union_oracle(const std::vector<std::string>& steps,
                                      const kb::StudentKb& kbase, int k, llm::Gateway& gw) {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (const auto& step : steps) {
        for (const auto& hit : kbase.knn(gw.embed_text(step), k)) {
            if (seen.insert(hit.id).second) ids.push_back(hit.id);
        }
    }
    return ids;
}

}  // namespace

TEST_CASE("parse_plan_steps strips list markers and drops empty lines") {
    const auto steps = rag::parse_plan_steps(
        "1. first step\n2) second step\n- third step\n* fourth step\n\n   \nfifth step\n");
    REQUIRE(steps.size() == 5);
    CHECK(steps[0] == "first step");
    CHECK(steps[1] == "second step");
    CHECK(steps[2] == "third step");
    CHECK(steps[3] == "fourth step");
    CHECK(steps[4] == "fifth step");
    CHECK(rag::parse_plan_steps("").empty());
    CHECK(rag::parse_plan_steps("\n \n-\n").empty());
}

TEST_CASE("approach produces a personalized plan of five to seven steps") {
    llm::MockGateway gw;
    const auto plan =
        rag::approach("What is a fraction?", make_student(kb::LearningStyle::visual), gw);
    CHECK(plan.question == "What is a fraction?");
    CHECK(plan.student_id == "s");
    CHECK(plan.steps.size() >= 5);
    CHECK(plan.steps.size() <= 7);
    for (const auto& s : plan.steps) CHECK_FALSE(s.empty());
    const auto other =
        rag::approach("What is a fraction?", make_student(kb::LearningStyle::auditory), gw);
    CHECK(plan.steps != other.steps);  // style-conditioned wording
}

TEST_CASE("approach raises when the provider yields no usable steps") {
    std::vector<llm::Fixture> fixtures = {{llm::TemplateId::plan, {}, "\n  \n"}};
    llm::MockGateway gw(fixtures);
    CHECK_THROWS_AS(static_cast<void>(rag::approach(
                        "Q", make_student(kb::LearningStyle::read_write), gw)),
                    rag::PlanFormatError);
}

TEST_CASE("retrieve_plan equals the brute-force per-step union oracle") {
    llm::MockGateway gw;
    llm::GatewayEmbedder embedder(gw);
    const auto kbase = seeded_kb(embedder);
    rag::RetrievalPlan plan;
    plan.question = "How do fractions compare?";
    plan.student_id = "s";
    plan.steps = {"comparing and ordering fractions", "equivalent fractions",
                  "photosynthesis energy", "sentence structure"};
    const auto got = rag::retrieve_plan(plan, *kbase, 3, gw);
    CHECK(got.ids() == union_oracle(plan.steps, *kbase, 3, gw));
    CHECK_THROWS_AS(static_cast<void>(rag::retrieve_plan({}, *kbase, 3, gw)),
                    rag::PlanFormatError);
}

TEST_CASE("union provenance records every step that hit a chunk") {
    llm::MockGateway gw;
    llm::GatewayEmbedder embedder(gw);
    const auto kbase = seeded_kb(embedder);
    rag::RetrievalPlan plan;
    plan.question = "Q";
    plan.steps = {"equivalent fractions", "equivalent fractions"};  // identical steps
    const auto got = rag::retrieve_plan(plan, *kbase, 2, gw);
    REQUIRE(got.chunks.size() == 2);  // both steps return the same two hits
    for (const auto& c : got.chunks) {
        REQUIRE(c.provenance.size() == 2);
        CHECK(c.provenance[0].step == 0);
        CHECK(c.provenance[1].step == 1);
        CHECK(c.provenance[0].rank == c.provenance[1].rank);
        CHECK(c.provenance[0].cosine == c.provenance[1].cosine);
    }
}

TEST_CASE("persona_retrieve with a forced single-step plan reduces to vanilla") {
    const std::string q = "Explain subject verb agreement.";
    std::vector<llm::Fixture> fixtures = {{llm::TemplateId::plan, {{"question", q}}, "1. " + q}};
    llm::MockGateway gw(fixtures);
    llm::GatewayEmbedder embedder(gw);
    const auto kbase = seeded_kb(embedder);
    const auto persona = rag::persona_retrieve(
        q, make_student(kb::LearningStyle::read_write), *kbase, 4, gw);
    const auto vanilla = rag::baseline_retrieve(rag::BaselineMethod::vanilla, q, *kbase, 4, gw);
    CHECK(persona.ids() == vanilla.ids());
}

TEST_CASE("decomposition with sub-questions [Q] reduces to vanilla") {
    const std::string q = "Explain equivalent fractions.";
    std::vector<llm::Fixture> fixtures = {{llm::TemplateId::decompose, {{"question", q}}, q}};
    llm::MockGateway gw(fixtures);
    llm::GatewayEmbedder embedder(gw);
    const auto kbase = seeded_kb(embedder);
    const auto decomposed =
        rag::baseline_retrieve(rag::BaselineMethod::query_decomposition, q, *kbase, 4, gw);
    const auto vanilla = rag::baseline_retrieve(rag::BaselineMethod::vanilla, q, *kbase, 4, gw);
    CHECK(decomposed.ids() == vanilla.ids());
}

TEST_CASE("every baseline returns at most k deduplicated chunks per query") {
    llm::MockGateway gw;
    llm::GatewayEmbedder embedder(gw);
    const auto kbase = seeded_kb(embedder);
    for (auto m : {rag::BaselineMethod::vanilla, rag::BaselineMethod::query_translation,
                   rag::BaselineMethod::hyde}) {
        const auto got = rag::baseline_retrieve(m, "What is an atom?", *kbase, 5, gw);
        CHECK(got.chunks.size() <= 5);
        const auto id_list = got.ids();
        const std::set<std::string> ids(id_list.begin(), id_list.end());
        CHECK(ids.size() == got.chunks.size());
    }
    // Decomposition unions three sub-queries, so up to 3k.
    const auto got = rag::baseline_retrieve(rag::BaselineMethod::query_decomposition,
                                            "What is an atom?", *kbase, 5, gw);
    CHECK(got.chunks.size() <= 15);
}

TEST_CASE("baseline names roundtrip") {
    for (auto m : {rag::BaselineMethod::vanilla, rag::BaselineMethod::query_decomposition,
                   rag::BaselineMethod::query_translation, rag::BaselineMethod::hyde}) {
        CHECK(rag::baseline_from_name(rag::baseline_name(m)) == m);
    }
    CHECK_FALSE(rag::baseline_from_name("persona").has_value());
}

TEST_CASE("write_trace emits one JSON object with the full retrieval record") {
    rag::RetrievedSet set;
    set.chunks = {{"a", {{0, 0, 0.9f}, {1, 2, 0.4f}}}, {"b", {{1, 0, 0.7f}}}};
    std::ostringstream out;
    rag::write_trace(out, "Q", "persona", {"s1", "s2"}, set);
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("question") == "Q");
    CHECK(j.at("method") == "persona");
    CHECK(j.at("steps") == nlohmann::json({"s1", "s2"}));
    CHECK(j.at("union") == nlohmann::json({"a", "b"}));
    REQUIRE(j.at("hits").size() == 3);
    CHECK(j["hits"][0]["id"] == "a");
    CHECK(j["hits"][0]["step"] == 0);
    CHECK(j["hits"][2]["id"] == "b");
}
