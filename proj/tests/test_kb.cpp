#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "classim/curriculum.hpp"
#include "classim/kb.hpp"

using namespace classim;
namespace fs = std::filesystem;

namespace {

std::string corpus_line(const std::string& id, const std::string& subject,
                        const std::string& topic, int level) {
    nlohmann::json j{{"id", id},
                     {"subject", subject},
                     {"topic", topic},
                     {"level", level},
                     {"text", topic + " text at level " + std::to_string(level)}};
    return j.dump();
}

std::string tiny_corpus() {
    std::ostringstream out;
    for (const char* topic : {"Fractions", "Photosynthesis"}) {
        const std::string subject = std::string(topic) == "Fractions" ? "math" : "science";
        for (int level = 1; level <= 3; ++level) {
            out << corpus_line(std::string(topic) + "-" + std::to_string(level), subject, topic,
                               level)
                << "\n";
        }
    }
    for (int level = 1; level <= 3; ++level) {
        out << corpus_line("g-" + std::to_string(level), "english", "Grammar", level) << "\n";
    }
    return out.str();
}

kb::StudentProfile student_with_levels(int math, int science, int english) {
    kb::StudentProfile p;
    p.id = "s0";
    p.aptitude = {{curriculum::Subject::math, math},
                  {curriculum::Subject::science, science},
                  {curriculum::Subject::english, english}};
    return p;
}

}  // namespace

TEST_CASE("load_corpus_stream parses a complete corpus") {
    std::istringstream in(tiny_corpus());
    const auto chunks = kb::load_corpus_stream(in, "tiny");
    CHECK(chunks.size() == 9);
    CHECK(chunks[0].kind == kb::ChunkKind::prerequisite);
}

TEST_CASE("corpus errors name the offending line") {
    SUBCASE("malformed json") {
        std::istringstream in("{not json\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(kb::load_corpus_stream(in, "bad")),
                             doctest::Contains("bad:1"), kb::CorpusError);
    }
    SUBCASE("duplicate id") {
        std::istringstream in(corpus_line("x", "math", "T", 1) + "\n" +
                              corpus_line("x", "math", "T", 2) + "\n" +
                              corpus_line("y", "math", "T", 3) + "\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(kb::load_corpus_stream(in, "dup")),
                             doctest::Contains("dup:2"), kb::CorpusError);
    }
    SUBCASE("level out of range") {
        std::istringstream in(corpus_line("x", "math", "T", 4) + "\n");
        CHECK_THROWS_AS(static_cast<void>(kb::load_corpus_stream(in, "lvl")), kb::CorpusError);
    }
    SUBCASE("incomplete level coverage") {
        std::istringstream in(corpus_line("a", "math", "T", 1) + "\n" +
                              corpus_line("b", "math", "T", 2) + "\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(kb::load_corpus_stream(in, "inc")),
                             doctest::Contains("T"), kb::CorpusError);
    }
    SUBCASE("unknown subject") {
        std::istringstream in(corpus_line("a", "history", "T", 1) + "\n");
        CHECK_THROWS_AS(static_cast<void>(kb::load_corpus_stream(in, "sub")), kb::CorpusError);
    }
}

TEST_CASE("the bundled corpus is complete and sized to the curriculum") {
    std::stringstream buf;
    curriculum::write_bundled_corpus(buf);
    const auto chunks = kb::load_corpus_stream(buf, "<bundled>");
    CHECK(chunks.size() == (20 + 21 + 37) * 3);
    CHECK(curriculum::prerequisite_topics(curriculum::Subject::math).size() == 20);
    CHECK(curriculum::prerequisite_topics(curriculum::Subject::science).size() == 21);
    CHECK(curriculum::prerequisite_topics(curriculum::Subject::english).size() == 37);
}

TEST_CASE("seed_student_kb selects the aptitude level per subject") {
    std::istringstream in(tiny_corpus());
    const auto corpus = kb::load_corpus_stream(in, "tiny");
    embed::MockEmbedder embedder(64);
    const auto profile = student_with_levels(2, 3, 1);
    const auto kbase = kb::seed_student_kb(profile, corpus, embedder);
    CHECK(kbase->size() == 3);
    CHECK(kbase->contains("Fractions-2"));
    CHECK(kbase->contains("Photosynthesis-3"));
    CHECK(kbase->contains("g-1"));
    CHECK_FALSE(kbase->contains("Fractions-1"));

    kb::StudentProfile incomplete;
    incomplete.aptitude = {{curriculum::Subject::math, 1}};
    CHECK_THROWS(static_cast<void>(kb::seed_student_kb(incomplete, corpus, embedder)));
}

TEST_CASE("add_chunk insists on a unit-norm embedding") {
    kb::StudentKb kbase(4);
    kb::KnowledgeChunk c;
    c.id = "c";
    c.subject = curriculum::Subject::math;
    c.topic = "T";
    c.text = "t";
    c.embedding = {0.5f, 0.5f, 0.0f, 0.0f};  // norm ~0.707
    CHECK_THROWS(kbase.add_chunk(c));
    c.embedding = embed::hashed_bag_embedding("t", 4);
    CHECK_NOTHROW(kbase.add_chunk(c));
    CHECK_THROWS(kbase.add_chunk(c));  // duplicate id
}

TEST_CASE("append_notes chunks long notes into overlapping windows") {
    kb::StudentKb kbase(32);
    embed::MockEmbedder embedder(32);
    std::ostringstream notes;
    for (int i = 0; i < 600; ++i) notes << "tok" << i << ' ';
    // Windows of 256 tokens advancing by 224: starts at 0, 224, 448 -> 3 notes.
    const int added =
        kbase.append_notes(notes.str(), "T", curriculum::Subject::math, embedder);
    CHECK(added == 3);
    CHECK(kbase.size() == 3);
    CHECK(kbase.contains("note:math:T:0"));
    CHECK(kbase.chunk("note:math:T:0").kind == kb::ChunkKind::note);
    CHECK(kbase.append_notes("", "T", curriculum::Subject::math, embedder) == 0);
    // A second lecture on the same topic continues the serial numbering.
    CHECK(kbase.append_notes("short recap", "T", curriculum::Subject::math, embedder) == 1);
    CHECK(kbase.contains("note:math:T:3"));
}

TEST_CASE("append_notes is all-or-nothing when embedding fails") {
    struct FlakyEmbedder final : embed::Embedder {
        int calls = 0;
        embed::Vector embed(const std::string& text) override {
            if (++calls > 1) throw std::runtime_error("embedder offline");
            return embed::hashed_bag_embedding(text, 16);
        }
        int dimension() const override { return 16; }
    };
    kb::StudentKb kbase(16);
    FlakyEmbedder flaky;
    std::ostringstream notes;
    for (int i = 0; i < 600; ++i) notes << "tok" << i << ' ';
    CHECK_THROWS(static_cast<void>(
        kbase.append_notes(notes.str(), "T", curriculum::Subject::math, flaky)));
    CHECK(kbase.size() == 0);
}

TEST_CASE("save/load roundtrips chunks, vectors, and search behavior") {
    std::istringstream in(tiny_corpus());
    const auto corpus = kb::load_corpus_stream(in, "tiny");
    embed::MockEmbedder embedder(48);
    const auto original = kb::seed_student_kb(student_with_levels(1, 1, 1), corpus, embedder);
    original->append_notes("a short note about fractions", "Fractions",
                           curriculum::Subject::math, embedder);

    const auto dir = fs::temp_directory_path() / "classim_kb_roundtrip";
    fs::remove_all(dir);
    original->save(dir.string());
    CHECK(fs::exists(dir / "chunks.jsonl"));
    CHECK(fs::exists(dir / "vectors.f32"));
    CHECK(fs::exists(dir / "manifest.json"));

    const auto loaded = kb::StudentKb::load(dir.string());
    CHECK(loaded.size() == original->size());
    for (const auto& [id, chunk] : original->chunks()) {
        REQUIRE(loaded.contains(id));
        const auto& other = loaded.chunk(id);
        CHECK(other.text == chunk.text);
        CHECK(other.level == chunk.level);
        CHECK(other.embedding == chunk.embedding);
    }
    const auto q = embed::hashed_bag_embedding("fractions note", 48);
    const auto a = original->knn(q, 3);
    const auto b = loaded.knn(q, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].cosine == b[i].cosine);
    }
    fs::remove_all(dir);
}

TEST_CASE("style and personality names roundtrip") {
    for (int i = 0; i < kb::kLearningStyleCount; ++i) {
        const auto s = static_cast<kb::LearningStyle>(i);
        CHECK(kb::learning_style_from_name(kb::learning_style_name(s)) == s);
    }
    for (int i = 0; i < kb::kPersonalityCount; ++i) {
        const auto p = static_cast<kb::Personality>(i);
        CHECK(kb::personality_from_name(kb::personality_name(p)) == p);
    }
    CHECK_FALSE(kb::learning_style_from_name("telepathic").has_value());
}
