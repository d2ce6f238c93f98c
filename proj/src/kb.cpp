#include "classim/kb.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace classim::kb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStyleNames[] = {"read_write", "visual",    "auditory",
                                       "kinesthetic", "intuitive", "analytical"};
constexpr const char* kPersonalityNames[] = {"social", "diligent", "independent", "anxious",
                                             "curious"};

std::vector<std::string> tokenize_ws(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

}  // namespace

const char* learning_style_name(LearningStyle s) { return kStyleNames[static_cast<int>(s)]; }

std::optional<LearningStyle> learning_style_from_name(const std::string& name) {
    for (int i = 0; i < kLearningStyleCount; ++i) {
        if (name == kStyleNames[i]) return static_cast<LearningStyle>(i);
    }
    return std::nullopt;
}

const char* personality_name(Personality p) { return kPersonalityNames[static_cast<int>(p)]; }

std::optional<Personality> personality_from_name(const std::string& name) {
    for (int i = 0; i < kPersonalityCount; ++i) {
        if (name == kPersonalityNames[i]) return static_cast<Personality>(i);
    }
    return std::nullopt;
}

std::vector<KnowledgeChunk> load_corpus_stream(std::istream& in, const std::string& name) {
    std::vector<KnowledgeChunk> chunks;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CorpusError(name + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto fail = [&](const std::string& msg) -> CorpusError {
            return CorpusError(name + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (!j.is_object()) throw fail("expected a JSON object per line");
        for (const char* key : {"id", "subject", "topic", "text"}) {
            if (!j.contains(key) || !j[key].is_string()) {
                throw fail(std::string("missing or non-string field '") + key + "'");
            }
        }
        if (!j.contains("level") || !j["level"].is_number_integer()) {
            throw fail("missing or non-integer field 'level'");
        }
        KnowledgeChunk c;
        c.id = j["id"].get<std::string>();
        const auto subject = curriculum::subject_from_name(j["subject"].get<std::string>());
        if (!subject) throw fail("unknown subject '" + j["subject"].get<std::string>() + "'");
        c.subject = *subject;
        c.topic = j["topic"].get<std::string>();
        c.level = j["level"].get<int>();
        if (c.level < 1 || c.level > 3) {
            throw fail("level must be 1, 2, or 3 (got " + std::to_string(c.level) + ")");
        }
        c.text = j["text"].get<std::string>();
        c.kind = ChunkKind::prerequisite;
        if (!seen_ids.insert(c.id).second) throw fail("duplicate chunk id '" + c.id + "'");
        chunks.push_back(std::move(c));
    }

    // Completeness: every (subject, topic) present at all three levels.
    std::map<std::pair<int, std::string>, std::set<int>> levels;
    for (const auto& c : chunks) {
        levels[{static_cast<int>(c.subject), c.topic}].insert(c.level);
    }
    for (const auto& [key, present] : levels) {
        if (present.size() != 3) {
            std::ostringstream msg;
            msg << name << ": topic '" << key.second << "' ("
                << curriculum::kSubjectNames[key.first] << ") is missing levels:";
            for (int l = 1; l <= 3; ++l) {
                if (!present.count(l)) msg << " " << l;
            }
            throw CorpusError(msg.str());
        }
    }
    return chunks;
}

std::vector<KnowledgeChunk> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    return load_corpus_stream(in, path);
}

StudentKb::StudentKb(int dimension, IndexMode mode, HnswParams params)
    : index_(std::make_unique<VectorIndex>(dimension, mode, params)) {}

void StudentKb::add_chunk(KnowledgeChunk chunk) {
    if (chunk.embedding.empty()) throw std::invalid_argument("chunk has no embedding: " + chunk.id);
    const float norm = embed::l2_norm(chunk.embedding);
    if (std::abs(norm - 1.0f) > 1e-5f) {
        throw std::invalid_argument("chunk embedding not unit norm: " + chunk.id);
    }
    if (chunks_.count(chunk.id)) throw std::invalid_argument("duplicate chunk id: " + chunk.id);
    index_->add(chunk.id, chunk.embedding);
    chunks_.emplace(chunk.id, std::move(chunk));
}

int StudentKb::append_notes(const std::string& notes_text, const std::string& topic,
                            Subject subject, Embedder& embedder) {
    const auto tokens = tokenize_ws(notes_text);
    if (tokens.empty()) return 0;

    const int step = kNoteWindowTokens - kNoteOverlapTokens;
    std::vector<KnowledgeChunk> pending;
    for (std::size_t begin = 0; begin < tokens.size();
         begin += static_cast<std::size_t>(step)) {
        const std::size_t end = std::min(tokens.size(), begin + kNoteWindowTokens);
        std::ostringstream window;
        for (std::size_t i = begin; i < end; ++i) {
            if (i > begin) window << ' ';
            window << tokens[i];
        }
        KnowledgeChunk c;
        c.id = "note:" + std::string(curriculum::subject_name(subject)) + ":" + topic + ":" +
               std::to_string(note_serial_ + static_cast<int>(pending.size()));
        c.subject = subject;
        c.topic = topic;
        c.level = 0;  // notes carry no tier
        c.kind = ChunkKind::note;
        c.text = window.str();
        c.embedding = embedder.embed(c.text);  // may throw; KB untouched until all succeed
        pending.push_back(std::move(c));
        if (end == tokens.size()) break;
    }
    for (auto& c : pending) {
        index_->add(c.id, c.embedding);
        chunks_.emplace(c.id, std::move(c));
    }
    note_serial_ += static_cast<int>(pending.size());
    return static_cast<int>(pending.size());
}

const KnowledgeChunk& StudentKb::chunk(const std::string& id) const {
    auto it = chunks_.find(id);
    if (it == chunks_.end()) throw std::out_of_range("no chunk with id " + id);
    return it->second;
}

void StudentKb::save(const std::string& dir) const {
    fs::create_directories(dir);
    std::ofstream chunks_out(fs::path(dir) / "chunks.jsonl");
    std::ofstream vectors_out(fs::path(dir) / "vectors.f32", std::ios::binary);
    // Row order follows index insertion order so rows align with chunk ids.
    for (std::size_t row = 0; row < index_->size(); ++row) {
        const auto& id = index_->ids()[row];
        const auto& c = chunk(id);
        json j{{"id", c.id},
               {"subject", curriculum::subject_name(c.subject)},
               {"topic", c.topic},
               {"level", c.level},
               {"kind", c.kind == ChunkKind::note ? "note" : "prerequisite"},
               {"text", c.text}};
        chunks_out << j.dump() << '\n';
        const auto& v = index_->vector_at(row);
        vectors_out.write(reinterpret_cast<const char*>(v.data()),
                          static_cast<std::streamsize>(v.size() * sizeof(float)));
    }
    json manifest{{"dimension", index_->dimension()},
                  {"mode", index_->mode() == IndexMode::hnsw ? "hnsw" : "exact"},
                  {"count", index_->size()},
                  {"note_serial", note_serial_}};
    if (index_->mode() == IndexMode::hnsw) {
        manifest["hnsw"] = {{"M", index_->params().M},
                            {"ef_construction", index_->params().ef_construction},
                            {"ef_search", index_->params().ef_search}};
    }
    std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << '\n';
}

StudentKb StudentKb::load(const std::string& dir) {
    std::ifstream manifest_in(fs::path(dir) / "manifest.json");
    if (!manifest_in) throw CorpusError("missing manifest.json in " + dir);
    const json manifest = json::parse(manifest_in);
    const int dim = manifest.at("dimension").get<int>();
    const auto mode =
        manifest.at("mode").get<std::string>() == "hnsw" ? IndexMode::hnsw : IndexMode::exact;
    HnswParams params;
    if (manifest.contains("hnsw")) {
        params.M = manifest["hnsw"].at("M").get<int>();
        params.ef_construction = manifest["hnsw"].at("ef_construction").get<int>();
        params.ef_search = manifest["hnsw"].at("ef_search").get<int>();
    }

    StudentKb kb(dim, mode, params);
    std::ifstream chunks_in(fs::path(dir) / "chunks.jsonl");
    std::ifstream vectors_in(fs::path(dir) / "vectors.f32", std::ios::binary);
    if (!chunks_in || !vectors_in) throw CorpusError("missing KB files in " + dir);
    std::string line;
    while (std::getline(chunks_in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        KnowledgeChunk c;
        c.id = j.at("id").get<std::string>();
        c.subject = curriculum::subject_from_name(j.at("subject").get<std::string>())
                        .value_or(Subject::math);
        c.topic = j.at("topic").get<std::string>();
        c.level = j.at("level").get<int>();
        c.kind = j.at("kind").get<std::string>() == "note" ? ChunkKind::note
                                                           : ChunkKind::prerequisite;
        c.text = j.at("text").get<std::string>();
        c.embedding.resize(dim);
        vectors_in.read(reinterpret_cast<char*>(c.embedding.data()),
                        static_cast<std::streamsize>(dim * sizeof(float)));
        if (!vectors_in) throw CorpusError("vectors.f32 truncated in " + dir);
        kb.add_chunk(std::move(c));
    }
    kb.note_serial_ = manifest.value("note_serial", 0);
    return kb;
}

std::unique_ptr<StudentKb> seed_student_kb(const StudentProfile& profile,
                                           const std::vector<KnowledgeChunk>& corpus,
                                           Embedder& embedder, IndexMode mode,
                                           HnswParams params) {
    for (Subject s : {Subject::math, Subject::science, Subject::english}) {
        auto it = profile.aptitude.find(s);
        if (it == profile.aptitude.end() || it->second < 1 || it->second > 3) {
            throw std::invalid_argument("profile " + profile.id +
                                        " lacks a valid aptitude for every subject");
        }
    }
    auto kb = std::make_unique<StudentKb>(embedder.dimension(), mode, params);
    for (const auto& c : corpus) {
        if (c.level != profile.aptitude.at(c.subject)) continue;
        KnowledgeChunk copy = c;
        copy.kind = ChunkKind::prerequisite;
        if (copy.embedding.empty()) copy.embedding = embedder.embed(copy.text);
        kb->add_chunk(std::move(copy));
    }
    return kb;
}

}  // namespace classim::kb
