#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "classim/curriculum.hpp"
#include "classim/embed.hpp"
#include "classim/index.hpp"

namespace classim::kb {

using curriculum::Subject;
using embed::Embedder;
using embed::Vector;
using index::HnswParams;
using index::IndexMode;
using index::SearchHit;
using index::VectorIndex;

enum class ChunkKind { prerequisite, note };

struct KnowledgeChunk {
    std::string id;
    Subject subject;
    std::string topic;
    int level = 1;  // 1..3
    ChunkKind kind = ChunkKind::prerequisite;
    std::string text;
    Vector embedding;  // unit norm once embedded
};

enum class LearningStyle { read_write = 0, visual, auditory, kinesthetic, intuitive, analytical };
enum class Personality { social = 0, diligent, independent, anxious, curious };

inline constexpr int kLearningStyleCount = 6;
inline constexpr int kPersonalityCount = 5;

const char* learning_style_name(LearningStyle s);
std::optional<LearningStyle> learning_style_from_name(const std::string& name);
const char* personality_name(Personality p);
std::optional<Personality> personality_from_name(const std::string& name);

struct StudentProfile {
    std::string id;
    LearningStyle learning_style = LearningStyle::read_write;
    Personality personality = Personality::diligent;
    std::map<Subject, int> aptitude;  // subject -> level 1..3, all three subjects
};

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses and validates the JSONL corpus. Every (subject, topic) pair must be
// present at all three levels; violations name the offending line.
std::vector<KnowledgeChunk> load_corpus(const std::string& path);
std::vector<KnowledgeChunk> load_corpus_stream(std::istream& in, const std::string& name);

// A student's private retrieval store: prerequisite chunks selected by
// aptitude plus any notes appended during sessions.
class StudentKb {
  public:
    StudentKb(int dimension, IndexMode mode = IndexMode::exact, HnswParams params = {});

    void add_chunk(KnowledgeChunk chunk);  // embedding must be set and unit norm

    // Chunks notes into token windows, embeds, and inserts kind=note entries.
    // The KB is unchanged if notes are empty or embedding fails.
    int append_notes(const std::string& notes_text, const std::string& topic, Subject subject,
                     Embedder& embedder);

    std::vector<SearchHit> knn(const Vector& query, int k) const { return index_->knn(query, k); }

    const KnowledgeChunk& chunk(const std::string& id) const;
    bool contains(const std::string& id) const { return chunks_.count(id) > 0; }
    std::size_t size() const { return chunks_.size(); }
    const std::map<std::string, KnowledgeChunk>& chunks() const { return chunks_; }
    const VectorIndex& index() const { return *index_; }

    void save(const std::string& dir) const;
    static StudentKb load(const std::string& dir);

    // Note chunking parameters (whitespace tokens).
    static constexpr int kNoteWindowTokens = 256;
    static constexpr int kNoteOverlapTokens = 32;

  private:
    std::map<std::string, KnowledgeChunk> chunks_;
    std::unique_ptr<VectorIndex> index_;
    int note_serial_ = 0;
};

// Selects, per subject, the chunks at level == aptitude[subject] and seeds a
// fresh KB with them (kind=prerequisite).
std::unique_ptr<StudentKb> seed_student_kb(const StudentProfile& profile,
                                           const std::vector<KnowledgeChunk>& corpus,
                                           Embedder& embedder, IndexMode mode = IndexMode::exact,
                                           HnswParams params = {});

}  // namespace classim::kb
