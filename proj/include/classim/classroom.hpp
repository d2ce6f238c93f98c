#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "classim/curriculum.hpp"
#include "classim/genome.hpp"
#include "classim/kb.hpp"
#include "classim/llm.hpp"
#include "classim/rag.hpp"

namespace classim::classroom {

using curriculum::Subject;
using genome::Rng;
using genome::StrategyProfile;
using genome::TeachingChromosome;
using kb::LearningStyle;
using kb::StudentProfile;

enum class QuestionType { simple_recall = 0, conceptual, application, analysis, creative };

inline constexpr int kQuestionTypeCount = 5;

const char* question_type_name(QuestionType q);

struct AssessmentItem {
    Subject subject;
    std::string topic;
    QuestionType question_type;
    std::string prompt;
    std::string reference_answer;
};

// (teaching option, learning style) -> accuracy in [0,1]; 12 x 6 entries.
class CompatibilityTable {
  public:
    CompatibilityTable();  // defaults: the published accuracy table

    double accuracy(int option, LearningStyle style) const;
    void set(int option, LearningStyle style, double value);

    // Single-aspect mean over the 4 selected options, scaled to 1..10.
    double strategy_base_score(const StrategyProfile& profile, LearningStyle style) const;

    // Global argmax over all 72 discrete strategies for one style,
    // as global option indices per aspect.
    std::array<int, genome::kAspectCount> best_strategy(LearningStyle style) const;

    static CompatibilityTable from_csv(const std::string& path);
    void write_csv(std::ostream& out) const;

  private:
    std::array<std::array<double, kb::kLearningStyleCount>, genome::kGeneCount> accuracy_;
};

struct ScoringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClassroomError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mixes: "uniform", "homogeneous:<name>", or "name:weight,name:weight,...".
// Aptitude policy: "uniform" (levels 1..3 per subject) or "fixed:<level>".
std::vector<StudentProfile> build_classroom(int size, const std::string& style_mix,
                                            const std::string& personality_mix,
                                            const std::string& aptitude_policy, Rng& rng);

// Exactly 6 items: four types on the lectured topic (conceptual, application,
// analysis, creative), one cross-subject recall item, and one cross-subject
// item of uniformly drawn type.
std::vector<AssessmentItem> build_assessment(const std::string& topic, Subject subject, Rng& rng);

AssessmentItem make_assessment_item(Subject subject, const std::string& topic, QuestionType type);

std::string deliver_lecture(const std::string& directives, const std::string& topic,
                            llm::Gateway& llm);

std::string take_notes(const std::string& lecture, const StudentProfile& profile,
                       llm::Gateway& llm);

std::string answer_question(const AssessmentItem& item, const rag::RetrievedSet& retrieved,
                            const kb::StudentKb& kbase, const StudentProfile& profile,
                            llm::Gateway& llm);

// Integer 1..10. Out-of-range judge replies are clamped with a warning;
// unparseable output retries once, then throws ScoringError.
int judge_score(const AssessmentItem& item, const std::string& answer, llm::Gateway& judge);

// Compatibility-table oracle score; creative questions draw 1.5x noise.
double synthetic_score(const StrategyProfile& profile, const StudentProfile& student,
                       QuestionType qtype, double noise_sigma, const CompatibilityTable& table,
                       Rng& rng);

enum class SessionMode { mock_oracle, mock_llm, live };

const char* session_mode_name(SessionMode m);

struct StudentOutcome {
    std::string student_id;
    double score = 0.0;  // mean of the 6 item scores, in [1,10]
    std::vector<int> item_scores;
};

struct SessionRecord {
    TeachingChromosome chromosome;
    std::string topic;
    Subject subject = Subject::math;
    std::vector<StudentOutcome> outcomes;
    double fitness = 0.0;  // arithmetic mean of per-student scores
    bool valid = true;
    std::int64_t elapsed_ms = 0;
};

struct Classroom {
    std::vector<StudentProfile> students;
    std::vector<std::unique_ptr<kb::StudentKb>> kbs;  // aligned with students; empty in oracle mode

    void seed_kbs(const std::vector<kb::KnowledgeChunk>& corpus, embed::Embedder& embedder,
                  kb::IndexMode mode = kb::IndexMode::exact);
};

struct SessionDeps {
    llm::Gateway* gateway = nullptr;  // required for mock_llm / live
    const CompatibilityTable* table = nullptr;
    double noise_sigma = 0.0;
    int k_per_step = 3;
    rag::BaselineMethod retrieval_method = rag::BaselineMethod::vanilla;
    bool use_persona_rag = true;  // when false, retrieval_method is used instead
};

// One full cycle: decode -> render -> lecture -> notes -> KB append ->
// assessment -> retrieve -> answer -> score. mock_oracle skips the text
// pipeline and scores via the compatibility table.
SessionRecord run_session(const TeachingChromosome& chromosome, Classroom& room,
                          SessionMode mode, const SessionDeps& deps, Rng& rng);

void write_session_jsonl(std::ostream& out, const SessionRecord& record);

}  // namespace classim::classroom
