#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "classim/kb.hpp"
#include "classim/llm.hpp"

namespace classim::rag {

using kb::StudentKb;
using kb::StudentProfile;

struct RetrievalPlan {
    std::string question;
    std::string student_id;
    std::vector<std::string> steps;  // non-empty, each step non-empty
};

struct PlanFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepHit {
    int step;  // 0-based index into the plan (or sub-question list)
    int rank;
    float cosine;
};

struct RetrievedChunk {
    std::string id;
    std::vector<StepHit> provenance;  // at least one entry
};

struct RetrievedSet {
    std::vector<RetrievedChunk> chunks;  // deduplicated, ordered by (first step, rank)

    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;
};

enum class BaselineMethod { vanilla, query_decomposition, query_translation, hyde };

const char* baseline_name(BaselineMethod m);
std::optional<BaselineMethod> baseline_from_name(const std::string& name);

// Accepts "1." / "-" prefixed lines, trims, drops empties.
std::vector<std::string> parse_plan_steps(const std::string& text);

// Personalized reasoning plan for (Q, student); errors if the provider
// yields no usable steps.
RetrievalPlan approach(const std::string& question, const StudentProfile& student,
                       llm::Gateway& llm);

// Retrieval over an explicit plan: per-step knn then deduplicated union.
RetrievedSet retrieve_plan(const RetrievalPlan& plan, const StudentKb& kb, int k_per_step,
                           llm::Gateway& llm);

// Plan-then-retrieve pipeline over the student's KB.
RetrievedSet persona_retrieve(const std::string& question, const StudentProfile& student,
                              const StudentKb& kb, int k_per_step, llm::Gateway& llm);

RetrievedSet baseline_retrieve(BaselineMethod method, const std::string& question,
                               const StudentKb& kb, int k, llm::Gateway& llm);

// One JSONL trace line: question, method, steps, per-step hits, union.
void write_trace(std::ostream& out, const std::string& question, const std::string& method,
                 const std::vector<std::string>& steps, const RetrievedSet& result);

}  // namespace classim::rag
