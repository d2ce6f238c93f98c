#include "classim/rag.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace classim::rag {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Strips "1." / "1)" / "-" / "*" list markers.
std::string strip_marker(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        return trim(line.substr(i + 1));
    }
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) return trim(line.substr(1));
    return line;
}

// Union of per-step knn results, deduplicated by chunk id. Merge order is
// deterministic: steps in order, hits by rank within each step.
RetrievedSet union_of_steps(const std::vector<std::vector<index::SearchHit>>& per_step) {
    RetrievedSet out;
    std::map<std::string, std::size_t> position;
    for (std::size_t s = 0; s < per_step.size(); ++s) {
        for (std::size_t r = 0; r < per_step[s].size(); ++r) {
            const auto& hit = per_step[s][r];
            const StepHit prov{static_cast<int>(s), static_cast<int>(r), hit.cosine};
            auto it = position.find(hit.id);
            if (it == position.end()) {
                position.emplace(hit.id, out.chunks.size());
                out.chunks.push_back({hit.id, {prov}});
            } else {
                out.chunks[it->second].provenance.push_back(prov);
            }
        }
    }
    return out;
}

std::vector<std::vector<index::SearchHit>> knn_per_query(const std::vector<std::string>& queries,
                                                         const StudentKb& kb, int k,
                                                         llm::Gateway& llm) {
    std::vector<std::vector<index::SearchHit>> per_step(queries.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(queries.size()); ++i) {
        per_step[i] = kb.knn(llm.embed_text(queries[i]), k);
    }
    return per_step;
}

}  // namespace

bool RetrievedSet::contains(const std::string& id) const {
    return std::any_of(chunks.begin(), chunks.end(),
                       [&](const RetrievedChunk& c) { return c.id == id; });
}

std::vector<std::string> RetrievedSet::ids() const {
    std::vector<std::string> out;
    out.reserve(chunks.size());
    for (const auto& c : chunks) out.push_back(c.id);
    return out;
}

const char* baseline_name(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::vanilla: return "vanilla";
        case BaselineMethod::query_decomposition: return "query_decomposition";
        case BaselineMethod::query_translation: return "query_translation";
        case BaselineMethod::hyde: return "hyde";
    }
    return "vanilla";
}

std::optional<BaselineMethod> baseline_from_name(const std::string& name) {
    for (auto m : {BaselineMethod::vanilla, BaselineMethod::query_decomposition,
                   BaselineMethod::query_translation, BaselineMethod::hyde}) {
        if (name == baseline_name(m)) return m;
    }
    return std::nullopt;
}

std::vector<std::string> parse_plan_steps(const std::string& text) {
    std::vector<std::string> steps;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string step = strip_marker(trim(line));
        if (!step.empty()) steps.push_back(step);
    }
    return steps;
}

RetrievalPlan approach(const std::string& question, const StudentProfile& student,
                       llm::Gateway& llm) {
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::plan;
    req.variables = {{"question", question},
                     {"learning_style", kb::learning_style_name(student.learning_style)},
                     {"personality", kb::personality_name(student.personality)}};
    const std::string raw = llm.chat(req);
    RetrievalPlan plan{question, student.id, parse_plan_steps(raw)};
    if (plan.steps.empty()) {
        throw PlanFormatError("plan for '" + question + "' contains no usable steps");
    }
    return plan;
}

RetrievedSet retrieve_plan(const RetrievalPlan& plan, const StudentKb& kb, int k_per_step,
                           llm::Gateway& llm) {
    if (plan.steps.empty()) throw PlanFormatError("cannot retrieve over an empty plan");
    return union_of_steps(knn_per_query(plan.steps, kb, k_per_step, llm));
}

RetrievedSet persona_retrieve(const std::string& question, const StudentProfile& student,
                              const StudentKb& kb, int k_per_step, llm::Gateway& llm) {
    return retrieve_plan(approach(question, student, llm), kb, k_per_step, llm);
}

RetrievedSet baseline_retrieve(BaselineMethod method, const std::string& question,
                               const StudentKb& kb, int k, llm::Gateway& llm) {
    auto single_query = [&](const std::string& q) {
        return union_of_steps(knn_per_query({q}, kb, k, llm));
    };
    switch (method) {
        case BaselineMethod::vanilla:
            return single_query(question);
        case BaselineMethod::query_translation: {
            llm::ChatRequest req;
            req.template_id = llm::TemplateId::translate;
            req.variables = {{"question", question}};
            return single_query(llm.chat(req));
        }
        case BaselineMethod::hyde: {
            llm::ChatRequest req;
            req.template_id = llm::TemplateId::hyde;
            req.variables = {{"question", question}};
            return single_query(llm.chat(req));
        }
        case BaselineMethod::query_decomposition: {
            llm::ChatRequest req;
            req.template_id = llm::TemplateId::decompose;
            req.variables = {{"question", question}};
            auto subs = parse_plan_steps(llm.chat(req));
            if (subs.empty()) {
                throw PlanFormatError("decomposition of '" + question + "' yielded nothing");
            }
            return union_of_steps(knn_per_query(subs, kb, k, llm));
        }
    }
    throw std::invalid_argument("unknown baseline method");
}

void write_trace(std::ostream& out, const std::string& question, const std::string& method,
                 const std::vector<std::string>& steps, const RetrievedSet& result) {
    json union_ids = json::array();
    for (const auto& c : result.chunks) union_ids.push_back(c.id);
    json hits = json::array();
    for (const auto& c : result.chunks) {
        for (const auto& p : c.provenance) {
            hits.push_back({{"id", c.id}, {"step", p.step}, {"rank", p.rank},
                            {"cosine", p.cosine}});
        }
    }
    json j{{"question", question},
           {"method", method},
           {"steps", steps},
           {"hits", hits},
           {"union", union_ids}};
    out << j.dump() << '\n';
}

}  // namespace classim::rag
