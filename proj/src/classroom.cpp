#include "classim/classroom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace classim::classroom {

using nlohmann::json;

namespace {

constexpr const char* kQuestionTypeNames[] = {"simple_recall", "conceptual", "application",
                                              "analysis", "creative"};

// Rows follow the global option index order of genome::kOptionNames; columns
// follow the LearningStyle order read_write, visual, auditory, kinesthetic,
// intuitive, analytical.
constexpr double kDefaultAccuracy[genome::kGeneCount][kb::kLearningStyleCount] = {
    {0.70, 0.65, 0.68, 0.43, 0.48, 0.83},  // technical
    {0.47, 0.69, 0.72, 0.52, 0.80, 0.48},  // intuitive
    {0.64, 0.81, 0.46, 0.70, 0.55, 0.75},  // visual
    {0.50, 0.49, 0.78, 0.50, 0.72, 0.52},  // auditory
    {0.47, 0.63, 0.70, 0.53, 0.79, 0.48},  // analogies
    {0.65, 0.78, 0.67, 0.72, 0.68, 0.71},  // real_world_examples
    {0.60, 0.62, 0.61, 0.58, 0.69, 0.76},  // linking_related_concepts
    {0.71, 0.60, 0.63, 0.63, 0.50, 0.73},  // slow
    {0.55, 0.65, 0.62, 0.58, 0.70, 0.58},  // fast
    {0.65, 0.55, 0.78, 0.45, 0.70, 0.68},  // lecture
    {0.58, 0.70, 0.47, 0.80, 0.65, 0.72},  // example_problems
    {0.74, 0.44, 0.43, 0.55, 0.45, 0.65},  // individual_practice
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

// Resolves a mix spec to per-category weights.
template <typename FromName>
std::vector<double> parse_mix(const std::string& spec, int categories, FromName from_name,
                              const char* what) {
    std::vector<double> weights(categories, 0.0);
    if (spec.empty() || spec == "uniform") {
        std::fill(weights.begin(), weights.end(), 1.0 / categories);
        return weights;
    }
    if (spec.rfind("homogeneous:", 0) == 0) {
        const auto cat = from_name(spec.substr(12));
        if (!cat) throw ClassroomError(std::string("unknown ") + what + " in mix: " + spec);
        weights[static_cast<int>(*cat)] = 1.0;
        return weights;
    }
    double total = 0.0;
    for (const auto& entry : split(spec, ',')) {
        const auto kv = split(entry, ':');
        if (kv.size() != 2) throw ClassroomError(std::string("bad ") + what + " mix: " + spec);
        const auto cat = from_name(kv[0]);
        if (!cat) throw ClassroomError(std::string("unknown ") + what + " in mix: " + kv[0]);
        const double w = std::stod(kv[1]);
        if (w < 0.0) throw ClassroomError(std::string("negative weight in ") + what + " mix");
        weights[static_cast<int>(*cat)] += w;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw ClassroomError(std::string(what) + " mix weights must sum to 1");
    }
    return weights;
}

int draw_category(const std::vector<double>& weights, Rng& rng) {
    std::discrete_distribution<int> dist(weights.begin(), weights.end());
    return dist(rng);
}

std::string question_prompt(QuestionType type, const std::string& topic) {
    switch (type) {
        case QuestionType::simple_recall:
            return "State the key definition covered in " + topic + ".";
        case QuestionType::conceptual:
            return "Explain in your own words the central concept of " + topic + ".";
        case QuestionType::application:
            return "Apply the main rule of " + topic + " to a new example.";
        case QuestionType::analysis:
            return "Analyze how the parts of " + topic + " relate and why.";
        case QuestionType::creative:
            return "Invent a scenario that illustrates " + topic + " in an unfamiliar setting.";
    }
    return "Describe " + topic + ".";
}

std::string reference_answer(QuestionType type, Subject subject, const std::string& topic) {
    std::ostringstream out;
    out << "A complete answer covers the definition of " << topic << " in "
        << curriculum::subject_name(subject) << " using the key terms";
    for (const auto& term : curriculum::topic_key_terms(topic)) out << ' ' << term;
    out << ", and "
        << (type == QuestionType::creative ? "an original example applying it."
                                           : "one worked example applying it.");
    return out.str();
}

AssessmentItem make_item(Subject subject, const std::string& topic, QuestionType type) {
    return {subject, topic, type, question_prompt(type, topic),
            reference_answer(type, subject, topic)};
}

// Cross-subject recall items draw from the prerequisite topic lists.
AssessmentItem cross_subject_item(Subject lectured, QuestionType type, Rng& rng) {
    std::vector<Subject> others;
    for (Subject s : {Subject::math, Subject::science, Subject::english}) {
        if (s != lectured) others.push_back(s);
    }
    std::uniform_int_distribution<int> pick_subject(0, static_cast<int>(others.size()) - 1);
    const Subject s = others[pick_subject(rng)];
    const auto& topics = curriculum::prerequisite_topics(s);
    std::uniform_int_distribution<int> pick_topic(0, static_cast<int>(topics.size()) - 1);
    return make_item(s, topics[pick_topic(rng)], type);
}

}  // namespace

AssessmentItem make_assessment_item(Subject subject, const std::string& topic,
                                    QuestionType type) {
    return make_item(subject, topic, type);
}

const char* question_type_name(QuestionType q) {
    return kQuestionTypeNames[static_cast<int>(q)];
}

const char* session_mode_name(SessionMode m) {
    switch (m) {
        case SessionMode::mock_oracle: return "mock_oracle";
        case SessionMode::mock_llm: return "mock_llm";
        case SessionMode::live: return "live";
    }
    return "mock_oracle";
}

CompatibilityTable::CompatibilityTable() {
    for (int o = 0; o < genome::kGeneCount; ++o) {
        for (int s = 0; s < kb::kLearningStyleCount; ++s) {
            accuracy_[o][s] = kDefaultAccuracy[o][s];
        }
    }
}

double CompatibilityTable::accuracy(int option, LearningStyle style) const {
    return accuracy_.at(option)[static_cast<int>(style)];
}

void CompatibilityTable::set(int option, LearningStyle style, double value) {
    if (value < 0.0 || value > 1.0) throw ClassroomError("accuracy must be in [0,1]");
    accuracy_.at(option)[static_cast<int>(style)] = value;
}

double CompatibilityTable::strategy_base_score(const StrategyProfile& profile,
                                               LearningStyle style) const {
    double sum = 0.0;
    for (const auto& choice : profile.aspects) sum += accuracy(choice.option, style);
    return sum / genome::kAspectCount * 10.0;
}

std::array<int, genome::kAspectCount> CompatibilityTable::best_strategy(
    LearningStyle style) const {
    std::array<int, genome::kAspectCount> best{};
    for (int a = 0; a < genome::kAspectCount; ++a) {
        int arg = genome::kGroupBegin[a];
        for (int o = arg + 1; o < genome::kGroupBegin[a] + genome::kGroupSize[a]; ++o) {
            if (accuracy(o, style) > accuracy(arg, style)) arg = o;
        }
        best[a] = arg;
    }
    return best;
}

CompatibilityTable CompatibilityTable::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ClassroomError("cannot open compatibility csv: " + path);
    CompatibilityTable table;
    std::string line;
    if (!std::getline(in, line)) throw ClassroomError("empty compatibility csv");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 1 + kb::kLearningStyleCount) {
            throw ClassroomError("bad compatibility row: " + line);
        }
        int option = -1;
        for (int o = 0; o < genome::kGeneCount; ++o) {
            if (cells[0] == genome::kOptionNames[o]) option = o;
        }
        if (option < 0) throw ClassroomError("unknown teaching option: " + cells[0]);
        for (int s = 0; s < kb::kLearningStyleCount; ++s) {
            table.set(option, static_cast<LearningStyle>(s), std::stod(cells[1 + s]));
        }
        ++rows;
    }
    if (rows != genome::kGeneCount) {
        throw ClassroomError("compatibility csv must define all 12 options");
    }
    return table;
}

void CompatibilityTable::write_csv(std::ostream& out) const {
    out << "option";
    for (int s = 0; s < kb::kLearningStyleCount; ++s) {
        out << ',' << kb::learning_style_name(static_cast<LearningStyle>(s));
    }
    out << '\n';
    for (int o = 0; o < genome::kGeneCount; ++o) {
        out << genome::kOptionNames[o];
        for (int s = 0; s < kb::kLearningStyleCount; ++s) {
            out << ',' << accuracy_[o][s];
        }
        out << '\n';
    }
}

std::vector<StudentProfile> build_classroom(int size, const std::string& style_mix,
                                            const std::string& personality_mix,
                                            const std::string& aptitude_policy, Rng& rng) {
    if (size < 1) throw ClassroomError("classroom size must be >= 1");
    const auto style_weights =
        parse_mix(style_mix, kb::kLearningStyleCount, kb::learning_style_from_name,
                  "learning style");
    const auto personality_weights =
        parse_mix(personality_mix, kb::kPersonalityCount, kb::personality_from_name,
                  "personality");

    int fixed_level = 0;
    if (aptitude_policy.rfind("fixed:", 0) == 0) {
        fixed_level = std::stoi(aptitude_policy.substr(6));
        if (fixed_level < 1 || fixed_level > 3) {
            throw ClassroomError("fixed aptitude level must be 1..3");
        }
    } else if (!aptitude_policy.empty() && aptitude_policy != "uniform") {
        throw ClassroomError("unknown aptitude policy: " + aptitude_policy);
    }

    std::uniform_int_distribution<int> level(1, 3);
    std::vector<StudentProfile> students;
    students.reserve(size);
    for (int i = 0; i < size; ++i) {
        StudentProfile p;
        p.id = "student-" + std::to_string(i);
        p.learning_style = static_cast<LearningStyle>(draw_category(style_weights, rng));
        p.personality = static_cast<kb::Personality>(draw_category(personality_weights, rng));
        for (Subject s : {Subject::math, Subject::science, Subject::english}) {
            p.aptitude[s] = fixed_level ? fixed_level : level(rng);
        }
        students.push_back(std::move(p));
    }
    return students;
}

std::vector<AssessmentItem> build_assessment(const std::string& topic, Subject subject,
                                             Rng& rng) {
    if (!curriculum::is_teachable(topic)) {
        throw ClassroomError("unknown curriculum topic: " + topic);
    }
    std::vector<AssessmentItem> items;
    items.reserve(6);
    for (QuestionType t : {QuestionType::conceptual, QuestionType::application,
                           QuestionType::analysis, QuestionType::creative}) {
        items.push_back(make_item(subject, topic, t));
    }
    items.push_back(cross_subject_item(subject, QuestionType::simple_recall, rng));
    std::uniform_int_distribution<int> any_type(0, kQuestionTypeCount - 1);
    items.push_back(cross_subject_item(subject, static_cast<QuestionType>(any_type(rng)), rng));
    return items;
}

std::string deliver_lecture(const std::string& directives, const std::string& topic,
                            llm::Gateway& llm) {
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::lecture;
    req.variables = {{"topic", topic}, {"directives", directives}};
    const std::string lecture = llm.chat(req);
    if (lecture.empty()) throw ScoringError("provider returned an empty lecture");
    return lecture;
}

std::string take_notes(const std::string& lecture, const StudentProfile& profile,
                       llm::Gateway& llm) {
    if (lecture.empty()) throw ClassroomError("cannot take notes on an empty lecture");
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::notes;
    req.variables = {{"lecture", lecture},
                     {"learning_style", kb::learning_style_name(profile.learning_style)},
                     {"personality", kb::personality_name(profile.personality)}};
    return llm.chat(req);
}

std::string answer_question(const AssessmentItem& item, const rag::RetrievedSet& retrieved,
                            const kb::StudentKb& kbase, const StudentProfile& profile,
                            llm::Gateway& llm) {
    // Chunks corroborated by more retrieval steps go first in the prompt;
    // the union order breaks ties.
    std::vector<const rag::RetrievedChunk*> ordered;
    ordered.reserve(retrieved.chunks.size());
    for (const auto& c : retrieved.chunks) ordered.push_back(&c);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const rag::RetrievedChunk* a, const rag::RetrievedChunk* b) {
                         return a->provenance.size() > b->provenance.size();
                     });
    std::ostringstream ids;
    std::ostringstream context;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i) ids << ',';
        ids << ordered[i]->id;
        context << kbase.chunk(ordered[i]->id).text << '\n';
    }
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::answer;
    req.variables = {{"question", item.prompt},
                     {"context_ids", ids.str()},
                     {"context", context.str()},
                     {"learning_style", kb::learning_style_name(profile.learning_style)}};
    return llm.chat(req);
}

int judge_score(const AssessmentItem& item, const std::string& answer, llm::Gateway& judge) {
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::judge;
    req.variables = {{"answer", answer}, {"reference", item.reference_answer}};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string reply = judge.chat(req);
        try {
            std::size_t consumed = 0;
            const int value = std::stoi(reply, &consumed);
            if (value < 1 || value > 10) {
                std::cerr << "warning: judge score " << value << " out of range, clamping\n";
                return std::clamp(value, 1, 10);
            }
            return value;
        } catch (const std::exception&) {
            // retry once on unparseable output
        }
    }
    throw ScoringError("judge output unparseable for question: " + item.prompt);
}

double synthetic_score(const StrategyProfile& profile, const StudentProfile& student,
                       QuestionType qtype, double noise_sigma, const CompatibilityTable& table,
                       Rng& rng) {
    double score = table.strategy_base_score(profile, student.learning_style);
    if (noise_sigma > 0.0) {
        const double sigma = qtype == QuestionType::creative ? 1.5 * noise_sigma : noise_sigma;
        std::normal_distribution<double> noise(0.0, sigma);
        score += noise(rng);
    }
    return std::clamp(score, 1.0, 10.0);
}

void Classroom::seed_kbs(const std::vector<kb::KnowledgeChunk>& corpus,
                         embed::Embedder& embedder, kb::IndexMode mode) {
    kbs.clear();
    kbs.reserve(students.size());
    for (const auto& s : students) {
        kbs.push_back(kb::seed_student_kb(s, corpus, embedder, mode));
    }
}

SessionRecord run_session(const TeachingChromosome& chromosome, Classroom& room,
                          SessionMode mode, const SessionDeps& deps, Rng& rng) {
    const auto t0 = std::chrono::steady_clock::now();
    if (room.students.empty()) throw ClassroomError("session needs at least one student");
    if (mode != SessionMode::mock_oracle) {
        if (!deps.gateway) throw ClassroomError("text modes need an llm gateway");
        if (room.kbs.size() != room.students.size()) {
            throw ClassroomError("classroom KBs not seeded");
        }
    }
    const CompatibilityTable default_table;
    const CompatibilityTable& table = deps.table ? *deps.table : default_table;

    SessionRecord record;
    record.chromosome = chromosome;

    // Lecture topic drawn uniformly from the teachable curriculum.
    const auto& topics = curriculum::teachable_topics();
    std::uniform_int_distribution<int> pick(0, static_cast<int>(topics.size()) - 1);
    const auto& chosen = topics[pick(rng)];
    record.topic = chosen.topic;
    record.subject = chosen.subject;

    const StrategyProfile profile = genome::decode(chromosome);
    const auto assessment = build_assessment(chosen.topic, chosen.subject, rng);

    if (mode == SessionMode::mock_oracle) {
        for (const auto& student : room.students) {
            StudentOutcome outcome;
            outcome.student_id = student.id;
            double sum = 0.0;
            for (const auto& item : assessment) {
                const double s = synthetic_score(profile, student, item.question_type,
                                                 deps.noise_sigma, table, rng);
                outcome.item_scores.push_back(static_cast<int>(std::lround(s)));
                sum += s;
            }
            outcome.score = sum / assessment.size();
            record.outcomes.push_back(std::move(outcome));
        }
    } else {
        const std::string directives = genome::render_directives(profile);
        const std::string lecture = deliver_lecture(directives, chosen.topic, *deps.gateway);

        record.outcomes.resize(room.students.size());
        // Students are independent once the shared lecture text exists.
        std::string failure;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(room.students.size()); ++i) {
            try {
                const auto& student = room.students[i];
                auto& kbase = *room.kbs[i];
                llm::GatewayEmbedder embedder(*deps.gateway);
                const std::string notes = take_notes(lecture, student, *deps.gateway);
                kbase.append_notes(notes, chosen.topic, chosen.subject, embedder);

                StudentOutcome outcome;
                outcome.student_id = student.id;
                double student_sum = 0.0;
                for (const auto& item : assessment) {
                    const auto retrieved =
                        deps.use_persona_rag
                            ? rag::persona_retrieve(item.prompt, student, kbase,
                                                    deps.k_per_step, *deps.gateway)
                            : rag::baseline_retrieve(deps.retrieval_method, item.prompt, kbase,
                                                     deps.k_per_step, *deps.gateway);
                    const std::string answer =
                        answer_question(item, retrieved, kbase, student, *deps.gateway);
                    const int score = judge_score(item, answer, *deps.gateway);
                    outcome.item_scores.push_back(score);
                    student_sum += score;
                }
                outcome.score = student_sum / assessment.size();
                record.outcomes[i] = std::move(outcome);
            } catch (const std::exception& e) {
#pragma omp critical
                if (failure.empty()) failure = e.what();
            }
        }
        if (!failure.empty()) {
            record.valid = false;
            throw ClassroomError("session stage failed: " + failure);
        }
    }

    double sum = 0.0;
    for (const auto& o : record.outcomes) sum += o.score;
    record.fitness = sum / record.outcomes.size();
    record.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    return record;
}

void write_session_jsonl(std::ostream& out, const SessionRecord& record) {
    json students = json::array();
    for (const auto& o : record.outcomes) {
        students.push_back(
            {{"student", o.student_id}, {"score", o.score}, {"item_scores", o.item_scores}});
    }
    json j{{"topic", record.topic},
           {"subject", curriculum::subject_name(record.subject)},
           {"chromosome", genome::to_json(record.chromosome)},
           {"students", students},
           {"fitness", record.fitness},
           {"valid", record.valid}};
    out << j.dump() << '\n';
}

}  // namespace classim::classroom
