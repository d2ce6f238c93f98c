#include "classim/curriculum.hpp"

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace classim::curriculum {

namespace {

const std::vector<std::string> kMathTopics = {
    "Simplifying Expressions",
    "Linear Equations and Inequalities",
    "Working with Formulas",
    "Functions Concept",
    "Cartesian Coordinate System",
    "Distance Formula",
    "Midpoint Formula",
    "Slope of a Line",
    "Equations of Lines",
    "Parallel and Perpendicular Lines",
    "Triangles",
    "Right Triangles and Pythagorean Theorem",
    "Angles and Angle Relationships",
    "Circles Basic",
    "Similar Figures and Similar Triangles",
    "Congruent Figures Basic",
    "Number Sense and Operations",
    "Data Handling and Basic Statistics",
    "Logical Reasoning and Problem Solving",
    "Quadratic Expressions Basic",
};

const std::vector<std::string> kScienceTopics = {
    "Motion Basics",
    "Acceleration",
    "Units of Measurement Physics",
    "Motion Graphs Introductory",
    "Ratio and Proportion",
    "Atomic Structure Basics",
    "Elements and Periodic Table Introductory",
    "Electrons and Electron Shells Simplified",
    "Electric Charge Basic",
    "Ions Introductory",
    "Cells as the Basic Unit of Life",
    "Prokaryotic and Eukaryotic Cells",
    "Basic Cell Processes Overview",
    "Respiration Energy Use",
    "Growth and Reproduction",
    "Response to Environment",
    "Nutrient Uptake",
    "Waste Removal",
    "Molecules and Macromolecules Basic Idea",
    "Water and Its Importance",
    "Forces Introductory",
};

const std::vector<std::string> kEnglishTopics = {
    "Shakespearean Drama",
    "Poetry",
    "Short Story",
    "Identifying Explicit Information",
    "Following Plot and Sequence of Events",
    "Character Identification",
    "Drawing Inferences",
    "Recognizing Basic Symbolism and Figurative Language",
    "Plot Elements",
    "Character Types",
    "Setting Importance",
    "Drama and Play Conventions",
    "Simile and Metaphor",
    "Imagery",
    "Personification",
    "Understanding Varied Sentence Structures",
    "Ability to Follow Complex Texts",
    "Identifying Authors Purpose",
    "Supporting Opinions with Textual Evidence",
    "Making Connections",
    "Drama Basics",
    "Historical Context",
    "Figurative Language",
    "Sound Devices Awareness",
    "Narrative Structure",
    "Parts of Speech",
    "Subject Verb Agreement",
    "Punctuation Essentials",
    "Active and Passive Voice",
    "Direct and Reported Speech",
    "Paragraph Organization",
    "Topic Sentences and Transitions",
    "Summarizing a Passage",
    "Comparing Texts",
    "Tone and Mood",
    "Context Clues for Vocabulary",
    "Common Idioms and Expressions",
};

const std::vector<TeachableTopic> kTeachableTopics = {
    {Subject::math, "Trigonometric Ratios"},
    {Subject::math, "Trigonometric Identities"},
    {Subject::math, "Applications in Heights and Distances"},
    {Subject::math, "Probability Basic Concepts"},
    {Subject::math, "Simple and Compound Events"},
    {Subject::math, "Complementary Events"},
    {Subject::math, "Circles"},
    {Subject::math, "Ellipses"},
    {Subject::math, "Hyperbolas"},
    {Subject::science, "Newtons First Law"},
    {Subject::science, "Newtons Second Law"},
    {Subject::science, "Newtons Third Law"},
    {Subject::science, "Ionic Bonding"},
    {Subject::science, "Covalent Bonding"},
    {Subject::science, "Valence and Lewis Structures"},
    {Subject::science, "Structure of Prokaryotic and Eukaryotic Cells"},
    {Subject::science, "Function of Cell Organelles"},
    {Subject::science, "Plant and Animal Cell Differences"},
    {Subject::english, "Themes in Shakespeare"},
    {Subject::english, "Character Analysis"},
    {Subject::english, "Dramatic Devices"},
    {Subject::english, "Figurative Language in Poetry"},
    {Subject::english, "Themes and Tone"},
    {Subject::english, "Poetic Devices and Structure"},
};

}  // namespace

const char* subject_name(Subject s) { return kSubjectNames[static_cast<int>(s)]; }

std::optional<Subject> subject_from_name(const std::string& name) {
    if (name == "math") return Subject::math;
    if (name == "science") return Subject::science;
    if (name == "english") return Subject::english;
    return std::nullopt;
}

const std::vector<std::string>& prerequisite_topics(Subject s) {
    switch (s) {
        case Subject::math: return kMathTopics;
        case Subject::science: return kScienceTopics;
        case Subject::english: return kEnglishTopics;
    }
    return kMathTopics;
}

const std::vector<TeachableTopic>& teachable_topics() { return kTeachableTopics; }

bool is_teachable(const std::string& topic) { return subject_of_teachable(topic).has_value(); }

std::optional<Subject> subject_of_teachable(const std::string& topic) {
    for (const auto& t : kTeachableTopics) {
        if (t.topic == topic) return t.subject;
    }
    return std::nullopt;
}

std::vector<std::string> topic_key_terms(const std::string& topic) {
    // Deterministic pseudo-terminology so chunks differ beyond the topic name.
    static const char* kVocabulary[] = {
        "axiom",     "balance",   "cycle",     "derive",    "element",   "factor",
        "gradient",  "hypothesis","identity",  "junction",  "kernel",    "lattice",
        "measure",   "notation",  "operand",   "pattern",   "quotient",  "ratio",
        "sequence",  "threshold", "unit",      "vertex",    "weight",    "yield",
        "anchor",    "bridge",    "contrast",  "domain",    "envelope",  "framework",
        "gauge",     "horizon",   "interval",  "keystone",  "limit",     "mapping",
        "node",      "origin",    "pivot",     "range",     "scale",     "template",
        "uptake",    "vector",    "window",    "axis",      "bond",      "cadence"};
    constexpr int kVocabularySize = 48;
    constexpr int kTermCount = 6;
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : topic) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::vector<std::string> terms;
    terms.reserve(kTermCount);
    std::uint64_t x = h;
    while (static_cast<int>(terms.size()) < kTermCount) {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        std::string term = kVocabulary[(x >> 33) % kVocabularySize];
        if (std::find(terms.begin(), terms.end(), term) == terms.end()) {
            terms.push_back(std::move(term));
        }
    }
    return terms;
}

static std::string key_term_sentence(const std::string& topic) {
    std::ostringstream out;
    out << "Key terms:";
    for (const auto& t : topic_key_terms(topic)) out << ' ' << t;
    out << '.';
    return out.str();
}

std::string synthetic_chunk_text(Subject s, const std::string& topic, int level) {
    std::ostringstream out;
    switch (level) {
        case 1:
            out << topic << " " << subject_name(s) << " level one overview. "
                << key_term_sentence(topic) << " A first look at " << topic
                << " introducing the basic vocabulary and the main idea without detail. "
                << "Key words for " << topic << " appear here with short plain definitions.";
            break;
        case 2:
            out << topic << " " << subject_name(s) << " level two foundations. "
                << key_term_sentence(topic) << " Core principles of " << topic
                << " with worked definitions, essential rules, and a short introduction to "
                << "slightly more advanced aspects of " << topic << ".";
            break;
        default:
            out << topic << " " << subject_name(s) << " level three in depth. "
                << key_term_sentence(topic) << " Detailed explanations of " << topic
                << " including derivations where applicable, extended analogies, and a "
                << "thorough exploration of the components and edge cases of " << topic << ".";
            break;
    }
    return out.str();
}

void write_bundled_corpus(std::ostream& out) {
    int serial = 0;
    for (Subject s : {Subject::math, Subject::science, Subject::english}) {
        for (const auto& topic : prerequisite_topics(s)) {
            for (int level = 1; level <= 3; ++level) {
                nlohmann::json j;
                std::ostringstream id;
                id << subject_name(s) << "-" << serial << "-l" << level;
                j["id"] = id.str();
                j["subject"] = subject_name(s);
                j["topic"] = topic;
                j["level"] = level;
                j["text"] = synthetic_chunk_text(s, topic, level);
                out << j.dump() << "\n";
            }
            ++serial;
        }
        serial = 0;
    }
}

}  // namespace classim::curriculum
