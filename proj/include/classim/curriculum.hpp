#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace classim::curriculum {

enum class Subject { math, science, english };

inline constexpr const char* kSubjectNames[] = {"math", "science", "english"};

const char* subject_name(Subject s);
std::optional<Subject> subject_from_name(const std::string& name);

// Prerequisite topics seeded into student knowledge bases: 20 math,
// 21 science, 37 english.
const std::vector<std::string>& prerequisite_topics(Subject s);

struct TeachableTopic {
    Subject subject;
    std::string topic;
};

// Topics the teacher can lecture on (trigonometry, probability, bonding, ...).
const std::vector<TeachableTopic>& teachable_topics();

bool is_teachable(const std::string& topic);
std::optional<Subject> subject_of_teachable(const std::string& topic);

// Six deterministic pseudo-terminology words for a topic; woven into the
// synthetic chunk texts, mock lectures, and reference answers so that
// retrieving the right chunk is observable in judge scores.
std::vector<std::string> topic_key_terms(const std::string& topic);

// Deterministic synthetic body text for one corpus chunk at a detail level.
std::string synthetic_chunk_text(Subject s, const std::string& topic, int level);

// Writes the bundled corpus as JSONL (id, subject, topic, level, text).
void write_bundled_corpus(std::ostream& out);

}  // namespace classim::curriculum
