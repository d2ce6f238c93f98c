#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classim/classroom.hpp"
#include "classim/ga.hpp"

namespace classim::experiment {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClassroomSpec {
    int size = 20;
    std::string style_mix = "uniform";
    std::string personality_mix = "uniform";
    std::string aptitude_policy = "uniform";
};

struct RagSpec {
    int questions_per_type = 5;
    int accuracy_threshold = 7;  // judge score >= threshold counts as correct
    int k_per_step = 3;
};

struct ExperimentConfig {
    std::string run_name = "run";
    std::uint64_t seed = 0;
    bool seed_set = false;
    classroom::SessionMode mode = classroom::SessionMode::mock_oracle;
    std::string out_dir = "runs/out";
    ga::GAConfig ga{};
    ClassroomSpec classroom_spec{};
    double noise_sigma = 0.0;
    std::string corpus_path;
    std::string fixtures_path;
    kb::IndexMode index_mode = kb::IndexMode::exact;
    bool persist_kbs = false;
    RagSpec rag{};
    std::vector<int> sizes = {10, 25, 50, 100};  // class-size ablation
    llm::ProviderConfig provider{};

    bool deterministic_timing() const { return mode != classroom::SessionMode::live; }
};

// Parses and validates the JSON config; throws ConfigError naming the field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const std::string& text, const std::string& name);

// Deterministic per-evaluation seed stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct EvolveResult {
    ga::EvolutionHistory history;
    genome::TeachingChromosome best;
    double best_fitness = 0.0;
};

// Runs the configured GA; session records stream to `sessions` in evaluation
// order when non-null.
EvolveResult run_evolution(const ExperimentConfig& cfg,
                           std::vector<classroom::SessionRecord>* sessions);

// Full `evolve` command: history.csv, sessions.jsonl, best_strategy.json,
// stats.csv, summary.md under cfg.out_dir.
void cmd_evolve(const ExperimentConfig& cfg);

// Same seed under all four selection operators; history_<op>.csv plus
// comparison.csv per operator.
void cmd_ablate_selection(const ExperimentConfig& cfg);

// One stats.csv row per class size (Table-style columns).
void cmd_ablate_class_size(const ExperimentConfig& cfg);

// 5 methods x 5 question types accuracy matrix + retrieval traces.
void cmd_compare_rag(const ExperimentConfig& cfg);

// Rebuilds summary.md and a long-format CSV from existing artifacts.
void cmd_report(const std::string& run_dir);

struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
};

SummaryStats summarize(std::vector<double> values);

// Repeated sessions of one strategy; used for the stats.csv row.
std::vector<double> repeated_session_fitness(const ExperimentConfig& cfg,
                                             const genome::TeachingChromosome& chromosome,
                                             int repeats);

}  // namespace classim::experiment
