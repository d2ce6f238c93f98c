#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "classim/genome.hpp"

namespace classim::ga {

using genome::Rng;
using genome::TeachingChromosome;
using genome::VariationConfig;

enum class Selection { steady_state, random_pick, tournament, roulette };

const char* selection_name(Selection s);
std::optional<Selection> selection_from_name(const std::string& name);

struct GAConfig {
    int population_size = 30;
    int generations = 50;
    Selection selection = Selection::steady_state;
    int tournament_k = 3;
    int offspring_per_generation = 10;
    VariationConfig variation{};
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument on bad fields
};

// Fitness receives a per-evaluation seed so evaluations stay reproducible
// when the population is scored in parallel.
using FitnessFn = std::function<double(const TeachingChromosome&, std::uint64_t eval_seed)>;

struct GenerationStats {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    TeachingChromosome best_chromosome{};
    std::int64_t elapsed_ms = 0;
};

struct EvolutionHistory {
    std::vector<GenerationStats> generations;  // length = config generations + 1
    bool valid = true;
};

struct GAState {
    std::vector<TeachingChromosome> population;
    std::vector<double> fitnesses;
    std::uint64_t next_eval_id = 0;
};

// Error from a fitness evaluation, carrying the individual's index.
struct EvaluationError : std::runtime_error {
    EvaluationError(int index, const std::string& what)
        : std::runtime_error("fitness evaluation failed for individual " +
                             std::to_string(index) + ": " + what),
          index(index) {}
    int index;
};

// OpenMP-parallel population scoring; bitwise-equal to the serial reference.
std::vector<double> evaluate_population(const std::vector<TeachingChromosome>& pop,
                                        const FitnessFn& fitness, std::uint64_t base_eval_id);
std::vector<double> evaluate_population_serial(const std::vector<TeachingChromosome>& pop,
                                               const FitnessFn& fitness,
                                               std::uint64_t base_eval_id);

// Picks one parent index. Roulette on nonpositive totals shift-normalizes and
// falls back to uniform when degenerate.
int select_parent(const std::vector<double>& fitnesses, Selection selection, int tournament_k,
                  Rng& rng);
std::pair<int, int> select_parents(const std::vector<double>& fitnesses, Selection selection,
                                   int tournament_k, Rng& rng);

// One generation step. steady_state: offspring_per_generation children replace
// strictly-worse worst individuals (elitist). Other selections run a
// generational scheme: population_size children fully replace the parents.
void step_generation(GAState& state, const GAConfig& cfg, const FitnessFn& fitness, Rng& rng);

EvolutionHistory evolve(const GAConfig& cfg, const FitnessFn& fitness);

// Smallest generation index reaching fraction * final best fitness.
int plateau_generation(const EvolutionHistory& h, double fraction);

// CSV columns: generation,best_fitness,mean_fitness,elapsed_ms.
// deterministic_timing zeroes the elapsed column for byte-stable artifacts.
void write_history_csv(std::ostream& out, const EvolutionHistory& h, bool deterministic_timing);

// One JSON object per line: {"generation":g,"genes":[...]}.
void write_best_chromosomes_jsonl(std::ostream& out, const EvolutionHistory& h);

}  // namespace classim::ga
