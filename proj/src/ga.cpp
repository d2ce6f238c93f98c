#include "classim/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace classim::ga {

namespace {

using Clock = std::chrono::steady_clock;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

GenerationStats stats_of(const GAState& state) {
    GenerationStats s;
    const auto n = state.population.size();
    std::size_t best = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += state.fitnesses[i];
        if (state.fitnesses[i] > state.fitnesses[best]) best = i;
    }
    s.best_fitness = state.fitnesses[best];
    s.mean_fitness = n ? sum / static_cast<double>(n) : 0.0;
    s.best_chromosome = state.population[best];
    return s;
}

}  // namespace

const char* selection_name(Selection s) {
    switch (s) {
        case Selection::steady_state: return "steady_state";
        case Selection::random_pick: return "random";
        case Selection::tournament: return "tournament";
        case Selection::roulette: return "roulette";
    }
    return "steady_state";
}

std::optional<Selection> selection_from_name(const std::string& name) {
    if (name == "steady_state") return Selection::steady_state;
    if (name == "random") return Selection::random_pick;
    if (name == "tournament") return Selection::tournament;
    if (name == "roulette") return Selection::roulette;
    return std::nullopt;
}

void GAConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("population_size must be >= 2");
    if (generations < 0) throw std::invalid_argument("generations must be >= 0");
    if (offspring_per_generation < 1 || offspring_per_generation >= population_size) {
        throw std::invalid_argument("offspring_per_generation must be in [1, population_size)");
    }
    if (selection == Selection::tournament && tournament_k < 2) {
        throw std::invalid_argument("tournament_k must be >= 2");
    }
    if (variation.mutation_rate < 0.0 || variation.mutation_rate > 1.0) {
        throw std::invalid_argument("mutation_rate must be in [0,1]");
    }
    if (variation.mutation_sigma < 0.0) throw std::invalid_argument("mutation_sigma must be >= 0");
}

std::vector<double> evaluate_population_serial(const std::vector<TeachingChromosome>& pop,
                                               const FitnessFn& fitness,
                                               std::uint64_t base_eval_id) {
    std::vector<double> out(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        try {
            out[i] = fitness(pop[i], base_eval_id + i);
        } catch (const std::exception& e) {
            throw EvaluationError(static_cast<int>(i), e.what());
        }
    }
    return out;
}

std::vector<double> evaluate_population(const std::vector<TeachingChromosome>& pop,
                                        const FitnessFn& fitness, std::uint64_t base_eval_id) {
    std::vector<double> out(pop.size());
    int failed_index = -1;
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pop.size()); ++i) {
        try {
            out[i] = fitness(pop[i], base_eval_id + static_cast<std::uint64_t>(i));
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (failed_index < 0 || i < failed_index) {
                    failed_index = static_cast<int>(i);
                    failure = e.what();
                }
            }
        }
    }
    if (failed_index >= 0) throw EvaluationError(failed_index, failure);
    return out;
}

int select_parent(const std::vector<double>& fitnesses, Selection selection, int tournament_k,
                  Rng& rng) {
    const int n = static_cast<int>(fitnesses.size());
    if (n == 0) throw std::invalid_argument("select_parent on empty population");
    std::uniform_int_distribution<int> uniform_index(0, n - 1);
    switch (selection) {
        case Selection::random_pick:
            return uniform_index(rng);
        case Selection::tournament: {
            int best = uniform_index(rng);
            for (int t = 1; t < tournament_k; ++t) {
                const int cand = uniform_index(rng);
                if (fitnesses[cand] > fitnesses[best]) best = cand;
            }
            return best;
        }
        case Selection::roulette: {
            // Shift so the minimum maps to zero, then draw proportionally.
            const double min_fit = *std::min_element(fitnesses.begin(), fitnesses.end());
            const double shift = min_fit < 0.0 ? -min_fit : 0.0;
            double total = 0.0;
            for (double f : fitnesses) total += f + shift;
            if (total <= 0.0) return uniform_index(rng);  // degenerate: uniform fallback
            std::uniform_real_distribution<double> spin(0.0, total);
            double target = spin(rng);
            for (int i = 0; i < n; ++i) {
                target -= fitnesses[i] + shift;
                if (target <= 0.0) return i;
            }
            return n - 1;
        }
        case Selection::steady_state: {
            // Uniform among the top half by fitness.
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return fitnesses[a] > fitnesses[b]; });
            const int pool = std::max(1, n / 2);
            std::uniform_int_distribution<int> pick(0, pool - 1);
            return order[pick(rng)];
        }
    }
    return uniform_index(rng);
}

std::pair<int, int> select_parents(const std::vector<double>& fitnesses, Selection selection,
                                   int tournament_k, Rng& rng) {
    const int a = select_parent(fitnesses, selection, tournament_k, rng);
    const int b = select_parent(fitnesses, selection, tournament_k, rng);
    return {a, b};
}

void step_generation(GAState& state, const GAConfig& cfg, const FitnessFn& fitness, Rng& rng) {
    const bool steady = cfg.selection == Selection::steady_state;
    const int n_children =
        steady ? cfg.offspring_per_generation : static_cast<int>(state.population.size());

    std::vector<TeachingChromosome> children;
    children.reserve(n_children);
    for (int i = 0; i < n_children; ++i) {
        const auto [a, b] = select_parents(state.fitnesses, cfg.selection, cfg.tournament_k, rng);
        auto child = genome::crossover(state.population[a], state.population[b], cfg.variation, rng);
        children.push_back(genome::mutate(child, cfg.variation, rng));
    }

    // Evaluate before touching state so a failure leaves it unchanged.
    const auto child_fitnesses = evaluate_population(children, fitness, state.next_eval_id);
    state.next_eval_id += children.size();

    if (steady) {
        for (int i = 0; i < n_children; ++i) {
            const auto worst = std::min_element(state.fitnesses.begin(), state.fitnesses.end());
            if (child_fitnesses[i] > *worst) {
                const auto idx = std::distance(state.fitnesses.begin(), worst);
                state.population[idx] = children[i];
                state.fitnesses[idx] = child_fitnesses[i];
            }
        }
    } else {
        state.population = std::move(children);
        state.fitnesses = child_fitnesses;
    }
}

EvolutionHistory evolve(const GAConfig& cfg, const FitnessFn& fitness) {
    cfg.validate();
    Rng rng(cfg.seed);
    EvolutionHistory history;

    GAState state;
    auto t0 = Clock::now();
    state.population.reserve(cfg.population_size);
    for (int i = 0; i < cfg.population_size; ++i) {
        state.population.push_back(genome::random_chromosome(rng));
    }
    try {
        state.fitnesses = evaluate_population(state.population, fitness, state.next_eval_id);
    } catch (const EvaluationError&) {
        history.valid = false;
        return history;
    }
    state.next_eval_id += state.population.size();

    auto record = [&](GenerationStats s) {
        s.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
        history.generations.push_back(std::move(s));
        t0 = Clock::now();
    };
    record(stats_of(state));

    for (int g = 0; g < cfg.generations; ++g) {
        bool stepped = false;
        for (int attempt = 0; attempt < 2 && !stepped; ++attempt) {
            try {
                step_generation(state, cfg, fitness, rng);
                stepped = true;
            } catch (const EvaluationError&) {
                if (attempt == 1) {
                    history.valid = false;  // repeated failure: abort with partial history
                    return history;
                }
            }
        }
        record(stats_of(state));
    }
    return history;
}

int plateau_generation(const EvolutionHistory& h, double fraction) {
    if (h.generations.empty()) throw std::invalid_argument("plateau_generation on empty history");
    if (fraction <= 0.0 || fraction > 1.0) {
        throw std::invalid_argument("plateau fraction must be in (0,1]");
    }
    const double threshold = fraction * h.generations.back().best_fitness;
    for (std::size_t g = 0; g < h.generations.size(); ++g) {
        if (h.generations[g].best_fitness >= threshold - 1e-12) return static_cast<int>(g);
    }
    return static_cast<int>(h.generations.size()) - 1;
}

void write_history_csv(std::ostream& out, const EvolutionHistory& h, bool deterministic_timing) {
    out << "generation,best_fitness,mean_fitness,elapsed_ms\n";
    for (std::size_t g = 0; g < h.generations.size(); ++g) {
        const auto& s = h.generations[g];
        out << g << ',' << format_double(s.best_fitness) << ',' << format_double(s.mean_fitness)
            << ',' << (deterministic_timing ? 0 : s.elapsed_ms) << '\n';
    }
}

void write_best_chromosomes_jsonl(std::ostream& out, const EvolutionHistory& h) {
    for (std::size_t g = 0; g < h.generations.size(); ++g) {
        nlohmann::json j = genome::to_json(h.generations[g].best_chromosome);
        j["generation"] = g;
        out << j.dump() << '\n';
    }
}

}  // namespace classim::ga
