#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "classim/ga.hpp"

using namespace classim::ga;
using classim::genome::TeachingChromosome;

namespace {

// Deterministic toy fitness: favors a high "slow" gene.
double slow_gene_fitness(const TeachingChromosome& c, std::uint64_t) { return c.genes[7]; }

EvolutionHistory history_of(std::initializer_list<double> best) {
    EvolutionHistory h;
    for (double b : best) {
        GenerationStats s;
        s.best_fitness = b;
        h.generations.push_back(s);
    }
    return h;
}

}  // namespace

TEST_CASE("GAConfig::validate rejects bad fields") {
    GAConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GAConfig{};
    cfg.offspring_per_generation = cfg.population_size;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GAConfig{};
    cfg.selection = Selection::tournament;
    cfg.tournament_k = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GAConfig{};
    cfg.variation.mutation_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(GAConfig{}.validate());
}

TEST_CASE("parallel population evaluation equals the serial reference bitwise") {
    classim::genome::Rng rng(3);
    std::vector<TeachingChromosome> pop(64);
    for (auto& c : pop) c = classim::genome::random_chromosome(rng);
    FitnessFn fitness = [](const TeachingChromosome& c, std::uint64_t eval_seed) {
        classim::genome::Rng local(eval_seed);
        std::normal_distribution<double> noise(0.0, 0.3);
        double s = 0.0;
        for (double g : c.genes) s += g;
        return s + noise(local);
    };
    const auto serial = evaluate_population_serial(pop, fitness, 17);
    const auto parallel = evaluate_population(pop, fitness, 17);
    CHECK(serial == parallel);
}

TEST_CASE("evaluation failures carry the individual's index") {
    std::vector<TeachingChromosome> pop(5);
    FitnessFn fitness = [](const TeachingChromosome&, std::uint64_t eval_seed) -> double {
        if (eval_seed == 3) throw std::runtime_error("boom");
        return 1.0;
    };
    CHECK_THROWS_AS(evaluate_population_serial(pop, fitness, 0), EvaluationError);
    try {
        evaluate_population(pop, fitness, 0);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.index == 3);
    }
}

TEST_CASE("steady-state selection draws uniformly from the top half") {
    const std::vector<double> fitnesses = {1.0, 4.0, 2.0, 3.0};  // top half: indices 1, 3
    classim::genome::Rng rng(21);
    std::array<int, 4> counts{};
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) ++counts[select_parent(fitnesses, Selection::steady_state, 3, rng)];
    CHECK(counts[0] == 0);
    CHECK(counts[2] == 0);
    // Binomial(20000, 0.5): 5 sigma ~ 177.
    CHECK(std::abs(counts[1] - draws / 2) < 400);
    CHECK(std::abs(counts[3] - draws / 2) < 400);
}

TEST_CASE("random selection is uniform (chi-square)") {
    const std::vector<double> fitnesses = {1.0, 100.0, 2.0, 50.0, 3.0};
    classim::genome::Rng rng(22);
    std::array<int, 5> counts{};
    const int draws = 25000;
    for (int i = 0; i < draws; ++i) ++counts[select_parent(fitnesses, Selection::random_pick, 3, rng)];
    double chi2 = 0.0;
    const double expected = draws / 5.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 13.28);  // chi-square 99th percentile, 4 dof
}

TEST_CASE("roulette selection is fitness proportional") {
    const std::vector<double> fitnesses = {1.0, 3.0};
    classim::genome::Rng rng(23);
    int hits = 0;
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) {
        if (select_parent(fitnesses, Selection::roulette, 3, rng) == 1) ++hits;
    }
    const double frequency = static_cast<double>(hits) / draws;  // expected 0.75
    CHECK(frequency > 0.73);
    CHECK(frequency < 0.77);
}

TEST_CASE("roulette shift-normalizes nonpositive fitness and falls back to uniform") {
    classim::genome::Rng rng(24);
    // After shifting by +5 the weights are {0, 4}: index 1 should dominate.
    const std::vector<double> shifted = {-5.0, -1.0};
    int hits = 0;
    for (int i = 0; i < 2000; ++i) {
        if (select_parent(shifted, Selection::roulette, 3, rng) == 1) ++hits;
    }
    CHECK(hits == 2000);
    // All-equal after shift: degenerate, uniform fallback covers every index.
    const std::vector<double> flat = {-2.0, -2.0, -2.0};
    std::array<int, 3> counts{};
    for (int i = 0; i < 3000; ++i) ++counts[select_parent(flat, Selection::roulette, 3, rng)];
    for (int c : counts) CHECK(c > 0);
}

TEST_CASE("tournament selection prefers fitter individuals") {
    const std::vector<double> fitnesses = {0.1, 0.9, 0.2, 0.3};
    classim::genome::Rng rng(25);
    int best_hits = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        if (select_parent(fitnesses, Selection::tournament, 3, rng) == 1) ++best_hits;
    }
    // P(best in a k=3 tournament of 4) = 1 - (3/4)^3 = 0.578.
    const double frequency = static_cast<double>(best_hits) / draws;
    CHECK(frequency > 0.56);
    CHECK(frequency < 0.60);
}

TEST_CASE("steady-state evolve improves and never regresses on a deterministic fitness") {
    GAConfig cfg;
    cfg.population_size = 20;
    cfg.generations = 40;
    cfg.offspring_per_generation = 8;
    cfg.seed = 77;
    const auto h = evolve(cfg, slow_gene_fitness);
    REQUIRE(h.valid);
    REQUIRE(h.generations.size() == 41);
    for (std::size_t g = 1; g < h.generations.size(); ++g) {
        CHECK(h.generations[g].best_fitness >= h.generations[g - 1].best_fitness);
    }
    CHECK(h.generations.back().best_fitness >= 0.95);  // optimum is 1.0
    CHECK(h.generations.back().best_chromosome.genes[7] ==
          doctest::Approx(h.generations.back().best_fitness));
}

TEST_CASE("evolve is reproducible for a fixed seed") {
    GAConfig cfg;
    cfg.population_size = 12;
    cfg.generations = 10;
    cfg.offspring_per_generation = 4;
    cfg.seed = 5;
    const auto a = evolve(cfg, slow_gene_fitness);
    const auto b = evolve(cfg, slow_gene_fitness);
    REQUIRE(a.generations.size() == b.generations.size());
    for (std::size_t g = 0; g < a.generations.size(); ++g) {
        CHECK(a.generations[g].best_fitness == b.generations[g].best_fitness);
        CHECK(a.generations[g].mean_fitness == b.generations[g].mean_fitness);
        CHECK(a.generations[g].best_chromosome == b.generations[g].best_chromosome);
    }
}

TEST_CASE("a failing generation is retried once, then aborts with valid=false") {
    GAConfig cfg;
    cfg.population_size = 8;
    cfg.generations = 5;
    cfg.offspring_per_generation = 3;
    cfg.seed = 6;
    int calls = 0;
    FitnessFn flaky = [&calls](const TeachingChromosome& c, std::uint64_t) -> double {
        ++calls;
        if (calls > 8) throw std::runtime_error("provider down");  // fails from gen 1 onward
        return c.genes[0];
    };
    const auto h = evolve(cfg, flaky);
    CHECK_FALSE(h.valid);
    CHECK(h.generations.size() == 1);  // only the initial population was recorded
}

TEST_CASE("plateau_generation hand-scan oracles") {
    CHECK(plateau_generation(history_of({3.0, 6.0, 8.0, 8.1, 8.15}), 0.9) == 2);
    CHECK(plateau_generation(history_of({5.0, 5.0, 5.0}), 0.5) == 0);
    CHECK(plateau_generation(history_of({1.0, 2.0, 3.0}), 1.0) == 2);
    CHECK_THROWS_AS(plateau_generation(EvolutionHistory{}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(plateau_generation(history_of({1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("history csv has the pinned columns and zeroed timing in deterministic mode") {
    auto h = history_of({1.0, 2.0});
    h.generations[0].mean_fitness = 0.5;
    h.generations[0].elapsed_ms = 1234;
    h.generations[1].mean_fitness = 1.5;
    h.generations[1].elapsed_ms = 777;
    std::ostringstream det, timed;
    write_history_csv(det, h, true);
    write_history_csv(timed, h, false);
    CHECK(det.str() ==
          "generation,best_fitness,mean_fitness,elapsed_ms\n0,1,0.5,0\n1,2,1.5,0\n");
    CHECK(timed.str() ==
          "generation,best_fitness,mean_fitness,elapsed_ms\n0,1,0.5,1234\n1,2,1.5,777\n");
}

TEST_CASE("selection operator names roundtrip") {
    for (Selection s : {Selection::steady_state, Selection::random_pick, Selection::tournament,
                        Selection::roulette}) {
        CHECK(selection_from_name(selection_name(s)) == s);
    }
    CHECK_FALSE(selection_from_name("elitist").has_value());
}
