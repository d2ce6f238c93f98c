// Benchmarks the OpenMP kernels against their serial references:
// population fitness evaluation and the exact knn scan.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "classim/classroom.hpp"
#include "classim/embed.hpp"
#include "classim/experiment.hpp"
#include "classim/ga.hpp"
#include "classim/index.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void bench_population() {
    using namespace classim;
    classroom::CompatibilityTable table;
    genome::Rng rng(7);
    std::vector<genome::TeachingChromosome> pop(256);
    for (auto& c : pop) c = genome::random_chromosome(rng);

    genome::Rng class_rng(11);
    classroom::Classroom room;
    room.students = classroom::build_classroom(100, "uniform", "uniform", "uniform", class_rng);
    classroom::SessionDeps deps;
    deps.table = &table;
    deps.noise_sigma = 0.5;

    ga::FitnessFn fitness = [&](const genome::TeachingChromosome& c, std::uint64_t eval_seed) {
        genome::Rng local(eval_seed);
        // 32 repeated sessions per individual to give the kernel real work.
        double total = 0.0;
        for (int r = 0; r < 32; ++r) {
            total += classroom::run_session(c, room, classroom::SessionMode::mock_oracle, deps,
                                            local)
                         .fitness;
        }
        return total / 32.0;
    };

    auto t0 = Clock::now();
    const auto serial = ga::evaluate_population_serial(pop, fitness, 0);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    const auto parallel = ga::evaluate_population(pop, fitness, 0);
    const double parallel_ms = ms_since(t0);

    const bool match = serial == parallel;
    std::printf("population evaluation: serial %.1f ms, openmp %.1f ms, speedup %.2fx, %s\n",
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "results identical" : "RESULTS DIFFER");
}

void bench_knn() {
    using namespace classim;
    const int dim = 64;
    const int n = 20000;
    const int queries = 200;
    index::VectorIndex idx(dim, index::IndexMode::exact);
    std::mt19937_64 rng(13);
    std::normal_distribution<float> gauss(0.f, 1.f);
    for (int i = 0; i < n; ++i) {
        embed::Vector v(dim);
        for (auto& x : v) x = gauss(rng);
        embed::l2_normalize(v);
        idx.add("c" + std::to_string(i), v);
    }
    std::vector<embed::Vector> qs(queries, embed::Vector(dim));
    for (auto& q : qs) {
        for (auto& x : q) x = gauss(rng);
        embed::l2_normalize(q);
    }

    auto t0 = Clock::now();
    std::size_t checksum_serial = 0;
    for (const auto& q : qs) {
        for (const auto& hit : idx.knn_exact_serial(q, 10)) checksum_serial += hit.id.size();
    }
    const double serial_ms = ms_since(t0);

    t0 = Clock::now();
    std::size_t checksum_parallel = 0;
    for (const auto& q : qs) {
        for (const auto& hit : idx.knn(q, 10)) checksum_parallel += hit.id.size();
    }
    const double parallel_ms = ms_since(t0);

    std::printf("exact knn (%d vectors, %d queries): serial %.1f ms, openmp %.1f ms, "
                "speedup %.2fx, %s\n",
                n, queries, serial_ms, parallel_ms, serial_ms / parallel_ms,
                checksum_serial == checksum_parallel ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
    bench_population();
    bench_knn();
    return 0;
}
