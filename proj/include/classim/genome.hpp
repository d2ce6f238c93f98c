#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

namespace classim::genome {

using Rng = std::mt19937_64;

// Four teaching aspects, twelve option genes total.
enum class Aspect { explanation_style = 0, content_focus, delivery_pace, engagement_mode };

inline constexpr int kGeneCount = 12;
inline constexpr int kAspectCount = 4;

// Gene layout: [0,4) explanation, [4,7) content, [7,9) pace, [9,12) engagement.
inline constexpr std::array<int, kAspectCount> kGroupBegin = {0, 4, 7, 9};
inline constexpr std::array<int, kAspectCount> kGroupSize = {4, 3, 2, 3};

inline constexpr std::array<const char*, kAspectCount> kAspectNames = {
    "explanation_style", "content_focus", "delivery_pace", "engagement_mode"};

// Global option index 0..11; names align with the gene layout above.
inline constexpr std::array<const char*, kGeneCount> kOptionNames = {
    "technical",    "intuitive",           "visual",
    "auditory",     "analogies",           "real_world_examples",
    "linking_related_concepts",            "slow",
    "fast",         "lecture",             "example_problems",
    "individual_practice"};

enum class Intensity { mild = 0, moderate, very };

inline constexpr std::array<const char*, 3> kIntensityNames = {"mild", "moderate", "very"};

struct TeachingChromosome {
    std::array<double, kGeneCount> genes{};

    bool operator==(const TeachingChromosome&) const = default;
};

struct AspectChoice {
    int option;           // global option index 0..11
    Intensity intensity;  // bucket of the winning gene
    std::string directive;
};

struct StrategyProfile {
    std::array<AspectChoice, kAspectCount> aspects{};

    bool operator==(const StrategyProfile&) const = default;
    // Global option index selected for the given aspect.
    int option(Aspect a) const { return aspects[static_cast<int>(a)].option; }
};

enum class CrossoverKind { uniform, single_point };

struct VariationConfig {
    CrossoverKind crossover_kind = CrossoverKind::uniform;
    double mutation_rate = 0.15;
    double mutation_sigma = 0.1;
};

TeachingChromosome random_chromosome(Rng& rng);

// Argmax per group, lowest index wins ties; intensity bucket of the winning
// gene: [0,1/3) mild, [1/3,2/3) moderate, [2/3,1] very.
StrategyProfile decode(const TeachingChromosome& c);

// Exactly four directive sentences, one per aspect, from a fixed template table.
std::string render_directives(const StrategyProfile& p);

TeachingChromosome crossover(const TeachingChromosome& a, const TeachingChromosome& b,
                             const VariationConfig& cfg, Rng& rng);

TeachingChromosome mutate(const TeachingChromosome& c, const VariationConfig& cfg, Rng& rng);

nlohmann::json to_json(const TeachingChromosome& c);
nlohmann::json to_json(const StrategyProfile& p);
TeachingChromosome chromosome_from_json(const nlohmann::json& j);

}  // namespace classim::genome
