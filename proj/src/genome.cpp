#include "classim/genome.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace classim::genome {

namespace {

const char* intensity_adverb(Intensity b) {
    switch (b) {
        case Intensity::mild: return "mildly";
        case Intensity::moderate: return "moderately";
        case Intensity::very: return "very";
    }
    return "moderately";
}

std::string option_phrase(int option) {
    // Human-readable form of the option name for directive sentences.
    std::string s = kOptionNames[option];
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

std::string directive_for(Aspect aspect, int option, Intensity b) {
    const std::string adverb = intensity_adverb(b);
    const std::string phrase = option_phrase(option);
    std::ostringstream out;
    switch (aspect) {
        case Aspect::explanation_style:
            out << "Explain concepts in a " << adverb << " " << phrase << " style.";
            break;
        case Aspect::content_focus:
            out << "Lean " << adverb << " on " << phrase << " when presenting content.";
            break;
        case Aspect::delivery_pace:
            out << "Control delivery speed and ensure pace is " << adverb << " " << phrase << ".";
            break;
        case Aspect::engagement_mode:
            out << "Engage the class " << adverb << " through " << phrase << ".";
            break;
    }
    return out.str();
}

}  // namespace

TeachingChromosome random_chromosome(Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TeachingChromosome c;
    for (double& g : c.genes) g = unit(rng);
    return c;
}

StrategyProfile decode(const TeachingChromosome& c) {
    StrategyProfile p;
    for (int a = 0; a < kAspectCount; ++a) {
        const int begin = kGroupBegin[a];
        const int size = kGroupSize[a];
        int best = begin;
        for (int i = begin + 1; i < begin + size; ++i) {
            if (c.genes[i] > c.genes[best]) best = i;  // ties keep lowest index
        }
        const double v = c.genes[best];
        Intensity bucket = v < 1.0 / 3.0   ? Intensity::mild
                           : v < 2.0 / 3.0 ? Intensity::moderate
                                           : Intensity::very;
        p.aspects[a] = {best, bucket,
                        directive_for(static_cast<Aspect>(a), best, bucket)};
    }
    return p;
}

std::string render_directives(const StrategyProfile& p) {
    std::ostringstream out;
    for (int a = 0; a < kAspectCount; ++a) {
        out << p.aspects[a].directive;
        if (a + 1 < kAspectCount) out << "\n";
    }
    return out.str();
}

TeachingChromosome crossover(const TeachingChromosome& a, const TeachingChromosome& b,
                             const VariationConfig& cfg, Rng& rng) {
    TeachingChromosome child;
    if (cfg.crossover_kind == CrossoverKind::uniform) {
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < kGeneCount; ++i) child.genes[i] = coin(rng) ? a.genes[i] : b.genes[i];
    } else {
        std::uniform_int_distribution<int> cut_dist(1, kGeneCount - 1);
        const int cut = cut_dist(rng);
        for (int i = 0; i < kGeneCount; ++i) child.genes[i] = i < cut ? a.genes[i] : b.genes[i];
    }
    return child;
}

TeachingChromosome mutate(const TeachingChromosome& c, const VariationConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, cfg.mutation_sigma);
    TeachingChromosome out = c;
    for (double& g : out.genes) {
        if (unit(rng) < cfg.mutation_rate) {
            g = std::clamp(g + noise(rng), 0.0, 1.0);
        }
    }
    return out;
}

nlohmann::json to_json(const TeachingChromosome& c) {
    return nlohmann::json{{"genes", c.genes}};
}

nlohmann::json to_json(const StrategyProfile& p) {
    nlohmann::json aspects = nlohmann::json::object();
    for (int a = 0; a < kAspectCount; ++a) {
        const auto& choice = p.aspects[a];
        aspects[kAspectNames[a]] = {
            {"selected_option", kOptionNames[choice.option]},
            {"intensity_bucket", kIntensityNames[static_cast<int>(choice.intensity)]},
            {"directive_text", choice.directive},
        };
    }
    return aspects;
}

TeachingChromosome chromosome_from_json(const nlohmann::json& j) {
    const auto& genes = j.at("genes");
    if (!genes.is_array() || genes.size() != kGeneCount) {
        throw std::runtime_error("chromosome json must carry exactly 12 genes");
    }
    TeachingChromosome c;
    for (int i = 0; i < kGeneCount; ++i) {
        c.genes[i] = genes[i].get<double>();
        if (c.genes[i] < 0.0 || c.genes[i] > 1.0) {
            throw std::runtime_error("gene out of [0,1] in chromosome json");
        }
    }
    return c;
}

}  // namespace classim::genome
