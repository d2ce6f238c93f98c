#include "classim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace classim::experiment {

namespace fs = std::filesystem;
using classroom::Classroom;
using classroom::SessionDeps;
using classroom::SessionMode;
using classroom::SessionRecord;
using genome::TeachingChromosome;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamClassroom = 1;
constexpr std::uint64_t kStreamRepeats = 2;
constexpr std::uint64_t kStreamQuestions = 3;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write artifact: " + path.string());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<kb::KnowledgeChunk> load_corpus_or_bundled(const ExperimentConfig& cfg) {
    if (!cfg.corpus_path.empty()) return kb::load_corpus(cfg.corpus_path);
    std::stringstream buf;
    curriculum::write_bundled_corpus(buf);
    return kb::load_corpus_stream(buf, "<bundled>");
}

// Collects session records from concurrent fitness evaluations and restores
// evaluation order before writing.
class SessionSink {
  public:
    void add(std::uint64_t eval_id, SessionRecord record) {
        std::lock_guard lock(mu_);
        records_.emplace_back(eval_id, std::move(record));
    }
    std::vector<SessionRecord> sorted() {
        std::lock_guard lock(mu_);
        std::sort(records_.begin(), records_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<SessionRecord> out;
        out.reserve(records_.size());
        for (auto& [id, rec] : records_) out.push_back(std::move(rec));
        return out;
    }

  private:
    std::mutex mu_;
    std::vector<std::pair<std::uint64_t, SessionRecord>> records_;
};

struct FitnessContext {
    ExperimentConfig cfg;
    Classroom room;  // oracle mode, or persist_kbs
    classroom::CompatibilityTable table;
    std::vector<kb::KnowledgeChunk> corpus;  // pre-embedded for text modes
    std::shared_ptr<llm::Gateway> gateway;
    SessionSink* sink = nullptr;
    std::mutex persist_mu;
};

std::shared_ptr<FitnessContext> make_context(const ExperimentConfig& cfg, SessionSink* sink) {
    auto ctx = std::make_shared<FitnessContext>();
    ctx->cfg = cfg;
    ctx->sink = sink;
    genome::Rng class_rng(mix_seed(cfg.seed, kStreamClassroom, 0));
    ctx->room.students = classroom::build_classroom(
        cfg.classroom_spec.size, cfg.classroom_spec.style_mix,
        cfg.classroom_spec.personality_mix, cfg.classroom_spec.aptitude_policy, class_rng);
    if (cfg.mode != SessionMode::mock_oracle) {
        ctx->gateway = llm::make_gateway(cfg.provider);
        ctx->corpus = load_corpus_or_bundled(cfg);
        llm::GatewayEmbedder embedder(*ctx->gateway);
        for (auto& c : ctx->corpus) c.embedding = embedder.embed(c.text);
        if (cfg.persist_kbs) {
            ctx->room.seed_kbs(ctx->corpus, embedder, cfg.index_mode);
        }
    }
    return ctx;
}

ga::FitnessFn make_fitness(std::shared_ptr<FitnessContext> ctx) {
    return [ctx](const TeachingChromosome& chromosome, std::uint64_t eval_id) {
        genome::Rng rng(mix_seed(ctx->cfg.seed, 0, eval_id));
        SessionDeps deps;
        deps.table = &ctx->table;
        deps.noise_sigma = ctx->cfg.noise_sigma;
        deps.k_per_step = ctx->cfg.rag.k_per_step;
        SessionRecord record;
        if (ctx->cfg.mode == SessionMode::mock_oracle) {
            record = classroom::run_session(chromosome, ctx->room, SessionMode::mock_oracle,
                                            deps, rng);
        } else {
            deps.gateway = ctx->gateway.get();
            if (ctx->cfg.persist_kbs) {
                std::lock_guard lock(ctx->persist_mu);
                record = classroom::run_session(chromosome, ctx->room, ctx->cfg.mode, deps, rng);
            } else {
                Classroom fresh;
                fresh.students = ctx->room.students;
                llm::GatewayEmbedder embedder(*ctx->gateway);
                fresh.seed_kbs(ctx->corpus, embedder, ctx->cfg.index_mode);
                record = classroom::run_session(chromosome, fresh, ctx->cfg.mode, deps, rng);
            }
        }
        const double fitness = record.fitness;
        if (ctx->sink) ctx->sink->add(eval_id, std::move(record));
        return fitness;
    };
}

TeachingChromosome overall_best(const ga::EvolutionHistory& h, double* fitness) {
    std::size_t arg = 0;
    for (std::size_t g = 1; g < h.generations.size(); ++g) {
        if (h.generations[g].best_fitness > h.generations[arg].best_fitness) arg = g;
    }
    if (fitness) *fitness = h.generations[arg].best_fitness;
    return h.generations[arg].best_chromosome;
}

void write_best_strategy(const fs::path& path, const TeachingChromosome& best,
                         double best_fitness) {
    const auto profile = genome::decode(best);
    json j{{"chromosome", genome::to_json(best)},
           {"profile", genome::to_json(profile)},
           {"fitness", best_fitness}};
    open_out(path) << j.dump(2) << '\n';
}

void write_summary(const fs::path& path, const ExperimentConfig& cfg,
                   const ga::EvolutionHistory& history, const TeachingChromosome& best,
                   double best_fitness) {
    auto out = open_out(path);
    const auto profile = genome::decode(best);
    out << "# Run summary: " << cfg.run_name << "\n\n";
    out << "- mode: " << classroom::session_mode_name(cfg.mode) << "\n";
    out << "- seed: " << cfg.seed << "\n";
    out << "- generations: " << history.generations.size() - 1 << "\n";
    out << "- classroom size: " << cfg.classroom_spec.size << " (" << cfg.classroom_spec.style_mix
        << ")\n";
    out << "- plateau generation (90%): " << ga::plateau_generation(history, 0.9) << "\n";
    out << "- best fitness: " << format_double(best_fitness) << "\n\n";
    out << "## Convergence\n\n| generation | best | mean |\n|---|---|---|\n";
    const std::size_t n = history.generations.size();
    for (std::size_t g = 0; g < n; g += std::max<std::size_t>(1, n / 10)) {
        out << "| " << g << " | " << format_double(history.generations[g].best_fitness) << " | "
            << format_double(history.generations[g].mean_fitness) << " |\n";
    }
    out << "| " << n - 1 << " | " << format_double(history.generations.back().best_fitness)
        << " | " << format_double(history.generations.back().mean_fitness) << " |\n";
    out << "\n## Best strategy\n\n";
    for (int a = 0; a < genome::kAspectCount; ++a) {
        const auto& choice = profile.aspects[a];
        out << "- " << genome::kAspectNames[a] << ": " << genome::kOptionNames[choice.option]
            << " (" << genome::kIntensityNames[static_cast<int>(choice.intensity)] << ")\n";
    }
}

void write_stats_csv(const fs::path& path,
                     const std::vector<std::pair<int, std::string>>& rows) {
    auto out = open_out(path);
    out << "size,mean,std,p25,p50,p75,plateau_gen,minutes\n";
    for (const auto& [size, row] : rows) out << row << '\n';
}

std::string stats_row(int size, const SummaryStats& stats, int plateau_gen, double minutes) {
    std::ostringstream out;
    out << size << ',' << format_double(stats.mean) << ',' << format_double(stats.stddev) << ','
        << format_double(stats.p25) << ',' << format_double(stats.p50) << ','
        << format_double(stats.p75) << ',' << plateau_gen << ',' << format_double(minutes);
    return out.str();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ (stream * 0xd1342543de82ef95ULL)) ^ index);
}

ExperimentConfig config_from_json(const std::string& text, const std::string& name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(name + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(name + ": config must be a JSON object");

    ExperimentConfig cfg;
    try {
        if (!j.contains("seed")) throw ConfigError(name + ": 'seed' is mandatory");
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
        cfg.run_name = j.value("run_name", cfg.run_name);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);

        const std::string mode = j.value("mode", "mock_oracle");
        if (mode == "mock_oracle") {
            cfg.mode = SessionMode::mock_oracle;
        } else if (mode == "mock_llm") {
            cfg.mode = SessionMode::mock_llm;
        } else if (mode == "live") {
            cfg.mode = SessionMode::live;
        } else {
            throw ConfigError(name + ": unknown mode '" + mode + "'");
        }

        if (j.contains("ga")) {
            const auto& g = j["ga"];
            cfg.ga.population_size = g.value("population_size", cfg.ga.population_size);
            cfg.ga.generations = g.value("generations", cfg.ga.generations);
            cfg.ga.offspring_per_generation =
                g.value("offspring_per_generation", cfg.ga.offspring_per_generation);
            cfg.ga.tournament_k = g.value("tournament_k", cfg.ga.tournament_k);
            if (g.contains("selection")) {
                const auto sel = ga::selection_from_name(g["selection"].get<std::string>());
                if (!sel) throw ConfigError(name + ": unknown selection operator");
                cfg.ga.selection = *sel;
            }
            if (g.contains("crossover")) {
                const std::string c = g["crossover"].get<std::string>();
                if (c == "uniform") {
                    cfg.ga.variation.crossover_kind = genome::CrossoverKind::uniform;
                } else if (c == "single_point") {
                    cfg.ga.variation.crossover_kind = genome::CrossoverKind::single_point;
                } else {
                    throw ConfigError(name + ": unknown crossover kind '" + c + "'");
                }
            }
            cfg.ga.variation.mutation_rate =
                g.value("mutation_rate", cfg.ga.variation.mutation_rate);
            cfg.ga.variation.mutation_sigma =
                g.value("mutation_sigma", cfg.ga.variation.mutation_sigma);
        }
        cfg.ga.seed = cfg.seed;

        if (j.contains("classroom")) {
            const auto& c = j["classroom"];
            cfg.classroom_spec.size = c.value("size", cfg.classroom_spec.size);
            cfg.classroom_spec.style_mix = c.value("style_mix", cfg.classroom_spec.style_mix);
            cfg.classroom_spec.personality_mix =
                c.value("personality_mix", cfg.classroom_spec.personality_mix);
            cfg.classroom_spec.aptitude_policy =
                c.value("aptitude_policy", cfg.classroom_spec.aptitude_policy);
        }

        cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
        cfg.corpus_path = j.value("corpus_path", cfg.corpus_path);
        cfg.fixtures_path = j.value("fixtures_path", cfg.fixtures_path);
        cfg.persist_kbs = j.value("persist_kbs", cfg.persist_kbs);

        const std::string index_mode = j.value("index_mode", "exact");
        if (index_mode == "exact") {
            cfg.index_mode = kb::IndexMode::exact;
        } else if (index_mode == "hnsw") {
            cfg.index_mode = kb::IndexMode::hnsw;
        } else {
            throw ConfigError(name + ": unknown index_mode '" + index_mode + "'");
        }

        if (j.contains("rag")) {
            const auto& r = j["rag"];
            cfg.rag.questions_per_type = r.value("questions_per_type", cfg.rag.questions_per_type);
            cfg.rag.accuracy_threshold =
                r.value("accuracy_threshold", cfg.rag.accuracy_threshold);
            cfg.rag.k_per_step = r.value("k_per_step", cfg.rag.k_per_step);
        }

        if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<int>>();

        if (j.contains("provider")) {
            const auto& p = j["provider"];
            const std::string kind = p.value("kind", "scripted_mock");
            cfg.provider.kind = kind == "http_chat" ? llm::ProviderKind::http_chat
                                                    : llm::ProviderKind::scripted_mock;
            cfg.provider.endpoint = p.value("endpoint", cfg.provider.endpoint);
            cfg.provider.embed_endpoint = p.value("embed_endpoint", cfg.provider.embed_endpoint);
            cfg.provider.auth_env = p.value("auth_env", cfg.provider.auth_env);
            cfg.provider.model = p.value("model", cfg.provider.model);
            cfg.provider.embed_dimension =
                p.value("embed_dimension", cfg.provider.embed_dimension);
            cfg.provider.retry.max_attempts =
                p.value("max_attempts", cfg.provider.retry.max_attempts);
        }
        cfg.provider.fixture_path = cfg.fixtures_path;
        if (cfg.mode == SessionMode::live &&
            cfg.provider.kind != llm::ProviderKind::http_chat) {
            throw ConfigError(name + ": live mode requires an http_chat provider");
        }
        if (cfg.mode == SessionMode::mock_llm) cfg.provider.kind = llm::ProviderKind::scripted_mock;

        cfg.ga.validate();
        cfg.provider.validate();
        if (cfg.classroom_spec.size < 1) throw ConfigError(name + ": classroom size must be >= 1");
        if (cfg.noise_sigma < 0.0) throw ConfigError(name + ": noise_sigma must be >= 0");
    } catch (const json::exception& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str(), path);
}

SummaryStats summarize(std::vector<double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    auto percentile = [&](double p) {
        const double pos = p * (n - 1.0);
        const auto lo = static_cast<std::size_t>(pos);
        const auto hi = std::min<std::size_t>(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    s.p25 = percentile(0.25);
    s.p50 = percentile(0.50);
    s.p75 = percentile(0.75);
    return s;
}

EvolveResult run_evolution(const ExperimentConfig& cfg,
                           std::vector<SessionRecord>* sessions) {
    SessionSink sink;
    auto ctx = make_context(cfg, sessions ? &sink : nullptr);
    EvolveResult result;
    result.history = ga::evolve(cfg.ga, make_fitness(ctx));
    if (!result.history.valid || result.history.generations.empty()) {
        throw std::runtime_error("evolution aborted: repeated fitness failure");
    }
    result.best = overall_best(result.history, &result.best_fitness);
    if (sessions) *sessions = sink.sorted();
    return result;
}

std::vector<double> repeated_session_fitness(const ExperimentConfig& cfg,
                                             const TeachingChromosome& chromosome, int repeats) {
    auto ctx = make_context(cfg, nullptr);
    const auto fitness = make_fitness(ctx);
    std::vector<double> out(repeats);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < repeats; ++r) {
        out[r] = fitness(chromosome, mix_seed(cfg.seed, kStreamRepeats, r));
    }
    return out;
}

void cmd_evolve(const ExperimentConfig& cfg) {
    std::vector<SessionRecord> sessions;
    const auto result = run_evolution(cfg, &sessions);
    const fs::path dir(cfg.out_dir);

    {
        auto out = open_out(dir / "history.csv");
        ga::write_history_csv(out, result.history, cfg.deterministic_timing());
    }
    {
        auto out = open_out(dir / "best_per_generation.jsonl");
        ga::write_best_chromosomes_jsonl(out, result.history);
    }
    {
        auto out = open_out(dir / "sessions.jsonl");
        for (const auto& rec : sessions) classroom::write_session_jsonl(out, rec);
    }
    write_best_strategy(dir / "best_strategy.json", result.best, result.best_fitness);

    const auto fitnesses = repeated_session_fitness(cfg, result.best, 30);
    const auto stats = summarize(fitnesses);
    double minutes = 0.0;
    if (!cfg.deterministic_timing()) {
        std::int64_t total_ms = 0;
        for (const auto& g : result.history.generations) total_ms += g.elapsed_ms;
        minutes = static_cast<double>(total_ms) / 60000.0;
    }
    write_stats_csv(dir / "stats.csv",
                    {{cfg.classroom_spec.size,
                      stats_row(cfg.classroom_spec.size, stats,
                                ga::plateau_generation(result.history, 0.9), minutes)}});
    write_summary(dir / "summary.md", cfg, result.history, result.best, result.best_fitness);
}

void cmd_ablate_selection(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    auto out = open_out(dir / "comparison.csv");
    out << "selection,best_gen0,best_final,improvement\n";
    for (ga::Selection sel : {ga::Selection::steady_state, ga::Selection::random_pick,
                              ga::Selection::tournament, ga::Selection::roulette}) {
        ExperimentConfig run = cfg;
        run.ga.selection = sel;
        const auto result = run_evolution(run, nullptr);
        {
            auto hist = open_out(dir / ("history_" + std::string(ga::selection_name(sel)) +
                                        ".csv"));
            ga::write_history_csv(hist, result.history, run.deterministic_timing());
        }
        const double first = result.history.generations.front().best_fitness;
        const double final_best = result.history.generations.back().best_fitness;
        out << ga::selection_name(sel) << ',' << format_double(first) << ','
            << format_double(final_best) << ',' << format_double(final_best - first) << '\n';
    }
}

void cmd_ablate_class_size(const ExperimentConfig& cfg) {
    if (cfg.sizes.size() < 2) throw ConfigError("class-size ablation needs >= 2 sizes");
    std::vector<std::pair<int, std::string>> rows;
    for (int size : cfg.sizes) {
        ExperimentConfig run = cfg;
        run.classroom_spec.size = size;
        const auto result = run_evolution(run, nullptr);
        const auto fitnesses = repeated_session_fitness(run, result.best, 30);
        const auto stats = summarize(fitnesses);
        double minutes = 0.0;
        if (!run.deterministic_timing()) {
            std::int64_t total_ms = 0;
            for (const auto& g : result.history.generations) total_ms += g.elapsed_ms;
            minutes = static_cast<double>(total_ms) / 60000.0;
        }
        rows.emplace_back(size, stats_row(size, stats,
                                          ga::plateau_generation(result.history, 0.9), minutes));
        auto hist = open_out(fs::path(cfg.out_dir) /
                             ("history_size_" + std::to_string(size) + ".csv"));
        ga::write_history_csv(hist, result.history, run.deterministic_timing());
    }
    write_stats_csv(fs::path(cfg.out_dir) / "stats.csv", rows);
}

void cmd_compare_rag(const ExperimentConfig& cfg) {
    if (cfg.mode == SessionMode::mock_oracle) {
        throw ConfigError("compare-rag needs mode mock_llm or live");
    }
    auto gateway = llm::make_gateway(cfg.provider);
    llm::GatewayEmbedder embedder(*gateway);

    auto corpus = load_corpus_or_bundled(cfg);
    for (auto& c : corpus) c.embedding = embedder.embed(c.text);

    genome::Rng class_rng(mix_seed(cfg.seed, kStreamClassroom, 0));
    Classroom room;
    room.students = classroom::build_classroom(
        cfg.classroom_spec.size, cfg.classroom_spec.style_mix,
        cfg.classroom_spec.personality_mix, cfg.classroom_spec.aptitude_policy, class_rng);
    room.seed_kbs(corpus, embedder, cfg.index_mode);

    // Shared question sample across methods, drawn from the prerequisite
    // curriculum so every question is answerable from the student KBs.
    genome::Rng qrng(mix_seed(cfg.seed, kStreamQuestions, 0));
    std::vector<std::pair<curriculum::Subject, std::string>> topics;
    for (auto s : {curriculum::Subject::math, curriculum::Subject::science,
                   curriculum::Subject::english}) {
        for (const auto& t : curriculum::prerequisite_topics(s)) topics.emplace_back(s, t);
    }
    std::uniform_int_distribution<int> pick_topic(0, static_cast<int>(topics.size()) - 1);
    std::vector<classroom::AssessmentItem> items;
    for (int t = 0; t < classroom::kQuestionTypeCount; ++t) {
        for (int q = 0; q < cfg.rag.questions_per_type; ++q) {
            const auto& [subject, topic] = topics[pick_topic(qrng)];
            items.push_back(classroom::make_assessment_item(
                subject, topic, static_cast<classroom::QuestionType>(t)));
        }
    }

    const fs::path dir(cfg.out_dir);
    auto traces = open_out(dir / "traces.jsonl");
    auto out = open_out(dir / "rag_matrix.csv");
    out << "method";
    for (int t = 0; t < classroom::kQuestionTypeCount; ++t) {
        out << ',' << classroom::question_type_name(static_cast<classroom::QuestionType>(t));
    }
    out << '\n';

    const std::vector<std::string> methods = {"persona", "vanilla", "query_decomposition",
                                              "query_translation", "hyde"};
    for (const auto& method : methods) {
        std::array<int, classroom::kQuestionTypeCount> correct{};
        std::array<int, classroom::kQuestionTypeCount> total{};
        for (const auto& item : items) {
            const int t = static_cast<int>(item.question_type);
            for (std::size_t s = 0; s < room.students.size(); ++s) {
                const auto& student = room.students[s];
                auto& kbase = *room.kbs[s];
                rag::RetrievedSet retrieved;
                std::vector<std::string> steps;
                if (method == "persona") {
                    const auto plan = rag::approach(item.prompt, student, *gateway);
                    steps = plan.steps;
                    retrieved = rag::retrieve_plan(plan, kbase, cfg.rag.k_per_step, *gateway);
                } else {
                    steps = {item.prompt};
                    retrieved = rag::baseline_retrieve(*rag::baseline_from_name(method),
                                                       item.prompt, kbase, cfg.rag.k_per_step,
                                                       *gateway);
                }
                const std::string answer =
                    classroom::answer_question(item, retrieved, kbase, student, *gateway);
                const int score = classroom::judge_score(item, answer, *gateway);
                rag::write_trace(traces, item.prompt, method, steps, retrieved);
                ++total[t];
                if (score >= cfg.rag.accuracy_threshold) ++correct[t];
            }
        }
        out << method;
        for (int t = 0; t < classroom::kQuestionTypeCount; ++t) {
            out << ','
                << format_double(total[t] ? static_cast<double>(correct[t]) / total[t] : 0.0);
        }
        out << '\n';
    }
}

void cmd_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    std::ifstream hist_in(dir / "history.csv");
    std::ifstream best_in(dir / "best_strategy.json");
    if (!hist_in || !best_in) {
        throw ConfigError("missing artifacts (history.csv, best_strategy.json) in " + run_dir);
    }

    ga::EvolutionHistory history;
    std::string line;
    std::getline(hist_in, line);  // header
    while (std::getline(hist_in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        ga::GenerationStats s;
        std::getline(row, cell, ',');
        std::getline(row, cell, ',');
        s.best_fitness = std::stod(cell);
        std::getline(row, cell, ',');
        s.mean_fitness = std::stod(cell);
        history.generations.push_back(s);
    }
    if (history.generations.empty()) throw ConfigError("history.csv has no rows in " + run_dir);

    const json best = json::parse(best_in);
    const auto chromosome = genome::chromosome_from_json(best.at("chromosome"));
    const double best_fitness = best.at("fitness").get<double>();

    ExperimentConfig cfg;
    cfg.run_name = dir.filename().string();
    cfg.seed = 0;
    write_summary(dir / "summary.md", cfg, history, chromosome, best_fitness);

    auto out = open_out(dir / "long.csv");
    out << "generation,series,value\n";
    for (std::size_t g = 0; g < history.generations.size(); ++g) {
        out << g << ",best_fitness," << format_double(history.generations[g].best_fitness)
            << '\n';
        out << g << ",mean_fitness," << format_double(history.generations[g].mean_fitness)
            << '\n';
    }
}

}  // namespace classim::experiment
