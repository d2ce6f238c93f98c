#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "classim/experiment.hpp"

namespace {

using classim::experiment::ConfigError;
using classim::experiment::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::string mode;
    std::string out_dir;
    std::string index_mode;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "override the run seed")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--mode", opts.mode, "mock_oracle | mock_llm | live");
    cmd->add_option("--out", opts.out_dir, "artifact output directory");
    cmd->add_option("--index-mode", opts.index_mode, "exact | hnsw")
        ->check(CLI::IsMember({"exact", "hnsw"}));
}

ExperimentConfig resolve(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = classim::experiment::load_config(opts.config_path);
    } else if (!opts.seed_given) {
        throw ConfigError("either --config or --seed is required");
    }
    if (opts.seed_given) {
        cfg.seed = opts.seed;
        cfg.seed_set = true;
        cfg.ga.seed = opts.seed;
    }
    if (!opts.mode.empty()) {
        if (opts.mode == "mock_oracle") {
            cfg.mode = classim::classroom::SessionMode::mock_oracle;
        } else if (opts.mode == "mock_llm") {
            cfg.mode = classim::classroom::SessionMode::mock_llm;
        } else if (opts.mode == "live") {
            cfg.mode = classim::classroom::SessionMode::live;
            cfg.provider.kind = classim::llm::ProviderKind::http_chat;
        } else {
            throw ConfigError("unknown --mode '" + opts.mode + "'");
        }
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (!opts.index_mode.empty()) {
        cfg.index_mode = opts.index_mode == "hnsw" ? classim::kb::IndexMode::hnsw
                                                   : classim::kb::IndexMode::exact;
    }
    if (!cfg.seed_set) throw ConfigError("a seed is required (config 'seed' or --seed)");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classroom-simulation strategy evolution"};
    app.require_subcommand(1);

    CommonOpts evolve_opts, ablate_sel_opts, ablate_size_opts, rag_opts;
    std::string report_dir;

    auto* evolve = app.add_subcommand("evolve", "run the genetic search");
    add_common(evolve, evolve_opts);
    auto* ablate_sel =
        app.add_subcommand("ablate-selection", "compare selection operators on one seed");
    add_common(ablate_sel, ablate_sel_opts);
    auto* ablate_size = app.add_subcommand("ablate-class-size", "sweep classroom sizes");
    add_common(ablate_size, ablate_size_opts);
    auto* compare_rag =
        app.add_subcommand("compare-rag", "retrieval method accuracy matrix");
    add_common(compare_rag, rag_opts);
    auto* report = app.add_subcommand("report", "rebuild summaries from run artifacts");
    report->add_option("run_dir", report_dir, "directory with run artifacts")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (evolve->parsed()) {
            classim::experiment::cmd_evolve(resolve(evolve_opts));
        } else if (ablate_sel->parsed()) {
            classim::experiment::cmd_ablate_selection(resolve(ablate_sel_opts));
        } else if (ablate_size->parsed()) {
            classim::experiment::cmd_ablate_class_size(resolve(ablate_size_opts));
        } else if (compare_rag->parsed()) {
            ExperimentConfig cfg = resolve(rag_opts);
            if (cfg.mode == classim::classroom::SessionMode::mock_oracle) {
                cfg.mode = classim::classroom::SessionMode::mock_llm;
            }
            classim::experiment::cmd_compare_rag(cfg);
        } else if (report->parsed()) {
            classim::experiment::cmd_report(report_dir);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const classim::llm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
