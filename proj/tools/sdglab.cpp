#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sdglab/analytics.hpp"
#include "sdglab/config.hpp"
#include "sdglab/cooccur.hpp"
#include "sdglab/corpus.hpp"
#include "sdglab/matcher.hpp"
#include "sdglab/query.hpp"

namespace fs = std::filesystem;
using namespace sdglab;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliOptions {
    std::string config_path;
    std::string level;
    int min_weight = -1;
    std::string system;
    int sdg = -1;
    int top_k = -1;
    double clamp = -1.0;
    int workers = -1;
};

RunConfig resolve_config(const CliOptions& opt) {
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg;
    try {
        cfg = load_config(opt.config_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!opt.level.empty()) cfg.level = opt.level;
    if (opt.min_weight >= 0) cfg.min_weight = opt.min_weight;
    if (opt.top_k >= 0) cfg.top_k = opt.top_k;
    if (opt.clamp >= 0) cfg.clamp = opt.clamp;
    if (opt.workers >= 0) cfg.workers = opt.workers;
    try {
        check_input_paths(cfg);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

Corpus load_corpus_with_topics(const RunConfig& cfg, AttachResult* attach_out = nullptr) {
    Corpus corpus = load_corpus(cfg.corpus_path, cfg.corpus_format);
    if (!cfg.taxonomy_path.empty()) {
        TopicTaxonomy tax = load_taxonomy(cfg.taxonomy_path);
        auto assignments = cfg.assignments_path.empty()
                               ? corpus.inline_assignments()
                               : load_topic_assignments(cfg.assignments_path);
        AttachResult res = attach_topics(corpus, tax, assignments);
        if (attach_out) *attach_out = res;
        for (const auto& d : res.unknown_docs)
            std::cerr << "warning: topic assignment for unknown document '" << d << "'\n";
        for (const auto& m : res.unknown_micros)
            std::cerr << "warning: unknown micro topic '" << m << "'\n";
    }
    return corpus;
}

std::string labels_path(const RunConfig& cfg) { return cfg.output_dir + "/labels.csv"; }
std::string traces_path(const RunConfig& cfg) { return cfg.output_dir + "/traces.csv"; }

int cmd_validate(const CliOptions& opt) {
    RunConfig cfg = resolve_config(opt);
    Corpus corpus = load_corpus_with_topics(cfg);
    auto systems = load_systems(cfg.systems_path);
    if (systems.empty()) throw ConfigError("systems file has no entries: " + cfg.systems_path);
    std::cout << "corpus: " << corpus.size() << " documents (" << corpus.skipped_rows
              << " rows skipped)\n";
    for (const auto& s : systems)
        std::cout << "system " << s.name << ": " << s.entries.size() << " queries\n";
    std::cout << "validate: OK\n";
    return 0;
}

int cmd_label(const CliOptions& opt) {
    RunConfig cfg = resolve_config(opt);
    auto t0 = std::chrono::steady_clock::now();

    AttachResult attach;
    Corpus corpus = load_corpus_with_topics(cfg, &attach);
    auto systems = load_systems(cfg.systems_path);
    if (systems.empty()) throw ConfigError("systems file has no entries: " + cfg.systems_path);
    Engine engine = build_engine(systems);
    auto t1 = std::chrono::steady_clock::now();

    LabelMatrix labels = label_corpus(engine, corpus, cfg.workers);
    auto t2 = std::chrono::steady_clock::now();

    fs::create_directories(cfg.output_dir);
    write_label_dump(labels, labels_path(cfg));
    write_trace_dump(labels, traces_path(cfg));

    nlohmann::json manifest;
    manifest["documents"] = corpus.size();
    manifest["skipped_rows"] = corpus.skipped_rows;
    manifest["topics_attached"] = attach.attached;
    manifest["systems"] = engine.system_names();
    manifest["queries"] = engine.query_count();
    manifest["labels"] = labels.labels.size();
    manifest["traces"] = labels.traces.size();
    manifest["workers"] = cfg.workers;
    manifest["outputs"] = {labels_path(cfg), traces_path(cfg)};
    auto ms = [](auto a, auto b) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
    };
    manifest["timings_ms"] = {{"load", ms(t0, t1)}, {"label", ms(t1, t2)}};
    std::ofstream(cfg.output_dir + "/manifest.json") << manifest.dump(2) << '\n';

    std::cout << "labeled " << corpus.size() << " documents with " << engine.query_count()
              << " queries from " << engine.system_names().size() << " systems; "
              << labels.labels.size() << " labels\n";
    return 0;
}

int cmd_report(const CliOptions& opt, const std::string& which, bool clamp_given) {
    RunConfig cfg = resolve_config(opt);
    if (!fs::exists(labels_path(cfg)))
        throw ConfigError("label dump not found; run 'label' first: " + labels_path(cfg));

    Corpus corpus = load_corpus_with_topics(cfg);
    LabelMatrix labels = load_label_dump(labels_path(cfg), traces_path(cfg));
    fs::create_directories(cfg.output_dir);

    if (which == "coverage") {
        CoverageReport rep = coverage(labels, corpus);
        write_coverage_csv(rep, cfg.output_dir + "/coverage.csv");
        std::cout << "wrote " << cfg.output_dir << "/coverage.csv\n";
    } else if (which == "similarity") {
        SimilarityLevel level =
            cfg.level == "topic" ? SimilarityLevel::Topic : SimilarityLevel::Paper;
        SimilarityReport rep = pairwise_similarity(labels, corpus, level);
        double clamp = cfg.clamp;
        if (!clamp_given && level == SimilarityLevel::Topic) clamp = 1.0;
        std::string base = cfg.output_dir + "/similarity_" + cfg.level;
        write_similarity_csv(rep, base + ".csv");
        write_similarity_svg(rep, clamp, base + ".svg");
        std::cout << "wrote " << base << ".csv and " << base << ".svg\n";
    } else if (which == "diversity") {
        TopicSimilarityMatrix s = cfg.topic_similarity_path.empty()
                                      ? TopicSimilarityMatrix::identity()
                                      : load_topic_similarity(cfg.topic_similarity_path);
        DiversityReport rep = diversity_report(labels, corpus, s);
        write_diversity_csv(rep, cfg.output_dir + "/diversity.csv");
        std::cout << "wrote " << cfg.output_dir << "/diversity.csv\n";
    } else if (which == "topics") {
        if (opt.system.empty() || opt.sdg < 1)
            throw ConfigError("report topics requires --system and --sdg");
        auto ranked = top_topics(labels, corpus, opt.system, opt.sdg, cfg.top_k);
        std::string path =
            cfg.output_dir + "/topics_" + opt.system + "_sdg" + std::to_string(opt.sdg) + ".csv";
        write_top_topics_csv(ranked, opt.system, opt.sdg, path);
        std::cout << "wrote " << path << "\n";
    } else if (which == "cooccur") {
        if (opt.system.empty() || opt.sdg < 1)
            throw ConfigError("report cooccur requires --system and --sdg");
        CooccurrenceNetwork net =
            build_network(labels, corpus, opt.system, opt.sdg, cfg.min_weight);
        std::string base =
            cfg.output_dir + "/cooccur_" + opt.system + "_sdg" + std::to_string(opt.sdg);
        auto files = export_network(net, NetworkFormat::Pajek, base);
        auto more = export_network(net, NetworkFormat::Vosviewer, base);
        files.insert(files.end(), more.begin(), more.end());
        for (const auto& f : files) std::cout << "wrote " << f << "\n";
    } else {
        throw ConfigError("unknown report '" + which +
                          "' (expected coverage|similarity|diversity|topics|cooccur)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corpus labeling and comparison for SDG keyword systems"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "run configuration file")->expected(1);
    app.add_option("--level", opt.level, "similarity level: topic|paper");
    app.add_option("--min-weight", opt.min_weight, "co-occurrence edge threshold");
    app.add_option("--system", opt.system, "labeling system name");
    app.add_option("--sdg", opt.sdg, "SDG number 1..17");
    app.add_option("--top-k", opt.top_k, "number of top topics");
    auto* clamp_opt = app.add_option("--clamp", opt.clamp, "heatmap color scale maximum");
    app.add_option("--workers", opt.workers, "labeling worker threads");

    auto* validate = app.add_subcommand("validate", "check config and input files");
    auto* label = app.add_subcommand("label", "run the labeling pipeline");
    auto* report = app.add_subcommand("report", "generate a report from label dumps");
    std::string which;
    report->add_option("which", which, "coverage|similarity|diversity|topics|cooccur")->required();
    for (auto* sub : {validate, label, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(opt);
        if (label->parsed()) return cmd_label(opt);
        if (report->parsed()) return cmd_report(opt, which, clamp_opt->count() > 0);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
