#include "sdglab/config.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sdglab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    RunConfig cfg;
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));

        if (section == "inputs" || section.empty()) {
            if (key == "corpus") cfg.corpus_path = value;
            else if (key == "corpus_format") {
                if (value == "jsonl") cfg.corpus_format = CorpusFormat::Jsonl;
                else if (value == "csv") cfg.corpus_format = CorpusFormat::Csv;
                else throw std::runtime_error("corpus_format must be jsonl or csv, got '" + value + "'");
            } else if (key == "taxonomy") cfg.taxonomy_path = value;
            else if (key == "assignments") cfg.assignments_path = value;
            else if (key == "systems") cfg.systems_path = value;
            else if (key == "topic_similarity") cfg.topic_similarity_path = value;
            else throw std::runtime_error("unknown [inputs] key '" + key + "'");
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = value;
            else throw std::runtime_error("unknown [output] key '" + key + "'");
        } else if (section == "params") {
            if (key == "level") cfg.level = value;
            else if (key == "min_weight") cfg.min_weight = std::stoi(value);
            else if (key == "top_k") cfg.top_k = std::stoi(value);
            else if (key == "clamp") cfg.clamp = std::stod(value);
            else if (key == "workers") cfg.workers = std::stoi(value);
            else throw std::runtime_error("unknown [params] key '" + key + "'");
        } else {
            throw std::runtime_error("unknown config section [" + section + "]");
        }
    }
    return cfg;
}

void check_input_paths(const RunConfig& cfg) {
    auto check = [](const std::string& what, const std::string& p, bool required) {
        if (p.empty()) {
            if (required) throw std::runtime_error("config is missing required path: " + what);
            return;
        }
        if (!std::filesystem::exists(p))
            throw std::runtime_error(what + " path does not exist: " + p);
    };
    check("corpus", cfg.corpus_path, true);
    check("systems", cfg.systems_path, true);
    check("taxonomy", cfg.taxonomy_path, false);
    check("assignments", cfg.assignments_path, false);
    check("topic_similarity", cfg.topic_similarity_path, false);
    if (cfg.level != "topic" && cfg.level != "paper")
        throw std::runtime_error("level must be 'topic' or 'paper', got '" + cfg.level + "'");
    if (cfg.min_weight < 1) throw std::runtime_error("min_weight must be >= 1");
    if (cfg.top_k < 1) throw std::runtime_error("top_k must be >= 1");
    if (cfg.workers < 1) throw std::runtime_error("workers must be >= 1");
}

}  // namespace sdglab
