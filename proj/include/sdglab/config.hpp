#ifndef SDGLAB_CONFIG_HPP
#define SDGLAB_CONFIG_HPP

#include <optional>
#include <string>

#include "sdglab/corpus.hpp"

namespace sdglab {

struct RunConfig {
    std::string corpus_path;
    CorpusFormat corpus_format = CorpusFormat::Jsonl;
    std::string taxonomy_path;       // optional
    std::string assignments_path;    // optional
    std::string systems_path;
    std::string topic_similarity_path;  // optional
    std::string output_dir = "out";

    std::string level = "paper";  // topic | paper
    int min_weight = 5;
    int top_k = 10;
    double clamp = 0.5;
    int workers = 1;
};

// Sections [inputs], [output], [params]; key = value lines; # comments.
RunConfig load_config(const std::string& path);

// Throws with a message naming the first missing input path.
void check_input_paths(const RunConfig& cfg);

}  // namespace sdglab

#endif
