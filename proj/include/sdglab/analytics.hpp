#ifndef SDGLAB_ANALYTICS_HPP
#define SDGLAB_ANALYTICS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdglab/corpus.hpp"
#include "sdglab/matcher.hpp"

namespace sdglab {

inline constexpr int kNumSdgs = 17;

struct CoverageReport {
    struct SystemRow {
        size_t labeled_docs = 0;          // distinct documents with any SDG label
        double coverage = 0.0;            // labeled_docs / corpus size
        std::map<int, size_t> sdg_docs;   // sdg -> distinct documents
    };
    std::map<std::string, SystemRow> systems;
    size_t corpus_size = 0;

    // docs(system,sdg) / labeled_docs(system); nullopt when labeled_docs == 0.
    std::optional<double> share(const std::string& system, int sdg) const;
};

CoverageReport coverage(const LabelMatrix& labels, const Corpus& corpus);

struct TopicMatrix {
    // (system, sdg) -> meso topic -> labeled doc count
    std::map<std::pair<std::string, int>, std::map<std::string, size_t>> cells;
    size_t excluded_no_topic = 0;  // labels on documents lacking a topic
};

TopicMatrix label_topic_matrix(const LabelMatrix& labels, const Corpus& corpus);

// dot(u,v)/(|u||v|); nullopt when either vector is all zero.
std::optional<double> cosine(const std::vector<double>& u, const std::vector<double>& v);
std::optional<double> cosine_sparse(const std::map<std::string, double>& u,
                                    const std::map<std::string, double>& v);

enum class SimilarityLevel { Topic, Paper };

struct SimilarityReport {
    SimilarityLevel level;
    std::vector<std::string> systems;
    // sdg (1..17) -> systems x systems matrix; nullopt marks absent cells
    std::map<int, std::vector<std::vector<std::optional<double>>>> matrices;
};

SimilarityReport pairwise_similarity(const LabelMatrix& labels, const Corpus& corpus,
                                     SimilarityLevel level);

struct TopicDistribution {
    std::string system;
    int sdg = 0;
    std::map<std::string, double> p;  // meso topic -> relative frequency
    size_t support_docs = 0;
};

// One distribution per (system, sdg) cell with support; normalized.
std::vector<TopicDistribution> topic_distributions(const LabelMatrix& labels, const Corpus& corpus);

struct TopicSimilarityMatrix {
    // Missing pairs read as 0 (or 1 on the diagonal). With no explicit
    // entries the matrix is the identity over any key set.
    std::map<std::pair<std::string, std::string>, double> entries;
    std::set<std::string> topics;  // explicit key set; empty means unrestricted

    double at(const std::string& i, const std::string& j) const;
    static TopicSimilarityMatrix identity() { return {}; }
};

// CSV header meso_i,meso_j,s; symmetric closure applied, diagonal forced 1.
TopicSimilarityMatrix load_topic_similarity(const std::string& path);

struct DiversityValue {
    double d = 0.0;        // similarity-sensitive true diversity of order 2
    double shannon = 0.0;  // auxiliary entropy, natural log
};

// D = 1 / sum_ij s_ij p_i p_j; reduces to inverse Simpson for identity S.
DiversityValue diversity(const TopicDistribution& p, const TopicSimilarityMatrix& s);

struct DiversityReport {
    struct Row {
        std::string system;
        int sdg;
        std::optional<DiversityValue> value;  // nullopt when no support
        size_t support_docs;
    };
    std::vector<Row> rows;
};

DiversityReport diversity_report(const LabelMatrix& labels, const Corpus& corpus,
                                 const TopicSimilarityMatrix& s);

struct TopTopic {
    std::string meso_id;
    size_t count;
    double fraction;  // count / support_docs
};

// Ranked by count descending, ties by topic id ascending.
std::vector<TopTopic> top_topics(const LabelMatrix& labels, const Corpus& corpus,
                                 const std::string& system, int sdg, size_t k);

// Report writers (deterministic CSV layouts).
void write_coverage_csv(const CoverageReport& report, const std::string& path);
void write_similarity_csv(const SimilarityReport& report, const std::string& path);
void write_diversity_csv(const DiversityReport& report, const std::string& path);
void write_top_topics_csv(const std::vector<TopTopic>& topics, const std::string& system, int sdg,
                          const std::string& path);
void write_similarity_svg(const SimilarityReport& report, double clamp, const std::string& path);

}  // namespace sdglab

#endif
