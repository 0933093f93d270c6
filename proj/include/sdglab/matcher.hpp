#ifndef SDGLAB_MATCHER_HPP
#define SDGLAB_MATCHER_HPP

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "sdglab/corpus.hpp"
#include "sdglab/query.hpp"

namespace sdglab {

struct Hit {
    std::string stem;  // query literal; wildcards keep the trailing '*', phrases join with spaces
    Field field;
    int position;
};

struct MatchTrace {
    std::string doc_id;
    std::string system;
    int sdg;
    std::string query_id;
    std::vector<Hit> hits;
};

struct LabelMatrix {
    // (doc_id, system, sdg) -> matching query_ids
    std::map<std::tuple<std::string, std::string, int>, std::set<std::string>> labels;
    std::vector<MatchTrace> traces;  // sorted by (doc_id, system, sdg, query_id)
    size_t n_docs = 0;
    size_t n_systems = 0;

    void add(MatchTrace trace);
    void sort_traces();
};

class Engine {
public:
    explicit Engine(const std::vector<SystemDef>& systems);

    // All match traces for one document (every matching query, with hits).
    std::vector<MatchTrace> match_document(const Document& doc) const;

    // Bypasses the literal prefilter; used as the oracle's evaluation path.
    std::vector<MatchTrace> match_document_exhaustive(const Document& doc) const;

    size_t query_count() const { return queries_.size(); }
    const std::vector<std::string>& system_names() const { return system_names_; }

private:
    struct CompiledQuery {
        std::string system;
        int sdg;
        std::string query_id;
        QueryAst ast;
        bool prefilterable;  // a match implies at least one positive literal fired
    };

    std::vector<MatchTrace> match_impl(const Document& doc, bool prefilter) const;

    std::vector<CompiledQuery> queries_;
    std::vector<std::string> system_names_;
    std::unordered_map<std::string, std::vector<uint32_t>> exact_dict_;
    std::unordered_map<std::string, std::vector<uint32_t>> wildcard_dict_;
    std::vector<uint32_t> always_eval_;
    size_t max_wildcard_len_ = 0;
};

Engine build_engine(const std::vector<SystemDef>& systems);

// Union of match_document over all documents; result is independent of
// worker count and document order.
LabelMatrix label_corpus(const Engine& engine, const Corpus& corpus, int workers = 1);

// CSV: doc_id,system,sdg,query_ids (query_ids ';'-joined), sorted.
void write_label_dump(const LabelMatrix& labels, const std::string& path);
std::string label_dump_string(const LabelMatrix& labels);

// CSV: doc_id,system,sdg,query_id,stem,field,position
void write_trace_dump(const LabelMatrix& labels, const std::string& path);

LabelMatrix load_label_dump(const std::string& label_path, const std::string& trace_path);

}  // namespace sdglab

#endif
