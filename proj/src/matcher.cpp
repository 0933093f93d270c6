#include "sdglab/matcher.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "sdglab/csv.hpp"

namespace sdglab {

namespace {

constexpr int kNumFields = 3;

struct FieldPositions {
    std::vector<int> pos[kNumFields];
};

// Ordered by token so wildcard stems can range-scan.
struct DocIndex {
    std::map<std::string, FieldPositions> tokens;

    explicit DocIndex(const Document& doc) {
        for (int f = 0; f < kNumFields; ++f)
            for (const auto& tok : doc.tokens(static_cast<Field>(f)))
                tokens[tok.text].pos[f].push_back(tok.position);
    }
};

bool field_in_scope(int f, FieldSel scope) {
    if (scope == FieldSel::Any) return true;
    return static_cast<int>(scope) == f;
}

using Occurrence = std::pair<int, int>;  // (field, start position)

void term_occurrences(const DocIndex& idx, const QueryNode& term, FieldSel scope,
                      std::vector<Occurrence>& out) {
    auto emit = [&](const FieldPositions& fp) {
        for (int f = 0; f < kNumFields; ++f)
            if (field_in_scope(f, scope))
                for (int p : fp.pos[f]) out.emplace_back(f, p);
    };
    if (!term.wildcard) {
        auto it = idx.tokens.find(term.stem);
        if (it != idx.tokens.end()) emit(it->second);
        return;
    }
    for (auto it = idx.tokens.lower_bound(term.stem);
         it != idx.tokens.end() && it->first.compare(0, term.stem.size(), term.stem) == 0; ++it)
        emit(it->second);
}

void phrase_occurrences(const DocIndex& idx, const QueryNode& phrase, FieldSel scope,
                        std::vector<Occurrence>& out) {
    std::vector<const FieldPositions*> parts;
    for (const auto& t : phrase.terms) {
        auto it = idx.tokens.find(t);
        if (it == idx.tokens.end()) return;
        parts.push_back(&it->second);
    }
    for (int f = 0; f < kNumFields; ++f) {
        if (!field_in_scope(f, scope)) continue;
        for (int p : parts[0]->pos[f]) {
            bool ok = true;
            for (size_t i = 1; i < parts.size() && ok; ++i) {
                const auto& v = parts[i]->pos[f];
                ok = std::binary_search(v.begin(), v.end(), p + static_cast<int>(i));
            }
            if (ok) out.emplace_back(f, p);
        }
    }
}

std::vector<Occurrence> leaf_occurrences(const DocIndex& idx, const QueryNode& node, FieldSel scope) {
    std::vector<Occurrence> out;
    if (node.kind == NodeKind::Term) term_occurrences(idx, node, scope, out);
    else phrase_occurrences(idx, node, scope, out);
    return out;
}

// Distance is measured between the start positions of the two operands;
// ordered (W/n) requires the right operand to start after the left.
bool near_match(const DocIndex& idx, const QueryNode& node, FieldSel scope) {
    auto left = leaf_occurrences(idx, *node.children[0], scope);
    if (left.empty()) return false;
    auto right = leaf_occurrences(idx, *node.children[1], scope);
    for (const auto& [lf, lp] : left)
        for (const auto& [rf, rp] : right) {
            if (lf != rf) continue;
            int d = rp - lp;
            if (node.ordered ? (d >= 1 && d <= node.window) : (std::abs(d) <= node.window))
                return true;
        }
    return false;
}

bool eval_node(const DocIndex& idx, const QueryNode& node, FieldSel scope) {
    switch (node.kind) {
        case NodeKind::Term:
        case NodeKind::Phrase:
            return !leaf_occurrences(idx, node, scope).empty();
        case NodeKind::Near:
            return near_match(idx, node, scope);
        case NodeKind::Not:
            return !eval_node(idx, *node.children[0], scope);
        case NodeKind::And:
            for (const auto& c : node.children)
                if (!eval_node(idx, *c, scope)) return false;
            return true;
        case NodeKind::Or:
            for (const auto& c : node.children)
                if (eval_node(idx, *c, scope)) return true;
            return false;
        case NodeKind::FieldScope:
            return eval_node(idx, *node.children[0], node.field);
    }
    return false;
}

std::string leaf_stem(const QueryNode& node) {
    if (node.kind == NodeKind::Term) return node.wildcard ? node.stem + "*" : node.stem;
    std::string out;
    for (size_t i = 0; i < node.terms.size(); ++i) {
        if (i) out.push_back(' ');
        out += node.terms[i];
    }
    return out;
}

// Hits come from the subtrees that actually satisfied the query: every
// non-negated operand of a satisfied AND, and the true branches of an OR.
void collect_hits(const DocIndex& idx, const QueryNode& node, FieldSel scope,
                  std::vector<Hit>& out) {
    switch (node.kind) {
        case NodeKind::Term:
        case NodeKind::Phrase: {
            const std::string stem = leaf_stem(node);
            for (const auto& [f, p] : leaf_occurrences(idx, node, scope))
                out.push_back({stem, static_cast<Field>(f), p});
            break;
        }
        case NodeKind::Near:
            collect_hits(idx, *node.children[0], scope, out);
            collect_hits(idx, *node.children[1], scope, out);
            break;
        case NodeKind::And:
            for (const auto& c : node.children)
                if (c->kind != NodeKind::Not) collect_hits(idx, *c, scope, out);
            break;
        case NodeKind::Or:
            for (const auto& c : node.children)
                if (eval_node(idx, *c, scope)) collect_hits(idx, *c, scope, out);
            break;
        case NodeKind::FieldScope:
            collect_hits(idx, *node.children[0], node.field, out);
            break;
        case NodeKind::Not:
            break;
    }
}

// True when any satisfying document must contain one of the query's
// positive literals, which makes the literal prefilter sound for it.
bool requires_positive_literal(const QueryNode& node) {
    switch (node.kind) {
        case NodeKind::Term:
        case NodeKind::Phrase:
        case NodeKind::Near:
            return true;
        case NodeKind::Not:
            return false;
        case NodeKind::FieldScope:
            return requires_positive_literal(*node.children[0]);
        case NodeKind::And:
            for (const auto& c : node.children)
                if (requires_positive_literal(*c)) return true;
            return false;
        case NodeKind::Or:
            for (const auto& c : node.children)
                if (!requires_positive_literal(*c)) return false;
            return true;
    }
    return false;
}

}  // namespace

void LabelMatrix::add(MatchTrace trace) {
    labels[{trace.doc_id, trace.system, trace.sdg}].insert(trace.query_id);
    traces.push_back(std::move(trace));
}

void LabelMatrix::sort_traces() {
    std::sort(traces.begin(), traces.end(), [](const MatchTrace& a, const MatchTrace& b) {
        return std::tie(a.doc_id, a.system, a.sdg, a.query_id) <
               std::tie(b.doc_id, b.system, b.sdg, b.query_id);
    });
}

Engine::Engine(const std::vector<SystemDef>& systems) {
    if (systems.empty()) throw std::runtime_error("engine needs at least one system");
    for (const auto& sys : systems) {
        system_names_.push_back(sys.name);
        for (const auto& entry : sys.entries) {
            CompiledQuery q;
            q.system = sys.name;
            q.sdg = entry.sdg;
            q.query_id = entry.query_id;
            q.ast = clone_ast(*entry.query);
            q.prefilterable = requires_positive_literal(*q.ast);
            queries_.push_back(std::move(q));
        }
    }
    for (uint32_t i = 0; i < queries_.size(); ++i) {
        if (!queries_[i].prefilterable) {
            always_eval_.push_back(i);
            continue;
        }
        for (const auto& lit : query_literals(*queries_[i].ast).positives) {
            auto& dict = lit.wildcard ? wildcard_dict_ : exact_dict_;
            dict[lit.stem].push_back(i);
            if (lit.wildcard) max_wildcard_len_ = std::max(max_wildcard_len_, lit.stem.size());
        }
    }
}

Engine build_engine(const std::vector<SystemDef>& systems) { return Engine(systems); }

std::vector<MatchTrace> Engine::match_impl(const Document& doc, bool prefilter) const {
    DocIndex idx(doc);
    std::vector<char> candidate(queries_.size(), prefilter ? 0 : 1);
    if (prefilter) {
        for (const auto& [token, _] : idx.tokens) {
            if (auto it = exact_dict_.find(token); it != exact_dict_.end())
                for (uint32_t q : it->second) candidate[q] = 1;
            size_t maxlen = std::min(token.size(), max_wildcard_len_);
            for (size_t len = 3; len <= maxlen; ++len)
                if (auto it = wildcard_dict_.find(token.substr(0, len)); it != wildcard_dict_.end())
                    for (uint32_t q : it->second) candidate[q] = 1;
        }
        for (uint32_t q : always_eval_) candidate[q] = 1;
    }

    std::vector<MatchTrace> traces;
    for (uint32_t qi = 0; qi < queries_.size(); ++qi) {
        if (!candidate[qi]) continue;
        const CompiledQuery& q = queries_[qi];
        if (!eval_node(idx, *q.ast, FieldSel::Any)) continue;
        MatchTrace t{doc.id, q.system, q.sdg, q.query_id, {}};
        collect_hits(idx, *q.ast, FieldSel::Any, t.hits);
        traces.push_back(std::move(t));
    }
    return traces;
}

std::vector<MatchTrace> Engine::match_document(const Document& doc) const {
    return match_impl(doc, true);
}

std::vector<MatchTrace> Engine::match_document_exhaustive(const Document& doc) const {
    return match_impl(doc, false);
}

LabelMatrix label_corpus(const Engine& engine, const Corpus& corpus, int workers) {
    LabelMatrix matrix;
    matrix.n_docs = corpus.size();
    matrix.n_systems = engine.system_names().size();

    if (workers < 1) workers = 1;
    if (workers == 1 || corpus.docs.size() < 2) {
        for (const auto& doc : corpus.docs)
            for (auto& t : engine.match_document(doc)) matrix.add(std::move(t));
    } else {
        size_t n = corpus.docs.size();
        size_t nw = std::min<size_t>(workers, n);
        std::vector<std::vector<MatchTrace>> results(nw);
        std::vector<std::thread> threads;
        for (size_t w = 0; w < nw; ++w) {
            size_t lo = n * w / nw, hi = n * (w + 1) / nw;
            threads.emplace_back([&, lo, hi, w] {
                for (size_t i = lo; i < hi; ++i)
                    for (auto& t : engine.match_document(corpus.docs[i]))
                        results[w].push_back(std::move(t));
            });
        }
        for (auto& t : threads) t.join();
        for (auto& chunk : results)
            for (auto& t : chunk) matrix.add(std::move(t));
    }
    matrix.sort_traces();
    return matrix;
}

std::string label_dump_string(const LabelMatrix& labels) {
    std::ostringstream out;
    out << "doc_id,system,sdg,query_ids\n";
    for (const auto& [key, qids] : labels.labels) {
        const auto& [doc, sys, sdg] = key;
        std::string joined;
        for (const auto& q : qids) {
            if (!joined.empty()) joined.push_back(';');
            joined += q;
        }
        out << csv::join({doc, sys, std::to_string(sdg), joined}) << '\n';
    }
    return out.str();
}

void write_label_dump(const LabelMatrix& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write label dump: " + path);
    out << label_dump_string(labels);
}

void write_trace_dump(const LabelMatrix& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace dump: " + path);
    out << "doc_id,system,sdg,query_id,stem,field,position\n";
    for (const auto& t : labels.traces)
        for (const auto& h : t.hits)
            out << csv::join({t.doc_id, t.system, std::to_string(t.sdg), t.query_id, h.stem,
                              field_name(h.field), std::to_string(h.position)})
                << '\n';
}

LabelMatrix load_label_dump(const std::string& label_path, const std::string& trace_path) {
    LabelMatrix matrix;
    {
        std::ifstream in(label_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open label dump: " + label_path);
        auto header = csv::read_record(in);
        if (!header || header->size() < 4 || (*header)[0] != "doc_id")
            throw std::runtime_error("bad label dump header in " + label_path);
        while (auto row = csv::read_record(in)) {
            if (row->size() == 1 && (*row)[0].empty()) continue;
            auto& set = matrix.labels[{(*row)[0], (*row)[1], std::stoi((*row)[2])}];
            std::istringstream qs((*row)[3]);
            std::string qid;
            while (std::getline(qs, qid, ';'))
                if (!qid.empty()) set.insert(qid);
        }
    }
    std::ifstream in(trace_path, std::ios::binary);
    if (in) {
        auto header = csv::read_record(in);
        std::map<std::tuple<std::string, std::string, int, std::string>, size_t> index;
        while (auto row = csv::read_record(in)) {
            if (row->size() < 7) continue;
            std::tuple<std::string, std::string, int, std::string> key{(*row)[0], (*row)[1],
                                                                       std::stoi((*row)[2]), (*row)[3]};
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, matrix.traces.size()).first;
                matrix.traces.push_back({(*row)[0], (*row)[1], std::stoi((*row)[2]), (*row)[3], {}});
            }
            Field f = Field::Title;
            if ((*row)[5] == "abstract") f = Field::Abstract;
            else if ((*row)[5] == "keywords") f = Field::Keywords;
            matrix.traces[it->second].hits.push_back({(*row)[4], f, std::stoi((*row)[6])});
        }
        matrix.sort_traces();
    }
    return matrix;
}

}  // namespace sdglab
