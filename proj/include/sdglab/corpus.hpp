#ifndef SDGLAB_CORPUS_HPP
#define SDGLAB_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sdglab {

enum class Field : uint8_t { Title = 0, Abstract = 1, Keywords = 2 };

inline constexpr const char* field_name(Field f) {
    switch (f) {
        case Field::Title: return "title";
        case Field::Abstract: return "abstract";
        case Field::Keywords: return "keywords";
    }
    return "?";
}

// Gap inserted between consecutive author keywords in the keywords token
// stream so phrases and proximity windows never span two keywords.
inline constexpr int kKeywordPositionGap = 100;

struct TopicAssignment {
    std::string micro_id;
    std::string meso_id;
    std::string macro_id;
};

struct Token {
    std::string text;
    int position = 0;
};

struct Document {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> keywords;
    int year = 0;
    std::optional<TopicAssignment> topic;
    // micro topic id carried inline by the corpus file, resolved by attach_topics
    std::string topic_micro_hint;

    // Token streams, filled by Corpus on load.
    std::vector<Token> title_tokens;
    std::vector<Token> abstract_tokens;
    std::vector<Token> keyword_tokens;

    const std::vector<Token>& tokens(Field f) const {
        switch (f) {
            case Field::Title: return title_tokens;
            case Field::Abstract: return abstract_tokens;
            case Field::Keywords: return keyword_tokens;
        }
        return title_tokens;
    }
};

struct TopicTaxonomy {
    struct Micro { std::string id, name, meso_id; };
    struct Meso { std::string id, name, macro_id; };
    struct Macro { std::string id, name; };

    std::unordered_map<std::string, Micro> micro;
    std::unordered_map<std::string, Meso> meso;
    std::unordered_map<std::string, Macro> macro;

    // Resolves micro -> (micro, meso, macro); nullopt if micro unknown.
    std::optional<TopicAssignment> resolve(const std::string& micro_id) const;
};

struct Corpus {
    std::vector<Document> docs;
    std::unordered_map<std::string, size_t> index_by_id;
    size_t skipped_rows = 0;

    const Document* find(const std::string& id) const {
        auto it = index_by_id.find(id);
        return it == index_by_id.end() ? nullptr : &docs[it->second];
    }
    size_t size() const { return docs.size(); }

    // (doc id, micro id) pairs collected from inline topic_micro columns.
    std::vector<std::pair<std::string, std::string>> inline_assignments() const;
};

// NFKC-normalized, lowercased maximal runs of letters/digits.
std::vector<std::string> tokenize(const std::string& text);

// Fills the per-field token streams of a document (keywords get the
// kKeywordPositionGap spacing rule).
void tokenize_document(Document& doc);

enum class CorpusFormat { Jsonl, Csv };

// Throws std::runtime_error on unreadable file or duplicate id. Rows
// missing an id or with all text fields empty are skipped and counted.
Corpus load_corpus(const std::string& path, CorpusFormat format);

// Writes the corpus back out in the same JSONL schema.
void save_corpus_jsonl(const Corpus& corpus, const std::string& path);

// Header: micro_id,micro_name,meso_id,meso_name,macro_id,macro_name
TopicTaxonomy load_taxonomy(const std::string& path);

// Header: doc_id,micro_id
std::vector<std::pair<std::string, std::string>> load_topic_assignments(const std::string& path);

struct AttachResult {
    size_t attached = 0;
    std::vector<std::string> unknown_docs;
    std::vector<std::string> unknown_micros;
};

AttachResult attach_topics(Corpus& corpus, const TopicTaxonomy& taxonomy,
                           const std::vector<std::pair<std::string, std::string>>& assignments);

}  // namespace sdglab

#endif
