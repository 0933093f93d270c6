#include "sdglab/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>
#include <unicode/utf8.h>

#include "json.hpp"
#include "sdglab/csv.hpp"

namespace sdglab {

namespace {

const UNormalizer2* nfkc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFKCInstance(&status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC unavailable");
    return norm;
}

std::vector<UChar> to_utf16(const std::string& text) {
    std::vector<UChar> buf(text.size() + 1);
    int32_t len = 0;
    UErrorCode status = U_ZERO_ERROR;
    u_strFromUTF8(buf.data(), static_cast<int32_t>(buf.size()), &len, text.data(),
                  static_cast<int32_t>(text.size()), &status);
    if (U_FAILURE(status)) {
        // Fall back to lossy conversion for malformed UTF-8.
        status = U_ZERO_ERROR;
        len = 0;
        u_strFromUTF8WithSub(buf.data(), static_cast<int32_t>(buf.size()), &len, text.data(),
                             static_cast<int32_t>(text.size()), 0xFFFD, nullptr, &status);
        if (U_FAILURE(status)) return {};
    }
    buf.resize(len);
    return buf;
}

void append_utf8(std::string& out, UChar32 cp) {
    char tmp[U8_MAX_LENGTH];
    int32_t i = 0;
    UBool err = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(tmp), i, U8_MAX_LENGTH, cp, err);
    if (!err) out.append(tmp, i);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    if (text.empty()) return tokens;

    std::vector<UChar> u16 = to_utf16(text);
    if (u16.empty()) return tokens;

    const UNormalizer2* norm = nfkc_instance();
    UErrorCode status = U_ZERO_ERROR;
    std::vector<UChar> normed(u16.size() * 3 + 16);
    int32_t nlen = unorm2_normalize(norm, u16.data(), static_cast<int32_t>(u16.size()),
                                    normed.data(), static_cast<int32_t>(normed.size()), &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        status = U_ZERO_ERROR;
        normed.resize(nlen);
        nlen = unorm2_normalize(norm, u16.data(), static_cast<int32_t>(u16.size()),
                                normed.data(), nlen, &status);
    }
    if (U_FAILURE(status)) return tokens;

    std::string cur;
    for (int32_t i = 0; i < nlen;) {
        UChar32 cp;
        U16_NEXT(normed.data(), i, nlen, cp);
        if (u_isalnum(cp)) {
            append_utf8(cur, u_foldCase(cp, U_FOLD_CASE_DEFAULT));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

void tokenize_document(Document& doc) {
    auto fill = [](std::vector<Token>& out, const std::string& text) {
        out.clear();
        int pos = 0;
        for (auto& t : tokenize(text)) out.push_back({std::move(t), pos++});
    };
    fill(doc.title_tokens, doc.title);
    fill(doc.abstract_tokens, doc.abstract);

    doc.keyword_tokens.clear();
    int pos = 0;
    bool first = true;
    for (const auto& kw : doc.keywords) {
        auto toks = tokenize(kw);
        if (toks.empty()) continue;
        if (!first) pos += kKeywordPositionGap;
        first = false;
        for (auto& t : toks) doc.keyword_tokens.push_back({std::move(t), pos++});
    }
}

std::optional<TopicAssignment> TopicTaxonomy::resolve(const std::string& micro_id) const {
    auto mi = micro.find(micro_id);
    if (mi == micro.end()) return std::nullopt;
    auto me = meso.find(mi->second.meso_id);
    if (me == meso.end()) return std::nullopt;
    return TopicAssignment{micro_id, me->second.id, me->second.macro_id};
}

std::vector<std::pair<std::string, std::string>> Corpus::inline_assignments() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : docs)
        if (!d.topic_micro_hint.empty()) out.emplace_back(d.id, d.topic_micro_hint);
    return out;
}

namespace {

bool doc_has_text(const Document& d) {
    if (!d.title.empty() || !d.abstract.empty()) return true;
    for (const auto& kw : d.keywords)
        if (!kw.empty()) return true;
    return false;
}

void add_document(Corpus& corpus, Document&& doc) {
    if (doc.id.empty() || !doc_has_text(doc)) {
        ++corpus.skipped_rows;
        return;
    }
    if (corpus.index_by_id.count(doc.id))
        throw std::runtime_error("duplicate document id: " + doc.id);
    tokenize_document(doc);
    corpus.index_by_id.emplace(doc.id, corpus.docs.size());
    corpus.docs.push_back(std::move(doc));
}

Corpus load_jsonl(std::istream& in) {
    Corpus corpus;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            ++corpus.skipped_rows;
            continue;
        }
        Document d;
        d.id = j.value("id", std::string());
        d.title = j.value("title", std::string());
        d.abstract = j.value("abstract", std::string());
        if (j.contains("keywords") && j["keywords"].is_array())
            for (const auto& k : j["keywords"])
                if (k.is_string()) d.keywords.push_back(k.get<std::string>());
        d.year = j.value("year", 0);
        d.topic_micro_hint = j.value("topic_micro", std::string());
        add_document(corpus, std::move(d));
    }
    return corpus;
}

std::vector<std::string> split_semicolons(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ';') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Corpus load_csv(std::istream& in) {
    auto header = csv::read_record(in);
    if (!header) throw std::runtime_error("corpus CSV is empty");
    auto col = [&](const std::string& name) -> int {
        for (size_t i = 0; i < header->size(); ++i)
            if ((*header)[i] == name) return static_cast<int>(i);
        return -1;
    };
    int c_id = col("id"), c_title = col("title"), c_abstract = col("abstract"),
        c_keywords = col("keywords"), c_year = col("year"), c_topic = col("topic_micro");
    if (c_id < 0) throw std::runtime_error("corpus CSV missing 'id' column");

    Corpus corpus;
    auto get = [](const std::vector<std::string>& row, int idx) -> std::string {
        return (idx >= 0 && idx < static_cast<int>(row.size())) ? row[idx] : std::string();
    };
    while (auto row = csv::read_record(in)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        Document d;
        d.id = get(*row, c_id);
        d.title = get(*row, c_title);
        d.abstract = get(*row, c_abstract);
        d.keywords = split_semicolons(get(*row, c_keywords));
        const std::string year = get(*row, c_year);
        d.year = year.empty() ? 0 : std::atoi(year.c_str());
        d.topic_micro_hint = get(*row, c_topic);
        add_document(corpus, std::move(d));
    }
    return corpus;
}

}  // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return format == CorpusFormat::Jsonl ? load_jsonl(in) : load_csv(in);
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& d : corpus.docs) {
        nlohmann::json j;
        j["id"] = d.id;
        j["title"] = d.title;
        j["abstract"] = d.abstract;
        j["keywords"] = d.keywords;
        j["year"] = d.year;
        const std::string micro = d.topic ? d.topic->micro_id : d.topic_micro_hint;
        if (!micro.empty()) j["topic_micro"] = micro;
        out << j.dump() << '\n';
    }
}

TopicTaxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open taxonomy file: " + path);
    auto header = csv::read_record(in);
    if (!header || header->size() < 6 || (*header)[0] != "micro_id")
        throw std::runtime_error("taxonomy CSV needs header micro_id,micro_name,meso_id,meso_name,macro_id,macro_name");

    TopicTaxonomy tax;
    size_t lineno = 1;
    while (auto row = csv::read_record(in)) {
        ++lineno;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() < 6)
            throw std::runtime_error("taxonomy row " + std::to_string(lineno) + " has fewer than 6 columns");
        const auto& r = *row;
        auto [mi, inserted] = tax.micro.emplace(r[0], TopicTaxonomy::Micro{r[0], r[1], r[2]});
        if (!inserted && mi->second.meso_id != r[2])
            throw std::runtime_error("micro topic " + r[0] + " maps to two meso parents");
        auto [me, ins2] = tax.meso.emplace(r[2], TopicTaxonomy::Meso{r[2], r[3], r[4]});
        if (!ins2 && me->second.macro_id != r[4])
            throw std::runtime_error("meso topic " + r[2] + " maps to two macro parents");
        tax.macro.emplace(r[4], TopicTaxonomy::Macro{r[4], r[5]});
    }
    return tax;
}

std::vector<std::pair<std::string, std::string>> load_topic_assignments(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open assignment file: " + path);
    auto header = csv::read_record(in);
    if (!header || header->size() < 2)
        throw std::runtime_error("assignment CSV needs header doc_id,micro_id");
    std::vector<std::pair<std::string, std::string>> out;
    while (auto row = csv::read_record(in)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() >= 2) out.emplace_back((*row)[0], (*row)[1]);
    }
    return out;
}

AttachResult attach_topics(Corpus& corpus, const TopicTaxonomy& taxonomy,
                           const std::vector<std::pair<std::string, std::string>>& assignments) {
    AttachResult result;
    for (const auto& [doc_id, micro_id] : assignments) {
        auto it = corpus.index_by_id.find(doc_id);
        if (it == corpus.index_by_id.end()) {
            result.unknown_docs.push_back(doc_id);
            continue;
        }
        auto topic = taxonomy.resolve(micro_id);
        if (!topic) {
            result.unknown_micros.push_back(micro_id);
            continue;
        }
        corpus.docs[it->second].topic = std::move(topic);
        ++result.attached;
    }
    return result;
}

}  // namespace sdglab
