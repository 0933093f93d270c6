#include "doctest.h"

#include <filesystem>
#include <random>

#include "naive_eval.hpp"
#include "sdglab/matcher.hpp"
#include "test_helpers.hpp"

using namespace sdglab;
using testutil::make_corpus;
using testutil::make_doc;
using testutil::make_system;

namespace {

std::set<std::tuple<std::string, std::string, int>> label_set(const LabelMatrix& m) {
    std::set<std::tuple<std::string, std::string, int>> out;
    for (const auto& [key, _] : m.labels) out.insert(key);
    return out;
}

}  // namespace

TEST_CASE("wildcard term matches with a trace hit") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{10, "q1", "migrat*"}}));
    Engine engine = build_engine(systems);

    Document doc = make_doc("d1", "", "migration of cancer cells");
    auto traces = engine.match_document(doc);
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].query_id == "q1");
    REQUIRE(traces[0].hits.size() == 1);
    CHECK(traces[0].hits[0].stem == "migrat*");
    CHECK(traces[0].hits[0].field == Field::Abstract);
    CHECK(traces[0].hits[0].position == 0);
}

TEST_CASE("phrase order matters") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{10, "q1", "\"income inequality\""}}));
    Engine engine = build_engine(systems);

    CHECK(engine.match_document(make_doc("d1", "", "inequality income")).empty());
    CHECK(engine.match_document(make_doc("d2", "", "rising income inequality here")).size() == 1);
}

TEST_CASE("ordered proximity W/n measures start-position distance") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{10, "q1", "income W/3 gap"}}));
    Engine engine = build_engine(systems);

    // positions: reduce=0 the=1 income=2 and=3 wealth=4 gap=5 -> distance 3
    CHECK(engine.match_document(make_doc("d1", "", "reduce the income and wealth gap")).size() == 1);
    // distance 4 exceeds the window
    CHECK(engine.match_document(make_doc("d2", "", "income and the wealth and gap")).empty());
    // wrong order never matches W/n
    CHECK(engine.match_document(make_doc("d3", "", "gap in income")).empty());
}

TEST_CASE("unordered NEAR accepts both orders") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{1, "q1", "poverty NEAR/3 alleviation"}}));
    Engine engine = build_engine(systems);
    CHECK(engine.match_document(make_doc("d1", "", "poverty needs urgent alleviation")).size() == 1);
    CHECK(engine.match_document(make_doc("d2", "", "alleviation of poverty")).size() == 1);
    CHECK(engine.match_document(make_doc("d3", "", "poverty a b c d alleviation")).empty());
}

TEST_CASE("NOT excludes documents") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{3, "q1", "health AND NOT animal"}}));
    Engine engine = build_engine(systems);
    CHECK(engine.match_document(make_doc("d1", "", "human health study")).size() == 1);
    CHECK(engine.match_document(make_doc("d2", "", "animal health study")).empty());
}

TEST_CASE("field scope restricts matching") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{13, "q1", "title:climate"}, {5, "q2", "keywords:\"gender equality\""}}));
    Engine engine = build_engine(systems);

    CHECK(engine.match_document(make_doc("d1", "climate outlook", "nothing else")).size() == 1);
    CHECK(engine.match_document(make_doc("d2", "other title", "climate in abstract only")).empty());

    auto kw = engine.match_document(make_doc("d3", "t", "", {"gender equality"}));
    REQUIRE(kw.size() == 1);
    CHECK(kw[0].query_id == "q2");
    // phrase must not span two keywords
    CHECK(engine.match_document(make_doc("d4", "t", "", {"gender", "equality"})).empty());
}

TEST_CASE("phrases never span fields") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{1, "q1", "\"alpha beta\""}}));
    Engine engine = build_engine(systems);
    // alpha at end of title, beta at start of abstract
    CHECK(engine.match_document(make_doc("d1", "ends with alpha", "beta starts here")).empty());
}

TEST_CASE("one label with two query ids when two queries of a cell match") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{1, "qa", "poverty"}, {1, "qb", "income"}}));
    Engine engine = build_engine(systems);
    Corpus corpus = make_corpus({make_doc("d1", "", "poverty and income")});
    LabelMatrix m = label_corpus(engine, corpus);
    REQUIRE(m.labels.size() == 1);
    const auto& qids = m.labels.begin()->second;
    CHECK(qids == std::set<std::string>{"qa", "qb"});
    CHECK(m.traces.size() == 2);
}

TEST_CASE("empty corpus labels to an empty matrix") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{1, "q1", "poverty"}}));
    LabelMatrix m = label_corpus(build_engine(systems), Corpus{});
    CHECK(m.labels.empty());
    CHECK(m.traces.empty());
}

namespace {

// Random corpora and random queries for the prefilter soundness property.
Document random_doc(std::mt19937& rng, int id) {
    static const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta", "omega",
                                                   "sigma", "kappa", "zeta",  "theta"};
    auto sentence = [&](int len) {
        std::string s;
        for (int i = 0; i < len; ++i) {
            if (i) s.push_back(' ');
            s += vocab[rng() % vocab.size()];
        }
        return s;
    };
    return make_doc("r" + std::to_string(id), sentence(3 + rng() % 3), sentence(6 + rng() % 10),
                    {sentence(1 + rng() % 2)});
}

std::string random_query(std::mt19937& rng) {
    static const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta", "omega",
                                                   "sigma", "kappa", "zeta",  "theta"};
    auto term = [&]() {
        std::string t = vocab[rng() % vocab.size()];
        if (rng() % 4 == 0) t = t.substr(0, 3 + rng() % 2) + "*";
        return t;
    };
    switch (rng() % 8) {
        case 0: return term();
        case 1: return "\"" + vocab[rng() % vocab.size()] + " " + vocab[rng() % vocab.size()] + "\"";
        case 2: return term() + " AND " + term();
        case 3: return term() + " OR " + term();
        case 4: return term() + " AND NOT " + term();
        case 5: return vocab[rng() % vocab.size()] + " NEAR/" + std::to_string(1 + rng() % 4) + " " +
                       vocab[rng() % vocab.size()];
        case 6: return vocab[rng() % vocab.size()] + " W/" + std::to_string(1 + rng() % 4) + " " +
                       vocab[rng() % vocab.size()];
        default: {
            const char* fields[] = {"title:", "abstract:", "keywords:"};
            return std::string(fields[rng() % 3]) + "(" + term() + " OR " + term() + ")";
        }
    }
}

}  // namespace

TEST_CASE("prefilter soundness: prefiltered == exhaustive == naive oracle") {
    std::mt19937 rng(2019);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Document> docs;
        for (int i = 0; i < 30; ++i) docs.push_back(random_doc(rng, i));
        Corpus corpus = make_corpus(std::move(docs));

        std::vector<SystemDef> systems;
        std::vector<std::tuple<int, std::string, std::string>> entries;
        for (int q = 0; q < 12; ++q)
            entries.emplace_back(1 + static_cast<int>(rng() % 17), "q" + std::to_string(q),
                                 random_query(rng));
        systems.push_back(make_system("R", entries));
        Engine engine = build_engine(systems);

        auto expected = naive::label(systems, corpus);
        std::set<std::tuple<std::string, std::string, int>> prefiltered, exhaustive;
        for (const auto& doc : corpus.docs) {
            for (const auto& t : engine.match_document(doc))
                prefiltered.insert({t.doc_id, t.system, t.sdg});
            for (const auto& t : engine.match_document_exhaustive(doc))
                exhaustive.insert({t.doc_id, t.system, t.sdg});
        }
        CHECK(prefiltered == exhaustive);
        CHECK(prefiltered == expected);
    }
}

TEST_CASE("determinism: 1 vs 8 workers give byte-identical dumps") {
    std::mt19937 rng(7);
    std::vector<Document> docs;
    for (int i = 0; i < 120; ++i) docs.push_back(random_doc(rng, i));
    Corpus corpus = make_corpus(std::move(docs));

    std::vector<SystemDef> systems;
    std::vector<std::tuple<int, std::string, std::string>> entries;
    for (int q = 0; q < 20; ++q)
        entries.emplace_back(1 + static_cast<int>(rng() % 17), "q" + std::to_string(q),
                             random_query(rng));
    systems.push_back(make_system("R", entries));
    Engine engine = build_engine(systems);

    LabelMatrix m1 = label_corpus(engine, corpus, 1);
    LabelMatrix m8 = label_corpus(engine, corpus, 8);
    CHECK(label_dump_string(m1) == label_dump_string(m8));
    REQUIRE(m1.traces.size() == m8.traces.size());
}

TEST_CASE("monotonicity: adding a document never removes labels") {
    std::mt19937 rng(99);
    std::vector<Document> docs;
    for (int i = 0; i < 40; ++i) docs.push_back(random_doc(rng, i));

    std::vector<SystemDef> systems;
    systems.push_back(make_system("R", {{1, "q1", "alpha AND beta"},
                                        {2, "q2", "gamma OR delt*"},
                                        {3, "q3", "omega NEAR/3 sigma"}}));
    Engine engine = build_engine(systems);

    Corpus small = make_corpus({docs.begin(), docs.begin() + 30});
    Corpus big = make_corpus(std::move(docs));
    auto before = label_set(label_corpus(engine, small));
    auto after = label_set(label_corpus(engine, big));
    for (const auto& key : before) CHECK(after.count(key) == 1);
}

TEST_CASE("trace hits always reference existing token positions") {
    std::mt19937 rng(11);
    std::vector<Document> docs;
    for (int i = 0; i < 50; ++i) docs.push_back(random_doc(rng, i));
    Corpus corpus = make_corpus(std::move(docs));

    std::vector<SystemDef> systems;
    std::vector<std::tuple<int, std::string, std::string>> entries;
    for (int q = 0; q < 15; ++q)
        entries.emplace_back(1 + static_cast<int>(rng() % 17), "q" + std::to_string(q),
                             random_query(rng));
    systems.push_back(make_system("R", entries));
    LabelMatrix m = label_corpus(build_engine(systems), corpus);

    for (const auto& t : m.traces) {
        CHECK_FALSE(t.hits.empty());
        const Document* doc = corpus.find(t.doc_id);
        REQUIRE(doc != nullptr);
        for (const auto& h : t.hits) {
            bool found = false;
            for (const auto& tok : doc->tokens(h.field))
                if (tok.position == h.position) found = true;
            CHECK_MESSAGE(found, t.doc_id << " " << h.stem << " " << h.position);
        }
    }
}

TEST_CASE("label dump round-trips through load_label_dump") {
    std::vector<SystemDef> systems;
    systems.push_back(make_system("S", {{1, "qa", "poverty"}, {2, "qb", "hunger OR famine"}}));
    Corpus corpus = make_corpus({make_doc("d1", "", "poverty and hunger"),
                                 make_doc("d2", "", "famine relief")});
    LabelMatrix m = label_corpus(build_engine(systems), corpus);

    auto dir = std::filesystem::temp_directory_path();
    write_label_dump(m, (dir / "labels_rt.csv").string());
    write_trace_dump(m, (dir / "traces_rt.csv").string());
    LabelMatrix back = load_label_dump((dir / "labels_rt.csv").string(),
                                       (dir / "traces_rt.csv").string());
    CHECK(back.labels == m.labels);
    CHECK(label_dump_string(back) == label_dump_string(m));
    REQUIRE(back.traces.size() == m.traces.size());
    for (size_t i = 0; i < m.traces.size(); ++i)
        CHECK(back.traces[i].hits.size() == m.traces[i].hits.size());
}
