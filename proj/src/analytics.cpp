#include "sdglab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sdglab/csv.hpp"

namespace sdglab {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> systems_in(const LabelMatrix& labels) {
    std::set<std::string> names;
    for (const auto& [key, _] : labels.labels) names.insert(std::get<1>(key));
    return {names.begin(), names.end()};
}

}  // namespace

std::optional<double> CoverageReport::share(const std::string& system, int sdg) const {
    auto it = systems.find(system);
    if (it == systems.end() || it->second.labeled_docs == 0) return std::nullopt;
    auto st = it->second.sdg_docs.find(sdg);
    size_t n = st == it->second.sdg_docs.end() ? 0 : st->second;
    return static_cast<double>(n) / static_cast<double>(it->second.labeled_docs);
}

CoverageReport coverage(const LabelMatrix& labels, const Corpus& corpus) {
    CoverageReport report;
    report.corpus_size = corpus.size();
    std::map<std::string, std::set<std::string>> docs_by_system;
    std::map<std::pair<std::string, int>, std::set<std::string>> docs_by_cell;
    for (const auto& [key, _] : labels.labels) {
        const auto& [doc, sys, sdg] = key;
        docs_by_system[sys].insert(doc);
        docs_by_cell[{sys, sdg}].insert(doc);
    }
    for (const auto& [sys, docs] : docs_by_system) {
        auto& row = report.systems[sys];
        row.labeled_docs = docs.size();
        row.coverage = report.corpus_size == 0
                           ? 0.0
                           : static_cast<double>(docs.size()) / static_cast<double>(report.corpus_size);
    }
    for (const auto& [cell, docs] : docs_by_cell)
        report.systems[cell.first].sdg_docs[cell.second] = docs.size();
    return report;
}

TopicMatrix label_topic_matrix(const LabelMatrix& labels, const Corpus& corpus) {
    TopicMatrix matrix;
    for (const auto& [key, _] : labels.labels) {
        const auto& [doc_id, sys, sdg] = key;
        const Document* doc = corpus.find(doc_id);
        if (!doc || !doc->topic) {
            ++matrix.excluded_no_topic;
            continue;
        }
        ++matrix.cells[{sys, sdg}][doc->topic->meso_id];
    }
    return matrix;
}

std::optional<double> cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0, nu = 0, nv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0 || nv == 0) return std::nullopt;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::optional<double> cosine_sparse(const std::map<std::string, double>& u,
                                    const std::map<std::string, double>& v) {
    double dot = 0, nu = 0, nv = 0;
    for (const auto& [k, x] : u) {
        nu += x * x;
        auto it = v.find(k);
        if (it != v.end()) dot += x * it->second;
    }
    for (const auto& [k, x] : v) nv += x * x;
    if (nu == 0 || nv == 0) return std::nullopt;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

SimilarityReport pairwise_similarity(const LabelMatrix& labels, const Corpus& corpus,
                                     SimilarityLevel level) {
    SimilarityReport report;
    report.level = level;
    report.systems = systems_in(labels);
    const size_t n = report.systems.size();

    if (level == SimilarityLevel::Paper) {
        std::map<std::pair<std::string, int>, std::set<std::string>> members;
        for (const auto& [key, _] : labels.labels)
            members[{std::get<1>(key), std::get<2>(key)}].insert(std::get<0>(key));
        for (int sdg = 1; sdg <= kNumSdgs; ++sdg) {
            auto& m = report.matrices[sdg];
            m.assign(n, std::vector<std::optional<double>>(n));
            for (size_t a = 0; a < n; ++a) {
                auto ia = members.find({report.systems[a], sdg});
                if (ia == members.end()) continue;
                for (size_t b = a; b < n; ++b) {
                    auto ib = members.find({report.systems[b], sdg});
                    if (ib == members.end()) continue;
                    size_t inter = 0;
                    for (const auto& d : ia->second) inter += ib->second.count(d);
                    double c = static_cast<double>(inter) /
                               (std::sqrt(static_cast<double>(ia->second.size())) *
                                std::sqrt(static_cast<double>(ib->second.size())));
                    m[a][b] = m[b][a] = c;
                }
            }
        }
    } else {
        TopicMatrix topics = label_topic_matrix(labels, corpus);
        for (int sdg = 1; sdg <= kNumSdgs; ++sdg) {
            auto& m = report.matrices[sdg];
            m.assign(n, std::vector<std::optional<double>>(n));
            for (size_t a = 0; a < n; ++a) {
                auto ia = topics.cells.find({report.systems[a], sdg});
                if (ia == topics.cells.end() || ia->second.empty()) continue;
                std::map<std::string, double> va(ia->second.begin(), ia->second.end());
                for (size_t b = a; b < n; ++b) {
                    auto ib = topics.cells.find({report.systems[b], sdg});
                    if (ib == topics.cells.end() || ib->second.empty()) continue;
                    std::map<std::string, double> vb(ib->second.begin(), ib->second.end());
                    auto c = cosine_sparse(va, vb);
                    if (c) m[a][b] = m[b][a] = *c;
                }
            }
        }
    }
    return report;
}

std::vector<TopicDistribution> topic_distributions(const LabelMatrix& labels, const Corpus& corpus) {
    TopicMatrix matrix = label_topic_matrix(labels, corpus);
    std::vector<TopicDistribution> out;
    for (const auto& [cell, counts] : matrix.cells) {
        if (counts.empty()) continue;
        TopicDistribution dist;
        dist.system = cell.first;
        dist.sdg = cell.second;
        size_t total = 0;
        for (const auto& [_, c] : counts) total += c;
        dist.support_docs = total;
        for (const auto& [meso, c] : counts)
            dist.p[meso] = static_cast<double>(c) / static_cast<double>(total);
        out.push_back(std::move(dist));
    }
    return out;
}

double TopicSimilarityMatrix::at(const std::string& i, const std::string& j) const {
    if (i == j) return 1.0;
    auto it = entries.find(i < j ? std::make_pair(i, j) : std::make_pair(j, i));
    return it == entries.end() ? 0.0 : it->second;
}

TopicSimilarityMatrix load_topic_similarity(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open topic similarity file: " + path);
    auto header = csv::read_record(in);
    if (!header || header->size() < 3 || (*header)[0] != "meso_i")
        throw std::runtime_error("topic similarity CSV needs header meso_i,meso_j,s");
    TopicSimilarityMatrix s;
    size_t lineno = 1;
    while (auto row = csv::read_record(in)) {
        ++lineno;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() < 3)
            throw std::runtime_error("topic similarity row " + std::to_string(lineno) + " malformed");
        const std::string &a = (*row)[0], &b = (*row)[1];
        double v = std::stod((*row)[2]);
        if (v < 0.0 || v > 1.0)
            throw std::runtime_error("topic similarity row " + std::to_string(lineno) +
                                     ": s out of [0,1]");
        s.topics.insert(a);
        s.topics.insert(b);
        if (a != b) s.entries[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] = v;
    }
    return s;
}

DiversityValue diversity(const TopicDistribution& p, const TopicSimilarityMatrix& s) {
    double total = 0;
    for (const auto& [_, v] : p.p) total += v;
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("topic distribution is not normalized");
    if (!s.topics.empty())
        for (const auto& [topic, _] : p.p)
            if (!s.topics.count(topic))
                throw std::invalid_argument("similarity matrix lacks topic '" + topic + "'");

    double quad = 0;
    for (const auto& [ti, pi] : p.p)
        for (const auto& [tj, pj] : p.p) quad += s.at(ti, tj) * pi * pj;

    DiversityValue out;
    out.d = 1.0 / quad;
    for (const auto& [_, pi] : p.p)
        if (pi > 0) out.shannon -= pi * std::log(pi);
    return out;
}

DiversityReport diversity_report(const LabelMatrix& labels, const Corpus& corpus,
                                 const TopicSimilarityMatrix& s) {
    DiversityReport report;
    for (const auto& dist : topic_distributions(labels, corpus))
        report.rows.push_back({dist.system, dist.sdg, diversity(dist, s), dist.support_docs});
    return report;
}

std::vector<TopTopic> top_topics(const LabelMatrix& labels, const Corpus& corpus,
                                 const std::string& system, int sdg, size_t k) {
    if (k < 1) throw std::invalid_argument("top_topics: k must be >= 1");
    TopicMatrix matrix = label_topic_matrix(labels, corpus);
    auto it = matrix.cells.find({system, sdg});
    if (it == matrix.cells.end()) return {};
    size_t total = 0;
    for (const auto& [_, c] : it->second) total += c;
    std::vector<TopTopic> ranked;
    for (const auto& [meso, c] : it->second)
        ranked.push_back({meso, c, static_cast<double>(c) / static_cast<double>(total)});
    std::sort(ranked.begin(), ranked.end(), [](const TopTopic& a, const TopTopic& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.meso_id < b.meso_id;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

void write_coverage_csv(const CoverageReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "system,labeled_docs,coverage,sdg,sdg_docs,sdg_share\n";
    for (const auto& [sys, row] : report.systems) {
        out << csv::join({sys, std::to_string(row.labeled_docs), fmt(row.coverage), "ALL",
                          std::to_string(row.labeled_docs), "NA"})
            << '\n';
        for (int sdg = 1; sdg <= kNumSdgs; ++sdg) {
            auto it = row.sdg_docs.find(sdg);
            size_t docs = it == row.sdg_docs.end() ? 0 : it->second;
            auto share = report.share(sys, sdg);
            out << csv::join({sys, std::to_string(row.labeled_docs), fmt(row.coverage),
                              std::to_string(sdg), std::to_string(docs),
                              share ? fmt(*share) : "NA"})
                << '\n';
        }
    }
}

void write_similarity_csv(const SimilarityReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "sdg,system_a,system_b,cosine\n";
    for (const auto& [sdg, m] : report.matrices)
        for (size_t a = 0; a < report.systems.size(); ++a)
            for (size_t b = a; b < report.systems.size(); ++b)
                out << csv::join({std::to_string(sdg), report.systems[a], report.systems[b],
                                  m[a][b] ? fmt(*m[a][b]) : "NA"})
                    << '\n';
}

void write_diversity_csv(const DiversityReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "system,sdg,D,shannon,support_docs\n";
    for (const auto& row : report.rows)
        out << csv::join({row.system, std::to_string(row.sdg),
                          row.value ? fmt(row.value->d) : "NA",
                          row.value ? fmt(row.value->shannon) : "NA",
                          std::to_string(row.support_docs)})
            << '\n';
}

void write_top_topics_csv(const std::vector<TopTopic>& topics, const std::string& system, int sdg,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "system,sdg,rank,meso_id,count,fraction\n";
    for (size_t i = 0; i < topics.size(); ++i)
        out << csv::join({system, std::to_string(sdg), std::to_string(i + 1), topics[i].meso_id,
                          std::to_string(topics[i].count), fmt(topics[i].fraction)})
            << '\n';
}

namespace {

std::string heat_color(double v, double clamp) {
    double t = clamp > 0 ? std::min(v / clamp, 1.0) : 1.0;
    // white -> dark blue ramp
    int r = static_cast<int>(std::lround(255 - 225 * t));
    int g = static_cast<int>(std::lround(255 - 190 * t));
    int b = static_cast<int>(std::lround(255 - 95 * t));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void write_similarity_svg(const SimilarityReport& report, double clamp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const int cell = 28, label_w = 90, pad = 16, title_h = 20;
    const size_t n = report.systems.size();
    const int block_w = label_w + static_cast<int>(n) * cell + pad;
    const int block_h = title_h + static_cast<int>(n) * cell + pad;
    const int cols = 4;
    const int rows = (kNumSdgs + cols - 1) / cols;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * block_w << "\" height=\""
        << rows * block_h << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    int block = 0;
    for (int sdg = 1; sdg <= kNumSdgs; ++sdg, ++block) {
        auto it = report.matrices.find(sdg);
        int ox = (block % cols) * block_w, oy = (block / cols) * block_h;
        out << "<text x=\"" << ox + label_w << "\" y=\"" << oy + 12 << "\">SDG-" << sdg
            << "</text>\n";
        for (size_t a = 0; a < n; ++a) {
            out << "<text x=\"" << ox + label_w - 4 << "\" y=\""
                << oy + title_h + static_cast<int>(a) * cell + cell / 2 + 3
                << "\" text-anchor=\"end\">" << report.systems[a] << "</text>\n";
            for (size_t b = 0; b < n; ++b) {
                std::optional<double> v;
                if (it != report.matrices.end()) v = it->second[a][b];
                int x = ox + label_w + static_cast<int>(b) * cell;
                int y = oy + title_h + static_cast<int>(a) * cell;
                out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell - 1
                    << "\" height=\"" << cell - 1 << "\" fill=\""
                    << (v ? heat_color(*v, clamp) : "#f0f0f0") << "\"/>\n";
                out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 3
                    << "\" text-anchor=\"middle\">" << (v ? fmt(*v).substr(0, 4) : "NA")
                    << "</text>\n";
            }
        }
    }
    out << "</svg>\n";
}

}  // namespace sdglab
