#include "sdglab/cooccur.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdglab {

CooccurrenceNetwork build_network(const LabelMatrix& labels, const Corpus& corpus,
                                  const std::string& system, int sdg, size_t min_edge_weight,
                                  const std::optional<std::set<std::string>>& topic_filter) {
    if (sdg < 1 || sdg > 17) throw std::invalid_argument("sdg out of range 1..17");
    bool system_known = false;
    for (const auto& t : labels.traces)
        if (t.system == system) {
            system_known = true;
            break;
        }
    if (!system_known)
        for (const auto& [key, _] : labels.labels)
            if (std::get<1>(key) == system) {
                system_known = true;
                break;
            }
    if (!system_known) throw std::invalid_argument("unknown system '" + system + "'");

    // distinct hit stems per selected document
    std::map<std::string, std::set<std::string>> stems_by_doc;
    for (const auto& t : labels.traces) {
        if (t.system != system || t.sdg != sdg) continue;
        if (topic_filter) {
            const Document* doc = corpus.find(t.doc_id);
            if (!doc || !doc->topic || !topic_filter->count(doc->topic->meso_id)) continue;
        }
        auto& set = stems_by_doc[t.doc_id];
        for (const auto& h : t.hits) set.insert(h.stem);
    }

    std::map<std::string, size_t> node_count;
    std::map<std::pair<std::string, std::string>, size_t> edge_count;
    std::map<std::string, std::map<std::string, size_t>> meso_incidence;
    for (const auto& [doc_id, stems] : stems_by_doc) {
        const Document* doc = corpus.find(doc_id);
        for (const auto& s : stems) {
            ++node_count[s];
            if (doc && doc->topic) ++meso_incidence[s][doc->topic->meso_id];
        }
        for (auto a = stems.begin(); a != stems.end(); ++a)
            for (auto b = std::next(a); b != stems.end(); ++b) ++edge_count[{*a, *b}];
    }

    CooccurrenceNetwork net;
    std::set<std::string> connected;
    for (const auto& [pair, w] : edge_count) {
        if (w < min_edge_weight) continue;
        net.edges.push_back({pair.first, pair.second, w});
        connected.insert(pair.first);
        connected.insert(pair.second);
    }
    for (const auto& stem : connected) {
        CooccurrenceNetwork::Node node;
        node.stem = stem;
        node.count = node_count[stem];
        const auto& inc = meso_incidence[stem];
        if (!inc.empty()) {
            auto best = inc.begin();
            for (auto it = inc.begin(); it != inc.end(); ++it)
                if (it->second > best->second) best = it;
            node.cluster_hint = best->first;
        }
        net.nodes.push_back(std::move(node));
    }
    return net;
}

namespace {

std::string quote_pajek(const std::string& label) {
    std::string out = "\"";
    for (char ch : label)
        if (ch != '"') out.push_back(ch);
    out.push_back('"');
    return out;
}

}  // namespace

std::vector<std::string> export_network(const CooccurrenceNetwork& net, NetworkFormat format,
                                        const std::string& base_path) {
    if (net.empty()) throw std::runtime_error("refusing to export an empty network");

    std::map<std::string, size_t> id_by_stem;  // 1-based, in node order
    for (size_t i = 0; i < net.nodes.size(); ++i) id_by_stem[net.nodes[i].stem] = i + 1;

    if (format == NetworkFormat::Pajek) {
        const std::string path = base_path + ".net";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "*Vertices " << net.nodes.size() << "\n";
        for (size_t i = 0; i < net.nodes.size(); ++i)
            out << (i + 1) << " " << quote_pajek(net.nodes[i].stem) << "\n";
        out << "*Edges\n";
        for (const auto& e : net.edges)
            out << id_by_stem[e.a] << " " << id_by_stem[e.b] << " " << e.weight << "\n";
        return {path};
    }

    const std::string map_path = base_path + "_map.txt";
    const std::string net_path = base_path + "_network.txt";
    {
        std::ofstream out(map_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + map_path);
        out << "id\tlabel\tweight\n";
        for (size_t i = 0; i < net.nodes.size(); ++i)
            out << (i + 1) << "\t" << net.nodes[i].stem << "\t" << net.nodes[i].count << "\n";
    }
    {
        std::ofstream out(net_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + net_path);
        for (const auto& e : net.edges)
            out << id_by_stem[e.a] << "\t" << id_by_stem[e.b] << "\t" << e.weight << "\n";
    }
    return {map_path, net_path};
}

CooccurrenceNetwork parse_pajek(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    CooccurrenceNetwork net;
    std::map<size_t, std::string> label_by_id;
    std::string line;
    enum { None, Vertices, Edges } section = None;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("*Vertices", 0) == 0) { section = Vertices; continue; }
        if (line.rfind("*Edges", 0) == 0) { section = Edges; continue; }
        std::istringstream ls(line);
        if (section == Vertices) {
            size_t id;
            ls >> id;
            auto q1 = line.find('"');
            auto q2 = line.rfind('"');
            if (q1 == std::string::npos || q2 <= q1) throw std::runtime_error("bad vertex line: " + line);
            label_by_id[id] = line.substr(q1 + 1, q2 - q1 - 1);
            net.nodes.push_back({label_by_id[id], 0, std::nullopt});
        } else if (section == Edges) {
            size_t a, b, w;
            if (!(ls >> a >> b >> w)) throw std::runtime_error("bad edge line: " + line);
            std::string sa = label_by_id.at(a), sb = label_by_id.at(b);
            if (sb < sa) std::swap(sa, sb);
            net.edges.push_back({sa, sb, w});
        }
    }
    std::sort(net.nodes.begin(), net.nodes.end(),
              [](const auto& x, const auto& y) { return x.stem < y.stem; });
    std::sort(net.edges.begin(), net.edges.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return net;
}

CooccurrenceNetwork parse_vosviewer(const std::string& map_path, const std::string& network_path) {
    CooccurrenceNetwork net;
    std::map<size_t, std::string> label_by_id;
    {
        std::ifstream in(map_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + map_path);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (first && line.rfind("id\t", 0) == 0) { first = false; continue; }
            first = false;
            std::istringstream ls(line);
            std::string id, label, weight;
            std::getline(ls, id, '\t');
            std::getline(ls, label, '\t');
            std::getline(ls, weight, '\t');
            label_by_id[std::stoul(id)] = label;
            net.nodes.push_back({label, std::stoul(weight), std::nullopt});
        }
    }
    {
        std::ifstream in(network_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + network_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string a, b, w;
            std::getline(ls, a, '\t');
            std::getline(ls, b, '\t');
            std::getline(ls, w, '\t');
            std::string sa = label_by_id.at(std::stoul(a)), sb = label_by_id.at(std::stoul(b));
            if (sb < sa) std::swap(sa, sb);
            net.edges.push_back({sa, sb, std::stoul(w)});
        }
    }
    std::sort(net.nodes.begin(), net.nodes.end(),
              [](const auto& x, const auto& y) { return x.stem < y.stem; });
    std::sort(net.edges.begin(), net.edges.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return net;
}

}  // namespace sdglab
