#ifndef SDGLAB_COOCCUR_HPP
#define SDGLAB_COOCCUR_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdglab/corpus.hpp"
#include "sdglab/matcher.hpp"

namespace sdglab {

struct CooccurrenceNetwork {
    struct Node {
        std::string stem;
        size_t count = 0;                 // documents containing a hit on this stem
        std::optional<std::string> cluster_hint;  // meso topic of highest incidence
    };
    struct Edge {
        std::string a, b;  // a < b lexicographically
        size_t weight = 0; // documents where both stems hit
    };
    std::vector<Node> nodes;  // sorted by stem
    std::vector<Edge> edges;  // sorted by (a, b)

    bool empty() const { return nodes.empty(); }
};

// Co-occurrence unit is the document: an edge counts documents of the
// (system, sdg) selection whose hit-stem sets contain both endpoints.
// Edges below min_edge_weight and nodes left isolated are dropped.
CooccurrenceNetwork build_network(const LabelMatrix& labels, const Corpus& corpus,
                                  const std::string& system, int sdg, size_t min_edge_weight = 5,
                                  const std::optional<std::set<std::string>>& topic_filter = std::nullopt);

enum class NetworkFormat { Pajek, Vosviewer };

// Pajek: single <base>.net file. VOSviewer: <base>_map.txt + <base>_network.txt.
// Returns the written paths. Throws on an empty network.
std::vector<std::string> export_network(const CooccurrenceNetwork& net, NetworkFormat format,
                                        const std::string& base_path);

CooccurrenceNetwork parse_pajek(const std::string& path);
CooccurrenceNetwork parse_vosviewer(const std::string& map_path, const std::string& network_path);

}  // namespace sdglab

#endif
