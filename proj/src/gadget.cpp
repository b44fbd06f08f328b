#include "spreadverify/gadget.hpp"

#include <algorithm>
#include <string>

namespace sv::gadget {

void graph::add_edge(std::size_t u, std::size_t v) {
    if (u >= m_vertices || v >= m_vertices) throw structural_error("edge endpoint out of range");
    if (u == v) throw structural_error("self-loops are not allowed");
    auto e = std::minmax(u, v);
    auto pos = std::lower_bound(m_edges.begin(), m_edges.end(), std::pair{e.first, e.second});
    if (pos != m_edges.end() && *pos == std::pair{e.first, e.second}) {
        throw structural_error("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    }
    m_edges.insert(pos, {e.first, e.second});
}

bool graph::adjacent(std::size_t u, std::size_t v) const {
    auto e = std::minmax(u, v);
    return std::binary_search(m_edges.begin(), m_edges.end(), std::pair{e.first, e.second});
}

std::vector<std::pair<std::size_t, std::size_t>> graph::complement_edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u != m_vertices; ++u) {
        for (std::size_t v = u + 1; v < m_vertices; ++v) {
            if (!adjacent(u, v)) out.emplace_back(u, v);
        }
    }
    return out;
}

graph parse_edge_list(std::istream& in) {
    long long n = -1, e = -1;
    if (!(in >> n >> e) || n < 0 || e < 0) throw input_error("edge list: expected header \"V E\"");
    graph g(static_cast<std::size_t>(n));
    for (long long i = 0; i != e; ++i) {
        long long u = -1, v = -1;
        if (!(in >> u >> v) || u < 0 || v < 0) {
            throw input_error("edge list: malformed edge on line " + std::to_string(i + 2));
        }
        g.add_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }
    return g;
}

reduction graph_to_ensemble(graph const& g) {
    if (g.vertices() == 0) throw input_error("graph must have at least one vertex");
    reduction r;
    auto const complement = g.complement_edges();
    for (std::size_t i = 0; i != complement.size(); ++i) r.feature_of[complement[i]] = i;
    r.dimension = complement.size();

    for (std::size_t v = 0; v != g.vertices(); ++v) {
        std::vector<std::size_t> features;
        for (auto const& [edge, f] : r.feature_of) {
            if (edge.first == v || edge.second == v) features.push_back(f);
        }
        std::sort(features.begin(), features.end());

        // build bottom-up so the first feature ends up at the root
        decision_tree chain = decision_tree::leaf(label::positive);
        for (auto it = features.rbegin(); it != features.rend(); ++it) {
            chain = decision_tree::split(*it, 1.0, decision_tree::leaf(label::negative), chain);
        }
        r.trees.push_back(std::move(chain));
    }
    return r;
}

bool clique_exists(graph const& g, std::size_t s) {
    std::size_t const n = g.vertices();
    if (n > 12) throw capacity_error("clique_exists is limited to 12 vertices");
    if (s == 0) return true;
    if (s > n) return false;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != s) continue;
        bool clique = true;
        for (std::size_t u = 0; u < n && clique; ++u) {
            if (!(mask >> u & 1u)) continue;
            for (std::size_t v = u + 1; v < n && clique; ++v) {
                if ((mask >> v & 1u) && !g.adjacent(u, v)) clique = false;
            }
        }
        if (clique) return true;
    }
    return false;
}

}  // namespace sv::gadget
