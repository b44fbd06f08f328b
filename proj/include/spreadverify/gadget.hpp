#pragma once

// Max-clique to large-spread-subset reduction, used to exercise the NP-hardness
// construction on small graphs.

#include "core.hpp"

#include <istream>
#include <map>
#include <utility>
#include <vector>

namespace sv::gadget {

/// Undirected simple graph on vertices 0..n-1.
class graph {
public:
    explicit graph(std::size_t vertices) : m_vertices(vertices) {}

    /// Throws structural_error on self-loops, duplicates or out-of-range vertices.
    void add_edge(std::size_t u, std::size_t v);
    bool adjacent(std::size_t u, std::size_t v) const;

    std::size_t vertices() const { return m_vertices; }
    std::size_t edges() const { return m_edges.size(); }
    /// Unordered pairs {u, v} with u < v not joined by an edge, in lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> complement_edges() const;

private:
    std::size_t m_vertices;
    std::vector<std::pair<std::size_t, std::size_t>> m_edges;  // kept sorted, u < v
};

/// Edge-list text: "V E" then E lines "u v", 0-based.
graph parse_edge_list(std::istream& in);

struct reduction {
    std::vector<decision_tree> trees;  // one per vertex
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> feature_of;  // complement edge -> feature
    std::size_t dimension = 0;
};

/// One feature per complement edge and one tree per vertex: a +1 leaf for complement-degree 0,
/// otherwise a chain testing each incident complement-edge feature (ascending) against 1,
/// with a -1 leaf on the left of every test and the chain continuing on the right.
reduction graph_to_ensemble(graph const& g);

/// Brute force over vertex subsets; limited to 12 vertices.
bool clique_exists(graph const& g, std::size_t s);

}  // namespace sv::gadget
