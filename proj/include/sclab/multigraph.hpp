#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sclab/error.hpp"
#include "sclab/set_partition.hpp"

namespace sclab {

/// Unordered vertex pair, normalized so that u <= v. A loop has u == v.
struct Edge {
    int u = 0;
    int v = 0;

    Edge() = default;
    Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

    bool is_loop() const { return u == v; }
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct GraphClass {
    bool is_tree = false;
    bool is_fat_tree = false;
    bool is_double_tree = false;
    bool is_cyclic_graph = false;
    int cycle_count = 0;  // Ebar + components - V on the skeleton
};

/// Finite multigraph used as a test function: loops and repeated edges are
/// allowed, vertex labels are arbitrary integers. Immutable once built.
class TestGraph {
public:
    TestGraph() = default;

    /// Vertex set is the union of `vertices` and all edge endpoints.
    explicit TestGraph(std::vector<Edge> edges, std::vector<int> vertices = {})
        : vertices_(std::move(vertices)), edges_(std::move(edges)) {
        for (const Edge& e : edges_) {
            vertices_.push_back(e.u);
            vertices_.push_back(e.v);
        }
        std::sort(vertices_.begin(), vertices_.end());
        vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
        std::sort(edges_.begin(), edges_.end());
        for (std::size_t i = 0; i < edges_.size();) {
            std::size_t j = i;
            while (j < edges_.size() && edges_[j] == edges_[i]) ++j;
            distinct_.emplace_back(edges_[i], static_cast<int>(j - i));
            if (j - i == 1 && !edges_[i].is_loop()) ++simple_edges_;
            i = j;
        }
    }

    static TestGraph from_pairs(const std::vector<std::pair<int, int>>& pairs) {
        std::vector<Edge> edges;
        edges.reserve(pairs.size());
        for (auto [a, b] : pairs) edges.emplace_back(a, b);
        return TestGraph(std::move(edges));
    }

    const std::vector<int>& vertices() const { return vertices_; }
    /// Edges with multiplicity, sorted.
    const std::vector<Edge>& edges() const { return edges_; }
    /// Distinct edges with their multiplicities, sorted.
    const std::vector<std::pair<Edge, int>>& distinct_edges() const { return distinct_; }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int distinct_edge_count() const { return static_cast<int>(distinct_.size()); }
    int simple_edge_count() const { return simple_edges_; }

    bool is_simple() const {
        return std::all_of(distinct_.begin(), distinct_.end(),
                           [](const auto& em) { return em.second == 1 && !em.first.is_loop(); });
    }

    /// Position of `label` in the sorted vertex list, or -1.
    int index_of(int label) const {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), label);
        if (it == vertices_.end() || *it != label) return -1;
        return static_cast<int>(it - vertices_.begin());
    }

    /// Same graph relabeled to 1..V in increasing label order.
    TestGraph canonical() const {
        std::vector<Edge> edges;
        edges.reserve(edges_.size());
        for (const Edge& e : edges_) edges.emplace_back(index_of(e.u) + 1, index_of(e.v) + 1);
        std::vector<int> verts(vertices_.size());
        std::iota(verts.begin(), verts.end(), 1);
        return TestGraph(std::move(edges), std::move(verts));
    }

    friend bool operator==(const TestGraph& a, const TestGraph& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    std::vector<int> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::pair<Edge, int>> distinct_;
    int simple_edges_ = 0;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

}  // namespace detail

inline int component_count(const TestGraph& t) {
    detail::UnionFind uf(t.vertex_count());
    int comps = t.vertex_count();
    for (const auto& [e, mult] : t.distinct_edges())
        if (uf.unite(t.index_of(e.u), t.index_of(e.v))) --comps;
    return comps;
}

/// Loops count 2 toward the degree of their vertex.
inline std::vector<int> degrees(const TestGraph& t) {
    std::vector<int> deg(static_cast<std::size_t>(t.vertex_count()), 0);
    for (const Edge& e : t.edges()) {
        ++deg[static_cast<std::size_t>(t.index_of(e.u))];
        ++deg[static_cast<std::size_t>(t.index_of(e.v))];
    }
    return deg;
}

inline GraphClass classify(const TestGraph& t) {
    require(t.vertex_count() > 0, "classify: empty graph");
    GraphClass c;
    const int v = t.vertex_count();
    const int comps = component_count(t);
    const bool connected = comps == 1;
    const bool skeleton_has_loop = std::any_of(t.distinct_edges().begin(), t.distinct_edges().end(),
                                               [](const auto& em) { return em.first.is_loop(); });

    c.cycle_count = t.distinct_edge_count() + comps - v;
    c.is_fat_tree = connected && !skeleton_has_loop && t.distinct_edge_count() == v - 1;
    c.is_tree = c.is_fat_tree && t.edge_count() == t.distinct_edge_count();
    c.is_double_tree = c.is_fat_tree && std::all_of(t.distinct_edges().begin(), t.distinct_edges().end(),
                                                    [](const auto& em) { return em.second == 2; });
    const auto deg = degrees(t);
    c.is_cyclic_graph = connected && std::all_of(deg.begin(), deg.end(), [](int x) { return x % 2 == 0; });
    return c;
}

/// Simple cycle on {1..k}: edges {1,2},...,{k-1,k},{k,1}. k = 1 gives a loop,
/// k = 2 a double edge.
inline TestGraph cycle_graph(int k) {
    require(k >= 1, "cycle_graph: k must be >= 1");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) edges.emplace_back(i, i % k + 1);
    return TestGraph(std::move(edges));
}

/// Identifies vertices of `t` lying in a common block. Element i of the
/// partition stands for the i-th smallest vertex label; the quotient's
/// vertices are labeled 1..blocks in restricted-growth order.
inline TestGraph quotient(const TestGraph& t, const SetPartition& pi) {
    require(pi.ground_size() == t.vertex_count(),
            "quotient: partition ground set has " + std::to_string(pi.ground_size()) + " elements, graph has " +
                std::to_string(t.vertex_count()) + " vertices");
    std::vector<Edge> edges;
    edges.reserve(t.edges().size());
    for (const Edge& e : t.edges())
        edges.emplace_back(pi.block_of(t.index_of(e.u)) + 1, pi.block_of(t.index_of(e.v)) + 1);
    std::vector<int> verts(static_cast<std::size_t>(pi.block_count()));
    std::iota(verts.begin(), verts.end(), 1);
    return TestGraph(std::move(edges), std::move(verts));
}

/// Same, with blocks given as lists of vertex labels of `t`.
inline TestGraph quotient(const TestGraph& t, const std::vector<std::vector<int>>& label_blocks) {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(label_blocks.size());
    for (const auto& lb : label_blocks) {
        std::vector<int> b;
        for (int label : lb) {
            const int idx = t.index_of(label);
            require(idx >= 0, "quotient: label " + std::to_string(label) + " is not a vertex of the graph");
            b.push_back(idx);
        }
        blocks.push_back(std::move(b));
    }
    return quotient(t, SetPartition::from_blocks(blocks, t.vertex_count()));
}

/// Reads one edge per line, "u v" (a loop is "u u"). Blank lines and lines
/// starting with '#' are skipped.
inline TestGraph read_test_graph(std::istream& in) {
    std::vector<Edge> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int u = 0;
        int v = 0;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra))
            throw PreconditionError("graph file line " + std::to_string(lineno) + ": expected \"u v\"");
        edges.emplace_back(u, v);
    }
    return TestGraph(std::move(edges));
}

inline void write_test_graph(std::ostream& out, const TestGraph& t) {
    for (const Edge& e : t.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace sclab
