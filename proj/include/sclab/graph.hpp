#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sclab/error.hpp"

namespace sclab {

using VertexPair = std::pair<int, int>;

inline VertexPair ordered(int a, int b) { return a < b ? VertexPair{a, b} : VertexPair{b, a}; }

/// Simple undirected graph on vertices 0..N-1 stored as adjacency bit rows.
/// No loops; adding an existing edge or a loop is a logic error and throws.
class SimpleGraph {
public:
    SimpleGraph() = default;
    explicit SimpleGraph(int n)
        : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0),
          degree_(static_cast<std::size_t>(n), 0) {
        require(n >= 0, "SimpleGraph: negative vertex count");
    }

    int order() const { return n_; }
    std::size_t edge_count() const { return edges_; }
    int degree(int v) const { return degree_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& degrees() const { return degree_; }

    bool has_edge(int a, int b) const {
        return (bits_[static_cast<std::size_t>(a) * words_ + static_cast<std::size_t>(b >> 6)] >> (b & 63)) & 1U;
    }

    void add_edge(int a, int b) {
        if (a == b) throw PreconditionError("SimpleGraph: loop at vertex " + std::to_string(a));
        if (has_edge(a, b))
            throw PreconditionError("SimpleGraph: duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
        set_bit(a, b);
        set_bit(b, a);
        ++degree_[static_cast<std::size_t>(a)];
        ++degree_[static_cast<std::size_t>(b)];
        ++edges_;
    }

    void remove_edge(int a, int b) {
        if (!has_edge(a, b))
            throw PreconditionError("SimpleGraph: missing edge " + std::to_string(a) + "-" + std::to_string(b));
        clear_bit(a, b);
        clear_bit(b, a);
        --degree_[static_cast<std::size_t>(a)];
        --degree_[static_cast<std::size_t>(b)];
        --edges_;
    }

    /// Edges as (i, j) with i < j, in lexicographic order.
    std::vector<VertexPair> edges() const {
        std::vector<VertexPair> out;
        out.reserve(edges_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (has_edge(i, j)) out.emplace_back(i, j);
        return out;
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(degree(v)));
        for (int j = 0; j < n_; ++j)
            if (has_edge(v, j)) out.push_back(j);
        return out;
    }

    /// -1 unless every vertex has the same degree.
    int regular_degree() const {
        if (n_ == 0) return 0;
        const int d = degree_[0];
        return std::all_of(degree_.begin(), degree_.end(), [d](int x) { return x == d; }) ? d : -1;
    }

    SimpleGraph complement() const {
        SimpleGraph c(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (!has_edge(i, j)) c.add_edge(i, j);
        return c;
    }

    friend bool operator==(const SimpleGraph& a, const SimpleGraph& b) { return a.n_ == b.n_ && a.bits_ == b.bits_; }

    /// Raw row words; used as a hash key by enumeration-based tests.
    const std::vector<std::uint64_t>& bits() const { return bits_; }

private:
    void set_bit(int a, int b) {
        bits_[static_cast<std::size_t>(a) * words_ + static_cast<std::size_t>(b >> 6)] |= std::uint64_t{1} << (b & 63);
    }
    void clear_bit(int a, int b) {
        bits_[static_cast<std::size_t>(a) * words_ + static_cast<std::size_t>(b >> 6)] &= ~(std::uint64_t{1} << (b & 63));
    }

    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<int> degree_;
    std::size_t edges_ = 0;
};

/// A labeled simple d-regular graph. The type is a SimpleGraph; samplers in
/// this library guarantee the regularity invariant, checked by
/// check_regular().
using RegularGraphSample = SimpleGraph;

inline void check_regular(const SimpleGraph& g, int d) {
    require((static_cast<long long>(g.order()) * d) % 2 == 0, "regular graph: N*d must be even");
    for (int v = 0; v < g.order(); ++v)
        require(g.degree(v) == d, "regular graph: vertex " + std::to_string(v) + " has degree " +
                                      std::to_string(g.degree(v)) + ", expected " + std::to_string(d));
}

/// Required and forbidden vertex pairs (0-based) for constrained counts.
struct ConstraintSet {
    std::vector<VertexPair> required;
    std::vector<VertexPair> forbidden;

    void validate(int n) const {
        auto in_range = [n](const VertexPair& p) {
            return p.first >= 0 && p.first < n && p.second >= 0 && p.second < n && p.first != p.second;
        };
        for (const auto& p : required) require(in_range(p), "constraint: invalid required pair");
        for (const auto& p : forbidden) require(in_range(p), "constraint: invalid forbidden pair");
        for (const auto& r : required)
            for (const auto& f : forbidden)
                require(ordered(r.first, r.second) != ordered(f.first, f.second),
                        "constraint: pair " + std::to_string(r.first) + "-" + std::to_string(r.second) +
                            " both required and forbidden");
    }

    bool empty() const { return required.empty() && forbidden.empty(); }
};

/// Edge-list dump, one "u v" per line, 1-based labels.
inline void write_edge_list(std::ostream& out, const SimpleGraph& g) {
    for (auto [i, j] : g.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

}  // namespace sclab
