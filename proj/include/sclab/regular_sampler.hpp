#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sclab/error.hpp"
#include "sclab/graph.hpp"
#include "sclab/rng.hpp"

namespace sclab {

inline constexpr int kMaxConfigurationDegree = 12;
/// Above this degree the rejection rate of the pairing model (about
/// exp(-(d^2-1)/4) acceptance) makes the switch chain the faster choice.
inline constexpr int kAutoConfigurationDegree = 6;

inline void check_regular_params(int n, int d) {
    require(n >= 1, "regular graph: N must be >= 1");
    require(d >= 0 && d <= n - 1,
            "regular graph: d=" + std::to_string(d) + " outside [0, N-1] for N=" + std::to_string(n));
    require((static_cast<long long>(n) * d) % 2 == 0,
            "regular graph: N*d must be even (N=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

/// Exhaustive enumeration is allowed for N <= 12 when d = 3 and N <= 10 otherwise.
inline bool enumerable(int n, int d) { return d == 3 ? n <= 12 : n <= 10; }

namespace detail {

/// Row-by-row backtracking over the upper triangle of the adjacency matrix.
/// Vertex i picks its partners among j > i; a vertex's row is closed only
/// when its degree is exactly d. Pair status: 0 free, 1 required, 2 forbidden.
template <class Visitor>
class RegularEnumerator {
public:
    RegularEnumerator(int n, int d, const ConstraintSet& constraints, Visitor& visit)
        : n_(n), d_(d), graph_(n), status_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
          visit_(visit) {
        for (auto [a, b] : constraints.required) set_status(a, b, 1);
        for (auto [a, b] : constraints.forbidden) set_status(a, b, 2);
    }

    void run() {
        if (n_ > 0) step(0, 1);
    }

private:
    unsigned char status(int a, int b) const { return status_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)]; }
    void set_status(int a, int b, unsigned char s) {
        status_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)] = s;
        status_[static_cast<std::size_t>(b) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a)] = s;
    }

    // Vertex j, after row i is finished, can still gain edges from rows
    // i+1..j-1 and from its own row: at most N-2-i more.
    bool can_complete(int i, int j) const { return d_ - graph_.degree(j) <= n_ - 2 - i; }

    void step(int i, int j) {
        if (i == n_ - 1) {
            if (graph_.degree(i) == d_) visit_(static_cast<const SimpleGraph&>(graph_));
            return;
        }
        if (j == n_) {
            if (graph_.degree(i) != d_) return;
            step(i + 1, i + 2);
            return;
        }
        const int need = d_ - graph_.degree(i);
        const int slots_after = n_ - 1 - j;
        const unsigned char s = status(i, j);
        if (s != 2 && need > 0 && graph_.degree(j) < d_) {
            graph_.add_edge(i, j);
            step(i, j + 1);
            graph_.remove_edge(i, j);
        }
        if (s != 1 && need <= slots_after && can_complete(i, j)) step(i, j + 1);
    }

    int n_;
    int d_;
    SimpleGraph graph_;
    std::vector<unsigned char> status_;
    Visitor& visit_;
};

}  // namespace detail

/// Calls visit(const RegularGraphSample&) once for every labeled simple
/// d-regular graph on N vertices that contains all required pairs and none of
/// the forbidden ones. The graph reference is only valid during the call.
template <class Visitor>
void for_each_regular(int n, int d, const ConstraintSet& constraints, Visitor&& visit) {
    check_regular_params(n, d);
    require(enumerable(n, d), "enumerate_regular: (N=" + std::to_string(n) + ", d=" + std::to_string(d) +
                                  ") exceeds the enumeration size guard");
    constraints.validate(n);
    detail::RegularEnumerator<std::remove_reference_t<Visitor>> e(n, d, constraints, visit);
    e.run();
}

template <class Visitor>
void for_each_regular(int n, int d, Visitor&& visit) {
    for_each_regular(n, d, ConstraintSet{}, std::forward<Visitor>(visit));
}

/// Materializes all d-regular graphs on N vertices. Meant for small cases.
inline std::vector<RegularGraphSample> enumerate_regular(int n, int d) {
    std::vector<RegularGraphSample> out;
    for_each_regular(n, d, [&](const SimpleGraph& g) { out.push_back(g); });
    return out;
}

inline std::uint64_t count_regular(int n, int d, const ConstraintSet& constraints = {}) {
    std::uint64_t count = 0;
    for_each_regular(n, d, constraints, [&](const SimpleGraph&) { ++count; });
    return count;
}

/// Pairing-model draw with rejection: exactly uniform over simple d-regular
/// graphs. Each attempt shuffles the N*d half-edges and pairs them up; the
/// attempt is discarded as soon as a loop or repeated pair appears.
inline RegularGraphSample sample_configuration(int n, int d, Rng& rng, long long max_attempts = 10'000'000) {
    check_regular_params(n, d);
    require(d <= kMaxConfigurationDegree, "sample_configuration: d=" + std::to_string(d) + " above the limit " +
                                              std::to_string(kMaxConfigurationDegree));
    std::vector<int> points(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < d; ++k) points[static_cast<std::size_t>(v) * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = v;
    for (long long attempt = 1; attempt <= max_attempts; ++attempt) {
        SimpleGraph g(n);
        bool ok = true;
        // Fisher-Yates, pairing positions 2t and 2t+1 as they are fixed.
        for (std::size_t t = 0; ok && t + 1 < points.size(); t += 2) {
            for (std::size_t s = t; s < t + 2; ++s) {
                const std::size_t r = s + static_cast<std::size_t>(rng.below(points.size() - s));
                std::swap(points[s], points[r]);
            }
            const int a = points[t];
            const int b = points[t + 1];
            if (a == b || g.has_edge(a, b)) ok = false;
            else g.add_edge(a, b);
        }
        if (ok) return g;
    }
    throw RetryLimitError("sample_configuration: no simple pairing found", max_attempts);
}

/// Deterministic circulant d-regular graph: i ~ i+-1, ..., i+-floor(d/2), plus
/// the antipode i+N/2 when d is odd.
inline RegularGraphSample circulant_regular(int n, int d) {
    check_regular_params(n, d);
    SimpleGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int s = 1; s <= d / 2; ++s) {
            const int j = (i + s) % n;
            if (!g.has_edge(i, j)) g.add_edge(i, j);
        }
    if (d % 2 == 1)
        for (int i = 0; i < n / 2; ++i) g.add_edge(i, i + n / 2);
    return g;
}

/// Double-edge-swap Markov chain. Each proposal picks two distinct edges
/// uniformly, orients each at random as (a,b), (c,e), and rewires to {a,c},
/// {b,e} when the four vertices are distinct and both new pairs are absent.
/// The proposal is symmetric, so the uniform law on d-regular graphs is
/// stationary.
class SwitchChain {
public:
    SwitchChain(int n, int d) : graph_(circulant_regular(n, d)), edges_(graph_.edges()) {
        require(d > 0 && d < n - 1, "sample_switch_mcmc: requires 0 < d < N-1 (N=" + std::to_string(n) +
                                        ", d=" + std::to_string(d) + ")");
    }

    /// One proposal; true when accepted.
    bool propose(Rng& rng) {
        const std::uint64_t m = edges_.size();
        const std::uint64_t i = rng.below(m);
        std::uint64_t j = rng.below(m - 1);
        if (j >= i) ++j;
        const std::uint64_t orient = rng() >> 62;
        auto [a, b] = edges_[i];
        auto [c, e] = edges_[j];
        if (orient & 1U) std::swap(a, b);
        if (orient & 2U) std::swap(c, e);
        if (a == c || a == e || b == c || b == e) return false;
        if (graph_.has_edge(a, c) || graph_.has_edge(b, e)) return false;
        graph_.remove_edge(a, b);
        graph_.remove_edge(c, e);
        graph_.add_edge(a, c);
        graph_.add_edge(b, e);
        edges_[i] = ordered(a, c);
        edges_[j] = ordered(b, e);
        return true;
    }

    /// Runs until `accepted` swaps have been applied.
    void run(Rng& rng, long long accepted) {
        const long long cap = 1000 * accepted + 100'000;
        long long done = 0;
        long long proposals = 0;
        while (done < accepted) {
            if (++proposals > cap)
                throw ConvergenceError("sample_switch_mcmc: only " + std::to_string(done) + " of " +
                                       std::to_string(accepted) + " swaps accepted in " + std::to_string(cap) +
                                       " proposals");
            if (propose(rng)) ++done;
        }
    }

    const RegularGraphSample& graph() const { return graph_; }

private:
    SimpleGraph graph_;
    std::vector<VertexPair> edges_;
};

inline long long default_burn_in(int n, int d) { return 100LL * n * d; }

inline RegularGraphSample sample_switch_mcmc(int n, int d, Rng& rng, long long burn_in_swaps) {
    check_regular_params(n, d);
    require(burn_in_swaps >= 0, "sample_switch_mcmc: negative burn-in");
    SwitchChain chain(n, d);
    chain.run(rng, burn_in_swaps);
    return chain.graph();
}

enum class SamplerKind { automatic, configuration, switch_mcmc };

inline const char* to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::configuration: return "configuration";
        case SamplerKind::switch_mcmc: return "switch_mcmc";
        default: return "automatic";
    }
}

/// Configuration-with-rejection for d <= 6, switch chain with 100*N*d
/// accepted swaps otherwise. The degenerate d = 0 and d = N-1 graphs are
/// returned directly.
inline RegularGraphSample sample_regular(int n, int d, Rng& rng, SamplerKind kind = SamplerKind::automatic) {
    check_regular_params(n, d);
    if (d == 0) return SimpleGraph(n);
    if (d == n - 1) return SimpleGraph(n).complement();
    if (kind == SamplerKind::automatic)
        kind = d <= kAutoConfigurationDegree ? SamplerKind::configuration : SamplerKind::switch_mcmc;
    if (kind == SamplerKind::configuration) return sample_configuration(n, d, rng);
    return sample_switch_mcmc(n, d, rng, default_burn_in(n, d));
}

/// Each unordered pair is included independently with probability p.
inline SimpleGraph sample_erdos_renyi(int n, double p, Rng& rng) {
    require(n >= 0, "sample_erdos_renyi: negative N");
    require(p >= 0.0 && p <= 1.0, "sample_erdos_renyi: p outside [0, 1]");
    SimpleGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) g.add_edge(i, j);
    return g;
}

// ---------------------------------------------------------------------------
// 2K-gon switching

/// Alternating polygon v1, w1, ..., vK, wK (0-based vertices). Indices wrap:
/// v_{K+1} = v1.
using Polygon = std::vector<int>;

inline void check_polygon(const Polygon& p, int n) {
    require(p.size() % 2 == 0, "polygon: odd number of vertices");
    require(p.size() >= 4, "polygon: K must be >= 2 (a K=1 polygon rewires an edge onto itself)");
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "polygon: vertices are not distinct");
    for (int v : p) require(v >= 0 && v < n, "polygon: vertex " + std::to_string(v) + " out of range");
}

/// Pairs {v_k, w_k}.
inline std::vector<VertexPair> polygon_spokes(const Polygon& p) {
    std::vector<VertexPair> out;
    for (std::size_t k = 0; k < p.size(); k += 2) out.push_back(ordered(p[k], p[k + 1]));
    return out;
}

/// Pairs {w_k, v_{k+1}}.
inline std::vector<VertexPair> polygon_links(const Polygon& p) {
    std::vector<VertexPair> out;
    for (std::size_t k = 0; k < p.size(); k += 2) out.push_back(ordered(p[k + 1], p[(k + 2) % p.size()]));
    return out;
}

/// The same polygon traversed backwards from v1: (v1, wK, vK, ..., w1). Its
/// spokes are the links of `p` and vice versa.
inline Polygon inverse_polygon(const Polygon& p) {
    Polygon out;
    out.reserve(p.size());
    out.push_back(p.front());
    for (std::size_t i = p.size() - 1; i >= 1; --i) out.push_back(p[i]);
    return out;
}

/// Removes every {v_k, w_k} and inserts every {w_k, v_{k+1}}. Degrees are
/// unchanged. Requires all spokes present and all links absent.
inline RegularGraphSample switch_2kgon(const RegularGraphSample& g, const Polygon& p) {
    check_polygon(p, g.order());
    for (auto [a, b] : polygon_spokes(p))
        require(g.has_edge(a, b), "switch_2kgon: edge " + std::to_string(a) + "-" + std::to_string(b) + " is absent");
    for (auto [a, b] : polygon_links(p))
        require(!g.has_edge(a, b), "switch_2kgon: edge " + std::to_string(a) + "-" + std::to_string(b) + " is present");
    SimpleGraph out = g;
    for (auto [a, b] : polygon_spokes(p)) out.remove_edge(a, b);
    for (auto [a, b] : polygon_links(p)) out.add_edge(a, b);
    return out;
}

enum class PolygonMode {
    spokes_present,  // v_k ~ w_k and w_k !~ v_{k+1}
    links_present,   // v_k !~ w_k and w_k ~ v_{k+1}
};

/// Number of d-regular graphs on N vertices matching the polygon pattern
/// selected by `mode` together with the extra constraints. An empty polygon
/// counts the constrained family itself.
inline std::uint64_t count_constrained(int n, int d, const Polygon& p, PolygonMode mode,
                                       const ConstraintSet& constraints) {
    constraints.validate(n);
    ConstraintSet all = constraints;
    if (!p.empty()) {
        check_polygon(p, n);
        auto spokes = polygon_spokes(p);
        auto links = polygon_links(p);
        auto clash = [&](const VertexPair& e) {
            const auto key = ordered(e.first, e.second);
            auto hit = [&](const std::vector<VertexPair>& v) {
                return std::any_of(v.begin(), v.end(), [&](const VertexPair& x) { return ordered(x.first, x.second) == key; });
            };
            return hit(constraints.required) || hit(constraints.forbidden);
        };
        for (const auto& e : spokes)
            require(!clash(e), "count_constrained: polygon edge " + std::to_string(e.first) + "-" +
                                   std::to_string(e.second) + " overlaps the constraint set");
        for (const auto& e : links)
            require(!clash(e), "count_constrained: polygon edge " + std::to_string(e.first) + "-" +
                                   std::to_string(e.second) + " overlaps the constraint set");
        auto& present = all.required;
        auto& absent = all.forbidden;
        if (mode == PolygonMode::spokes_present) {
            present.insert(present.end(), spokes.begin(), spokes.end());
            absent.insert(absent.end(), links.begin(), links.end());
        } else {
            present.insert(present.end(), links.begin(), links.end());
            absent.insert(absent.end(), spokes.begin(), spokes.end());
        }
    }
    return count_regular(n, d, all);
}

}  // namespace sclab
