#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sclab/error.hpp"
#include "sclab/graph.hpp"
#include "sclab/matrixops.hpp"
#include "sclab/multigraph.hpp"
#include "sclab/parallel.hpp"
#include "sclab/rational.hpp"
#include "sclab/regular_sampler.hpp"
#include "sclab/report.hpp"
#include "sclab/rng.hpp"
#include "sclab/weights.hpp"

namespace sclab {

// ---------------------------------------------------------------------------
// Ensembles

/// A random weighted graph law: uniform d-regular or Erdos-Renyi G(N, p),
/// with i.i.d. weights.
struct Ensemble {
    enum class Kind { regular, erdos_renyi };

    Kind kind = Kind::regular;
    int n = 0;
    int d = 0;        // regular only
    double p = 0.0;   // Erdos-Renyi only
    WeightDistribution weights = WeightDistribution::constant();
    SamplerKind sampler = SamplerKind::automatic;

    static Ensemble regular(int n, int d, WeightDistribution w = WeightDistribution::constant(),
                            SamplerKind sampler = SamplerKind::automatic) {
        check_regular_params(n, d);
        Ensemble e;
        e.kind = Kind::regular;
        e.n = n;
        e.d = d;
        e.weights = w;
        e.sampler = sampler;
        return e;
    }

    static Ensemble erdos_renyi(int n, double p, WeightDistribution w = WeightDistribution::constant()) {
        require(n >= 2, "erdos_renyi: N must be >= 2");
        require(p >= 0.0 && p <= 1.0, "erdos_renyi: p outside [0, 1]");
        Ensemble e;
        e.kind = Kind::erdos_renyi;
        e.n = n;
        e.p = p;
        e.weights = w;
        return e;
    }

    /// Marginal probability that a fixed pair is an edge.
    double edge_probability() const { return kind == Kind::regular ? static_cast<double>(d) / (n - 1) : p; }
    double mean_degree() const { return kind == Kind::regular ? static_cast<double>(d) : p * (n - 1); }

    SimpleGraph sample(Rng& rng) const {
        return kind == Kind::regular ? sample_regular(n, d, rng, sampler) : sample_erdos_renyi(n, p, rng);
    }

    Json to_json() const {
        Json j;
        j["ensemble"] = kind == Kind::regular ? "regular" : "erdos_renyi";
        j["N"] = n;
        if (kind == Kind::regular) {
            j["d"] = d;
            j["sampler"] = to_string(sampler);
        } else {
            j["p"] = p;
        }
        j["weights"] = weights_to_json<Json>(weights);
        return j;
    }
};

/// Maps a simple test graph with labels in 1..N onto 0-based vertex pairs.
inline std::vector<VertexPair> embed_test_graph(const TestGraph& t, int n) {
    require(t.is_simple(), "test graph must be simple (no loops, no repeated edges)");
    std::vector<VertexPair> out;
    for (const Edge& e : t.edges()) {
        require(e.u >= 1 && e.v <= n, "test graph vertex outside [1, " + std::to_string(n) + "]");
        out.push_back(ordered(e.u - 1, e.v - 1));
    }
    return out;
}

namespace detail {

inline Json graph_params(int n, int d, const TestGraph& t) {
    Json j;
    j["N"] = n;
    j["d"] = d;
    Json edges = Json::array();
    for (const Edge& e : t.edges()) edges.push_back({e.u, e.v});
    j["T"] = edges;
    return j;
}

inline std::uint64_t cached_regular_count(int n, int d) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::uint64_t> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find({n, d}); it != cache.end()) return it->second;
    }
    const std::uint64_t c = count_regular(n, d);
    std::lock_guard lock(mutex);
    cache[{n, d}] = c;
    return c;
}

inline __int128 ipow128(__int128 base, int e) {
    __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// Product of centered edge indicators for one placement of T.
inline double centered_product(const SimpleGraph& g, const std::vector<VertexPair>& pairs, const std::vector<int>& image,
                               double p) {
    double prod = 1.0;
    for (auto [a, b] : pairs) prod *= (g.has_edge(image[static_cast<std::size_t>(a)], image[static_cast<std::size_t>(b)]) ? 1.0 : 0.0) - p;
    return prod;
}

/// Random injective map of the vertices {0..n-1} used by `pairs` into [N].
inline void random_placement(std::vector<int>& image, const std::vector<int>& used, int n, Rng& rng) {
    std::vector<int> taken;
    taken.reserve(used.size());
    for (int v : used) {
        int x;
        do x = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        while (std::find(taken.begin(), taken.end(), x) != taken.end());
        taken.push_back(x);
        image[static_cast<std::size_t>(v)] = x;
    }
}

}  // namespace detail

/// Histogram over all d-regular graphs on [N] of which edges of `pairs` are
/// present: bin `mask` counts graphs containing exactly the pairs whose bits
/// are set.
inline std::vector<std::uint64_t> edge_pattern_histogram(int n, int d, const std::vector<VertexPair>& pairs) {
    require(pairs.size() <= 20, "edge pattern histogram: more than 20 edges");
    std::vector<std::uint64_t> hist(std::size_t{1} << pairs.size(), 0);
    for_each_regular(n, d, [&](const SimpleGraph& g) {
        std::size_t mask = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (g.has_edge(pairs[i].first, pairs[i].second)) mask |= std::size_t{1} << i;
        ++hist[mask];
    });
    return hist;
}

// ---------------------------------------------------------------------------
// Correlation functions

/// Exact E[prod_i (1{e_i in G} - p)], p = d/(N-1), over the uniform d-regular
/// graph, by exhaustive enumeration. Each graph contributes
/// prod (N-1-d or -d) / (N-1)^n, accumulated in integers.
inline EstimateReport correlation_exact(int n, int d, const TestGraph& t) {
    const auto pairs = embed_test_graph(t, n);
    require(pairs.size() <= 20, "correlation_exact: more than 20 edges");
    const auto hist = edge_pattern_histogram(n, d, pairs);
    const int ne = static_cast<int>(pairs.size());
    __int128 num = 0;
    __int128 total = 0;
    for (std::size_t mask = 0; mask < hist.size(); ++mask) {
        const int present = std::popcount(mask);
        num += static_cast<__int128>(hist[mask]) * detail::ipow128(n - 1 - d, present) * detail::ipow128(-d, ne - present);
        total += static_cast<__int128>(hist[mask]);
    }
    require(total > 0, "correlation_exact: no d-regular graph on N vertices");
    const __int128 den = total * detail::ipow128(n - 1, ne);
    EstimateReport r = EstimateReport::exact("correlation", ratio_to_double(num, den), detail::graph_params(n, d, t));
    r.exact_value = make_rational(num, den);
    r.extra["graphs"] = static_cast<std::uint64_t>(total);
    return r;
}

/// Monte Carlo estimate of the correlation function under `ens`, centered at
/// the ensemble's edge probability. With placements > 1 each replica averages
/// over that many random relabelings of T, which leaves the expectation
/// unchanged because the law is invariant under vertex relabeling.
inline EstimateReport correlation_mc(const Ensemble& ens, const TestGraph& t, long long replicas, std::uint64_t seed,
                                     int workers = 1, int placements = 1) {
    const auto pairs0 = embed_test_graph(t, ens.n);
    require(replicas >= 1, "correlation_mc: replicas must be >= 1");
    require(placements >= 1, "correlation_mc: placements must be >= 1");
    // Compress T's labels to 0..|V|-1 for relabeling.
    const TestGraph canon = t.canonical();
    std::vector<VertexPair> local;
    for (const Edge& e : canon.edges()) local.emplace_back(e.u - 1, e.v - 1);
    std::vector<int> used(static_cast<std::size_t>(canon.vertex_count()));
    std::iota(used.begin(), used.end(), 0);
    std::vector<int> identity(static_cast<std::size_t>(ens.n));
    std::iota(identity.begin(), identity.end(), 0);
    const double p = ens.edge_probability();

    const auto values = run_replicas(replicas, workers, [&](long long r) {
        Rng rng = replica_stream(seed, static_cast<std::uint64_t>(r));
        const SimpleGraph g = ens.sample(rng);
        if (placements == 1) return detail::centered_product(g, pairs0, identity, p);
        std::vector<int> image(used.size());
        CompensatedSum acc;
        for (int k = 0; k < placements; ++k) {
            detail::random_placement(image, used, ens.n, rng);
            acc.add(detail::centered_product(g, local, image, p));
        }
        return acc.value() / placements;
    });
    Json params = ens.to_json();
    params["T"] = detail::graph_params(ens.n, ens.d, t)["T"];
    params["seed"] = seed;
    params["placements"] = placements;
    EstimateReport rep = EstimateReport::monte_carlo("correlation", summarize(values), params);
    rep.extra["p"] = p;
    return rep;
}

// ---------------------------------------------------------------------------
// Subgraph containment probabilities

inline void attach_graphon_reference(EstimateReport& r, int n, double d, int edges) {
    const double ref_n = std::pow(d / n, edges);
    const double ref_n1 = std::pow(d / (n - 1), edges);
    r.reference = ref_n;
    r.extra["reference_d_over_N"] = ref_n;
    r.extra["reference_d_over_N_minus_1"] = ref_n1;
    r.extra["ratio"] = number_or_null(r.estimate / ref_n);
    r.extra["ratio_minus_one"] = number_or_null(r.estimate / ref_n - 1.0);
}

/// P(T subset G) for the uniform d-regular graph: (number of d-regular graphs
/// containing T) / (number of d-regular graphs), by constrained enumeration.
inline EstimateReport subgraph_probability_exact(int n, int d, const TestGraph& t) {
    const auto pairs = embed_test_graph(t, n);
    ConstraintSet c;
    c.required = pairs;
    const std::uint64_t hits = count_regular(n, d, c);
    const std::uint64_t total = detail::cached_regular_count(n, d);
    require(total > 0, "subgraph_probability: no d-regular graph on N vertices");
    EstimateReport r = EstimateReport::exact("subgraph_probability",
                                             static_cast<double>(hits) / static_cast<double>(total),
                                             detail::graph_params(n, d, t));
    r.exact_value = make_rational(hits, total);
    attach_graphon_reference(r, n, d, t.edge_count());
    return r;
}

inline EstimateReport subgraph_probability_mc(const Ensemble& ens, const TestGraph& t, long long replicas,
                                              std::uint64_t seed, int workers = 1) {
    const auto pairs = embed_test_graph(t, ens.n);
    require(replicas >= 1, "subgraph_probability: replicas must be >= 1");
    const auto values = run_replicas(replicas, workers, [&](long long r) {
        Rng rng = replica_stream(seed, static_cast<std::uint64_t>(r));
        const SimpleGraph g = ens.sample(rng);
        return std::all_of(pairs.begin(), pairs.end(), [&](const VertexPair& e) { return g.has_edge(e.first, e.second); })
                   ? 1.0
                   : 0.0;
    });
    Json params = ens.to_json();
    params["T"] = detail::graph_params(ens.n, ens.d, t)["T"];
    params["seed"] = seed;
    EstimateReport r = EstimateReport::monte_carlo("subgraph_probability", summarize(values), params);
    attach_graphon_reference(r, ens.n, ens.mean_degree(), t.edge_count());
    return r;
}

inline EstimateReport subgraph_probability(int n, int d, const TestGraph& t, Method method, long long replicas = 0,
                                           std::uint64_t seed = 0, int workers = 1) {
    if (method == Method::exact) return subgraph_probability_exact(n, d, t);
    return subgraph_probability_mc(Ensemble::regular(n, d), t, replicas, seed, workers);
}

/// Inclusion-exclusion over the 2^n edge subsets S of T:
/// sum_S (-p)^(n-|S|) P(S subset G), p = d/(N-1), each probability exact.
inline EstimateReport correlation_from_subgraph(int n, int d, const TestGraph& t) {
    const auto pairs = embed_test_graph(t, n);
    const int ne = static_cast<int>(pairs.size());
    require(ne <= 20, "correlation_from_subgraph: more than 20 edges");
    const std::uint64_t total = detail::cached_regular_count(n, d);
    require(total > 0, "correlation_from_subgraph: no d-regular graph on N vertices");
    // Common denominator total * (N-1)^n.
    __int128 num = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << ne); ++mask) {
        ConstraintSet c;
        for (int i = 0; i < ne; ++i)
            if (mask >> i & 1U) c.required.push_back(pairs[static_cast<std::size_t>(i)]);
        const int sz = static_cast<int>(c.required.size());
        const std::uint64_t hits = sz == 0 ? total : count_regular(n, d, c);
        num += static_cast<__int128>(hits) * detail::ipow128(-d, ne - sz) * detail::ipow128(n - 1, sz);
    }
    const __int128 den = static_cast<__int128>(total) * detail::ipow128(n - 1, ne);
    EstimateReport r = EstimateReport::exact("correlation_from_subgraph", ratio_to_double(num, den),
                                             detail::graph_params(n, d, t));
    r.exact_value = make_rational(num, den);
    return r;
}

// ---------------------------------------------------------------------------
// Scaling of the correlation function along a ladder of (N, d)

struct Rung {
    int n = 0;
    int d = 0;
    std::optional<Method> method;  // default: exact when cheap to enumerate
};

struct EpsilonRow {
    int n = 0;
    int d = 0;
    Method method = Method::exact;
    double correlation = 0.0;
    double correlation_se = 0.0;
    double eps = 0.0;            // correlation / (d/N)^n
    double eps_se = 0.0;
    double eps_n1 = 0.0;         // correlation / (d/(N-1))^n
    double normalized = 0.0;     // eps * d^(n/2)
    bool zero_consistent = false;
};

struct EpsilonTable {
    std::vector<EpsilonRow> rows;
    int fitted_points = 0;
    double slope = std::nan("");     // of log|eps| against log d
    double slope_ci_low = std::nan("");
    double slope_ci_high = std::nan("");
};

/// Exhaustive enumeration counts stay below ~2e7 graphs in this range.
inline bool exact_is_cheap(int n, int d) { return enumerable(n, d) && n <= 10 && std::min(d, n - 1 - d) <= 3; }

/// MC rungs with |c| <= kZeroSigmas * stderr are flagged as indistinguishable from 0.
inline constexpr double kZeroSigmas = 2.0;

inline EpsilonTable epsilon_scaling(const TestGraph& t, const std::vector<Rung>& ladder, long long replicas,
                                    std::uint64_t seed, int workers = 1, int placements = 64,
                                    Ensemble::Kind kind = Ensemble::Kind::regular) {
    require(!ladder.empty(), "epsilon_scaling: empty ladder");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        require(ladder[i].d >= ladder[i - 1].d, "epsilon_scaling: ladder must be sorted by increasing d");
    const int ne = t.edge_count();
    EpsilonTable table;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const Rung& rung = ladder[i];
        EpsilonRow row;
        row.n = rung.n;
        row.d = rung.d;
        const bool regular = kind == Ensemble::Kind::regular;
        row.method = rung.method.value_or(regular && exact_is_cheap(rung.n, rung.d) ? Method::exact : Method::monte_carlo);
        require(regular || row.method == Method::monte_carlo, "epsilon_scaling: Erdos-Renyi rungs are Monte Carlo only");
        if (row.method == Method::exact) {
            const EstimateReport r = correlation_exact(rung.n, rung.d, t);
            row.correlation = r.estimate;
            row.zero_consistent = r.exact_value ? r.exact_value->num == 0 : r.estimate == 0.0;
        } else {
            const Ensemble ens = regular ? Ensemble::regular(rung.n, rung.d)
                                         : Ensemble::erdos_renyi(rung.n, static_cast<double>(rung.d) / (rung.n - 1));
            const EstimateReport r = correlation_mc(ens, t, replicas, seed + i, workers, placements);
            row.correlation = r.estimate;
            row.correlation_se = r.std_error;
            row.zero_consistent = std::abs(r.estimate) <= kZeroSigmas * r.std_error;
        }
        const double a_n = std::pow(static_cast<double>(rung.d) / rung.n, ne);
        const double a_n1 = std::pow(static_cast<double>(rung.d) / (rung.n - 1), ne);
        row.eps = row.correlation / a_n;
        row.eps_se = row.correlation_se / a_n;
        row.eps_n1 = row.correlation / a_n1;
        row.normalized = row.eps * std::pow(static_cast<double>(rung.d), 0.5 * ne);
        table.rows.push_back(row);
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : table.rows)
        if (!row.zero_consistent) {
            xs.push_back(std::log(static_cast<double>(row.d)));
            ys.push_back(std::log(std::abs(row.eps)));
        }
    table.fitted_points = static_cast<int>(xs.size());
    const std::size_t m = xs.size();
    if (m >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (sxx > 0.0) {
            table.slope = sxy / sxx;
            if (m >= 3) {
                double sse = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double fit = my + table.slope * (xs[i] - mx);
                    sse += (ys[i] - fit) * (ys[i] - fit);
                }
                const double se = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
                const boost::math::students_t dist(static_cast<double>(m - 2));
                const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
                table.slope_ci_low = table.slope - q * se;
                table.slope_ci_high = table.slope + q * se;
            }
        }
    }
    return table;
}

inline Json to_json(const EpsilonTable& t) {
    Json j;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"N", r.n},
                        {"d", r.d},
                        {"method", to_string(r.method)},
                        {"correlation", number_or_null(r.correlation)},
                        {"correlation_stderr", number_or_null(r.correlation_se)},
                        {"eps", number_or_null(r.eps)},
                        {"eps_stderr", number_or_null(r.eps_se)},
                        {"eps_d_over_N_minus_1", number_or_null(r.eps_n1)},
                        {"eps_times_d_pow_half_n", number_or_null(r.normalized)},
                        {"zero_consistent", r.zero_consistent}});
    }
    j["rows"] = rows;
    j["fitted_points"] = t.fitted_points;
    j["slope"] = number_or_null(t.slope);
    j["slope_ci95"] = {number_or_null(t.slope_ci_low), number_or_null(t.slope_ci_high)};
    return j;
}

// ---------------------------------------------------------------------------
// Spectral moments

inline constexpr int kMaxMomentOrder = 12;

/// Standardized matrix of one draw from the ensemble.
inline SymmetricMatrix sample_standardized(const Ensemble& ens, Rng& rng) {
    const SimpleGraph g = ens.sample(rng);
    const EdgeWeights w = sample_weights(ens.weights, g, rng);
    return standardized_matrix(g, w, ens.weights, ens.mean_degree());
}

/// E[(1/N) Tr M^k] for k = 1..k_max, one report per k with the semicircle
/// moment as reference.
inline std::vector<EstimateReport> estimate_moments(const Ensemble& ens, int k_max, long long replicas,
                                                    std::uint64_t seed, int workers = 1) {
    require(k_max >= 1 && k_max <= kMaxMomentOrder,
            "estimate_moments: k_max must be in [1, " + std::to_string(kMaxMomentOrder) + "]");
    require(replicas >= 1, "estimate_moments: replicas must be >= 1");
    const auto per_replica = run_replicas(replicas, workers, [&](long long r) {
        Rng rng = replica_stream(seed, static_cast<std::uint64_t>(r));
        const SymmetricMatrix m = sample_standardized(ens, rng);
        auto tr = trace_powers(m, k_max);
        for (double& x : tr) x /= ens.n;
        return tr;
    });
    std::vector<EstimateReport> out;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<double> xs;
        xs.reserve(per_replica.size());
        for (const auto& tr : per_replica) xs.push_back(tr[static_cast<std::size_t>(k)]);
        Json params = ens.to_json();
        params["k"] = k;
        params["seed"] = seed;
        EstimateReport rep = EstimateReport::monte_carlo("moment", summarize(xs), params);
        rep.reference = semicircle_moment(k);
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Asymptotic freeness

/// Source index of the deterministic diagonal family in a word letter.
inline constexpr int kDeterministicSource = -1;

/// One letter P(X) = sum_j coeffs[j] X^j applied to a matrix source or to
/// the deterministic matrix Y. With `center`, the constant term is shifted
/// so that the letter has zero reference trace.
struct FreenessLetter {
    int source = 0;
    std::vector<double> coeffs;
    bool center = false;
};

struct FreenessWordSpec {
    std::string label;
    std::vector<FreenessLetter> letters;
};

/// Y = diag(f(i/N)), i = 1..N.
struct DeterministicFamily {
    std::string name = "2x-1";
    std::function<double(double)> f = [](double x) { return 2.0 * x - 1.0; };

    std::vector<double> diagonal(int n) const {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) y[static_cast<std::size_t>(i - 1)] = f(static_cast<double>(i) / n);
        return y;
    }
};

namespace detail {

/// Reference trace of P: the semicircle moments for random sources, the
/// finite-N empirical trace for Y.
inline double reference_trace(const FreenessLetter& l, const std::vector<double>& y) {
    double s = 0.0;
    if (l.source == kDeterministicSource) {
        for (double v : y) {
            double pw = 1.0;
            for (double c : l.coeffs) {
                s += c * pw;
                pw *= v;
            }
        }
        return s / static_cast<double>(y.size());
    }
    for (std::size_t j = 0; j < l.coeffs.size(); ++j) s += l.coeffs[j] * semicircle_moment(static_cast<int>(j));
    return s;
}

inline double reference_scale(const FreenessLetter& l) {
    double s = 1.0;
    for (std::size_t j = 0; j < l.coeffs.size(); ++j) s += std::abs(l.coeffs[j]) * std::max(1.0, semicircle_moment(static_cast<int>(j)));
    return s;
}

}  // namespace detail

/// Checks the alternation condition and (optionally) centering, and applies
/// the `center` shifts. Returns the letters to evaluate.
inline std::vector<FreenessLetter> prepare_word(const FreenessWordSpec& word, int sources, const std::vector<double>& y,
                                                bool require_centered) {
    require(!word.letters.empty(), "freeness: empty word");
    std::vector<FreenessLetter> out = word.letters;
    for (std::size_t i = 0; i < out.size(); ++i) {
        FreenessLetter& l = out[i];
        require(l.source == kDeterministicSource || (l.source >= 0 && l.source < sources),
                "freeness: letter " + std::to_string(i) + " references unknown source " + std::to_string(l.source));
        require(!l.coeffs.empty(), "freeness: letter " + std::to_string(i) + " has no coefficients");
        if (i > 0)
            require(out[i - 1].source != l.source,
                    "freeness: letters " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " use the same source (word must alternate)");
        if (l.center) {
            l.coeffs[0] -= detail::reference_trace(l, y);
            l.center = false;
        }
        if (require_centered) {
            const double ref = detail::reference_trace(l, y);
            require(std::abs(ref) <= 1e-12 * detail::reference_scale(l),
                    "freeness: letter " + std::to_string(i) + " is not centered (reference trace " + std::to_string(ref) + ")");
        }
    }
    return out;
}

namespace detail {

inline Matrix letter_matrix(const FreenessLetter& l, const std::vector<Matrix>& powers) {
    const auto n = powers.front().rows();
    Matrix out = Matrix::Identity(n, n) * l.coeffs[0];
    for (std::size_t j = 1; j < l.coeffs.size(); ++j)
        if (l.coeffs[j] != 0.0) out += l.coeffs[j] * powers[j - 1];
    return out;
}

inline Vector letter_diagonal(const FreenessLetter& l, const std::vector<double>& y) {
    Vector out(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        double s = 0.0;
        double pw = 1.0;
        for (double c : l.coeffs) {
            s += c * pw;
            pw *= y[i];
        }
        out(static_cast<Eigen::Index>(i)) = s;
    }
    return out;
}

}  // namespace detail

/// Estimates E[(1/N) Tr P_1(X_{i_1}) ... P_n(X_{i_n})] for every word, sharing
/// the sampled matrices across words. Source j of replica r draws from the
/// stream (seed, r * S + j), S = number of sources.
inline std::vector<EstimateReport> freeness_estimates(const std::vector<FreenessWordSpec>& words,
                                                      const std::vector<Ensemble>& sources,
                                                      const DeterministicFamily& family, long long replicas,
                                                      std::uint64_t seed, int workers = 1,
                                                      bool require_centered = true) {
    require(!sources.empty(), "freeness: no matrix sources");
    require(replicas >= 1, "freeness: replicas must be >= 1");
    const int n = sources.front().n;
    for (const auto& s : sources) require(s.n == n, "freeness: all sources must share N");
    const std::vector<double> y = family.diagonal(n);
    std::vector<std::vector<FreenessLetter>> prepared;
    std::vector<int> max_power(sources.size(), 1);
    for (const auto& w : words) {
        prepared.push_back(prepare_word(w, static_cast<int>(sources.size()), y, require_centered));
        for (const auto& l : prepared.back())
            if (l.source >= 0) max_power[static_cast<std::size_t>(l.source)] = std::max<int>(max_power[static_cast<std::size_t>(l.source)], static_cast<int>(l.coeffs.size()) - 1);
    }
    const auto nsrc = static_cast<std::uint64_t>(sources.size());

    const auto per_replica = run_replicas(replicas, workers, [&](long long r) {
        std::vector<std::vector<Matrix>> powers(sources.size());
        for (std::size_t s = 0; s < sources.size(); ++s) {
            Rng rng = replica_stream(seed, static_cast<std::uint64_t>(r) * nsrc + s);
            const SymmetricMatrix m = sample_standardized(sources[s], rng);
            powers[s].push_back(m.dense());
            for (int k = 2; k <= max_power[s]; ++k) {
                Matrix next(n, n);
                next.noalias() = powers[s].back() * m.dense();
                powers[s].push_back(std::move(next));
            }
        }
        std::vector<double> traces;
        for (const auto& letters : prepared) {
            // Running product of the first letters; the last one only enters the trace.
            Matrix acc;
            bool acc_diag = false;
            Vector acc_d;
            for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
                const auto& l = letters[i];
                if (l.source == kDeterministicSource) {
                    const Vector dg = detail::letter_diagonal(l, y);
                    if (i == 0) {
                        acc_diag = true;
                        acc_d = dg;
                    } else {
                        acc = acc * dg.asDiagonal();
                    }
                } else {
                    const Matrix lm = detail::letter_matrix(l, powers[static_cast<std::size_t>(l.source)]);
                    if (i == 0) acc = lm;
                    else if (acc_diag) {
                        acc = acc_d.asDiagonal() * lm;
                        acc_diag = false;
                    } else {
                        Matrix next(n, n);
                        next.noalias() = acc * lm;
                        acc = std::move(next);
                    }
                }
            }
            const auto& last = letters.back();
            double tr = 0.0;
            if (letters.size() == 1) {
                tr = last.source == kDeterministicSource
                         ? detail::letter_diagonal(last, y).sum()
                         : detail::letter_matrix(last, powers[static_cast<std::size_t>(last.source)]).trace();
            } else if (last.source == kDeterministicSource) {
                const Vector dg = detail::letter_diagonal(last, y);
                tr = acc_diag ? acc_d.dot(dg) : acc.diagonal().dot(dg);
            } else {
                const Matrix lm = detail::letter_matrix(last, powers[static_cast<std::size_t>(last.source)]);
                tr = acc_diag ? acc_d.dot(lm.diagonal()) : acc.cwiseProduct(lm.transpose()).sum();
            }
            traces.push_back(tr / n);
        }
        return traces;
    });

    double y_norm = 0.0;
    double y_trace = 0.0;
    for (double v : y) {
        y_norm = std::max(y_norm, std::abs(v));
        y_trace += v;
    }
    std::vector<EstimateReport> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::vector<double> xs;
        xs.reserve(per_replica.size());
        for (const auto& tr : per_replica) xs.push_back(tr[w]);
        Json params;
        params["N"] = n;
        Json srcs = Json::array();
        for (const auto& s : sources) srcs.push_back(s.to_json());
        params["sources"] = srcs;
        params["family"] = family.name;
        params["seed"] = seed;
        Json letters = Json::array();
        for (const auto& l : prepared[w])
            letters.push_back({{"source", l.source == kDeterministicSource ? Json("Y") : Json(l.source)}, {"coeffs", l.coeffs}});
        params["letters"] = letters;
        EstimateReport rep = EstimateReport::monte_carlo(words[w].label.empty() ? "word" : words[w].label,
                                                         summarize(xs), params);
        if (require_centered) rep.reference = 0.0;
        rep.extra["y_operator_norm"] = y_norm;
        rep.extra["y_normalized_trace"] = y_trace / n;
        out.push_back(std::move(rep));
    }
    return out;
}

/// Single-word form: the word must alternate and every letter must be
/// centered; the free limit of the estimate is 0.
inline EstimateReport freeness_test(const FreenessWordSpec& word, const std::vector<Ensemble>& sources,
                                    const DeterministicFamily& family, long long replicas, std::uint64_t seed,
                                    int workers = 1) {
    return freeness_estimates({word}, sources, family, replicas, seed, workers, true).front();
}

}  // namespace sclab
