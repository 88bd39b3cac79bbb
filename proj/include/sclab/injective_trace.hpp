#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sclab/error.hpp"
#include "sclab/matrixops.hpp"
#include "sclab/multigraph.hpp"
#include "sclab/set_partition.hpp"

namespace sclab {

inline constexpr int kDirectMaxVertices = 5;
inline constexpr int kDirectMaxOrder = 128;
inline constexpr int kInversionMaxVertices = 10;

enum class InjectiveMethod { automatic, direct, inversion };

namespace detail {

/// Per-vertex lists of edge factors whose later endpoint (in vertex order) is
/// that vertex, so the running product can be extended one vertex at a time.
struct EdgeSchedule {
    struct Factor {
        int other;  // earlier endpoint index (== self for loops)
        int power;
    };
    std::vector<std::vector<Factor>> at;

    explicit EdgeSchedule(const TestGraph& t) : at(static_cast<std::size_t>(t.vertex_count())) {
        for (const auto& [e, mult] : t.distinct_edges()) {
            const int a = t.index_of(e.u);
            const int b = t.index_of(e.v);
            at[static_cast<std::size_t>(std::max(a, b))].push_back({std::min(a, b), mult});
        }
    }
};

inline double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

inline double injective_direct_rec(const Matrix& m, const EdgeSchedule& sched, std::vector<int>& image,
                                   std::vector<char>& used, int depth, double partial) {
    const int n = static_cast<int>(m.rows());
    if (depth == static_cast<int>(image.size())) return partial;
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        if (used[static_cast<std::size_t>(x)]) continue;
        double f = partial;
        for (const auto& fac : sched.at[static_cast<std::size_t>(depth)]) {
            const int y = fac.other == depth ? x : image[static_cast<std::size_t>(fac.other)];
            f *= ipow(m(x, y), fac.power);
        }
        if (f == 0.0) continue;
        image[static_cast<std::size_t>(depth)] = x;
        used[static_cast<std::size_t>(x)] = 1;
        total += injective_direct_rec(m, sched, image, used, depth + 1, f);
        used[static_cast<std::size_t>(x)] = 0;
    }
    return total;
}

/// Dense table over a set of variables; entry index = sum_i x_i * N^i.
struct Factor {
    std::vector<int> vars;
    std::vector<double> table;
};

}  // namespace detail

/// Sum over all maps V -> [N] (not necessarily injective) of the product of
/// M entries along the edges. Evaluated by variable elimination, so the cost
/// is N^(largest intermediate arity) rather than N^|V|.
inline double homomorphism_sum(const TestGraph& t, const SymmetricMatrix& m) {
    using detail::Factor;
    const Matrix& x = m.dense();
    const int n = m.order();
    const int nv = t.vertex_count();
    std::vector<Factor> factors;
    std::vector<char> touched(static_cast<std::size_t>(nv), 0);
    for (const auto& [e, mult] : t.distinct_edges()) {
        const int a = t.index_of(e.u);
        const int b = t.index_of(e.v);
        touched[static_cast<std::size_t>(a)] = touched[static_cast<std::size_t>(b)] = 1;
        Factor f;
        if (a == b) {
            f.vars = {a};
            f.table.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) f.table[static_cast<std::size_t>(i)] = detail::ipow(x(i, i), mult);
        } else {
            f.vars = {std::min(a, b), std::max(a, b)};
            f.table.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    f.table[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(n)] =
                        detail::ipow(x(i, j), mult);
        }
        factors.push_back(std::move(f));
    }
    double scalar = 1.0;
    for (int v = 0; v < nv; ++v)
        if (!touched[static_cast<std::size_t>(v)]) scalar *= n;

    std::vector<char> alive(static_cast<std::size_t>(nv), 0);
    for (int v = 0; v < nv; ++v) alive[static_cast<std::size_t>(v)] = touched[static_cast<std::size_t>(v)];

    auto scope_of = [&](int v) {
        std::vector<int> scope;
        for (const Factor& f : factors)
            if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) scope.insert(scope.end(), f.vars.begin(), f.vars.end());
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
        return scope;
    };

    for (int round = 0; round < nv; ++round) {
        int best = -1;
        std::size_t best_size = 0;
        for (int v = 0; v < nv; ++v) {
            if (!alive[static_cast<std::size_t>(v)]) continue;
            const std::size_t sz = scope_of(v).size();
            if (best < 0 || sz < best_size) {
                best = v;
                best_size = sz;
            }
        }
        if (best < 0) break;
        alive[static_cast<std::size_t>(best)] = 0;

        const std::vector<int> scope = scope_of(best);
        std::vector<Factor> involved;
        std::vector<Factor> rest;
        for (Factor& f : factors) {
            if (std::find(f.vars.begin(), f.vars.end(), best) != f.vars.end()) involved.push_back(std::move(f));
            else rest.push_back(std::move(f));
        }
        Factor out;
        for (int v : scope)
            if (v != best) out.vars.push_back(v);
        std::size_t out_size = 1;
        for (std::size_t i = 0; i < out.vars.size(); ++i) out_size *= static_cast<std::size_t>(n);
        out.table.assign(out_size, 0.0);

        // Strides of every scope variable in each involved factor and in the output.
        const std::size_t s = scope.size();
        std::vector<std::vector<std::size_t>> strides(involved.size(), std::vector<std::size_t>(s, 0));
        std::vector<std::size_t> out_stride(s, 0);
        for (std::size_t fi = 0; fi < involved.size(); ++fi) {
            std::size_t st = 1;
            for (int var : involved[fi].vars) {
                const auto pos = static_cast<std::size_t>(std::find(scope.begin(), scope.end(), var) - scope.begin());
                strides[fi][pos] = st;
                st *= static_cast<std::size_t>(n);
            }
        }
        {
            std::size_t st = 1;
            for (int var : out.vars) {
                const auto pos = static_cast<std::size_t>(std::find(scope.begin(), scope.end(), var) - scope.begin());
                out_stride[pos] = st;
                st *= static_cast<std::size_t>(n);
            }
        }
        std::vector<int> digit(s, 0);
        std::vector<std::size_t> idx(involved.size(), 0);
        std::size_t oidx = 0;
        while (true) {
            double prod = 1.0;
            for (std::size_t fi = 0; fi < involved.size(); ++fi) prod *= involved[fi].table[idx[fi]];
            out.table[oidx] += prod;
            std::size_t p = 0;
            for (; p < s; ++p) {
                if (++digit[p] < n) {
                    for (std::size_t fi = 0; fi < involved.size(); ++fi) idx[fi] += strides[fi][p];
                    oidx += out_stride[p];
                    break;
                }
                digit[p] = 0;
                for (std::size_t fi = 0; fi < involved.size(); ++fi) idx[fi] -= strides[fi][p] * static_cast<std::size_t>(n - 1);
                oidx -= out_stride[p] * static_cast<std::size_t>(n - 1);
            }
            if (p == s) break;
        }
        rest.push_back(std::move(out));
        factors = std::move(rest);
    }
    for (const auto& f : factors) scalar *= f.table.at(0);
    return scalar;
}

/// Sum over injective maps phi: V -> [N] of prod_{{v,w} in E} M(phi(v), phi(w)).
inline double injective_trace_direct(const TestGraph& t, const SymmetricMatrix& m) {
    require(t.vertex_count() >= 1, "injective_trace: empty graph");
    require(t.vertex_count() <= kDirectMaxVertices && m.order() <= kDirectMaxOrder,
            "injective_trace: direct method limited to |V| <= " + std::to_string(kDirectMaxVertices) +
                " and N <= " + std::to_string(kDirectMaxOrder));
    if (t.vertex_count() > m.order()) return 0.0;
    detail::EdgeSchedule sched(t);
    std::vector<int> image(static_cast<std::size_t>(t.vertex_count()), -1);
    std::vector<char> used(static_cast<std::size_t>(m.order()), 0);
    return detail::injective_direct_rec(m.dense(), sched, image, used, 0, 1.0);
}

/// Moebius inversion on the partition lattice of V: the injective sum equals
/// sum_sigma mu(0, sigma) hom(T^sigma), mu(0, sigma) = prod_B (-1)^(|B|-1) (|B|-1)!.
inline double injective_trace_inversion(const TestGraph& t, const SymmetricMatrix& m) {
    require(t.vertex_count() >= 1, "injective_trace: empty graph");
    require(t.vertex_count() <= kInversionMaxVertices,
            "injective_trace: inversion method limited to |V| <= " + std::to_string(kInversionMaxVertices));
    double total = 0.0;
    for (const SetPartition& sigma : Partitions(t.vertex_count(), kInversionMaxVertices)) {
        double mu = 1.0;
        for (const auto& block : sigma.blocks()) {
            const int b = static_cast<int>(block.size());
            for (int f = 2; f < b; ++f) mu *= f;
            if (b % 2 == 0) mu = -mu;
        }
        total += mu * homomorphism_sum(quotient(t, sigma), m);
    }
    return total;
}

inline double injective_trace(const TestGraph& t, const SymmetricMatrix& m,
                              InjectiveMethod method = InjectiveMethod::automatic) {
    if (method == InjectiveMethod::automatic)
        method = (t.vertex_count() <= kDirectMaxVertices && m.order() <= kDirectMaxOrder) ? InjectiveMethod::direct
                                                                                          : InjectiveMethod::inversion;
    return method == InjectiveMethod::direct ? injective_trace_direct(t, m) : injective_trace_inversion(t, m);
}

inline constexpr int kMaxDecompositionK = 8;

/// |Tr M^k - sum_{pi in P(k)} Tr0[T_k^pi(M)]| / (|Tr M^k| + 1).
inline double check_trace_decomposition(const SymmetricMatrix& m, int k) {
    require(k >= 1 && k <= kMaxDecompositionK,
            "check_trace_decomposition: k must be in [1, " + std::to_string(kMaxDecompositionK) + "]");
    const double lhs = trace_power(m, k);
    const TestGraph cycle = cycle_graph(k);
    double rhs = 0.0;
    for (const SetPartition& pi : enumerate_partitions(k)) {
        if (pi.block_count() > m.order()) continue;  // no injective map exists
        rhs += injective_trace(quotient(cycle, pi), m);
    }
    return std::abs(lhs - rhs) / (std::abs(lhs) + 1.0);
}

}  // namespace sclab
