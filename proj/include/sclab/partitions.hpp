#pragma once

#include <cstdint>

#include "sclab/multigraph.hpp"
#include "sclab/set_partition.hpp"

namespace sclab {

struct CensusResult {
    int k = 0;
    std::uint64_t partitions = 0;    // Bell(k), by enumeration
    std::uint64_t double_trees = 0;  // partitions whose cycle quotient is a double tree
};

/// Enumerates every partition pi of [k] and counts those for which the
/// quotient of the k-cycle is a double tree. `rotation` shifts the cycle's
/// starting vertex before quotienting (the count does not depend on it).
inline CensusResult double_tree_census_full(int k, int rotation = 0) {
    require(k >= 1, "double_tree_census: k must be >= 1");
    TestGraph cycle = cycle_graph(k);
    if (rotation % k != 0) {
        std::vector<Edge> edges;
        for (int i = 1; i <= k; ++i) {
            auto shift = [&](int x) { return (x - 1 + rotation) % k + 1; };
            edges.emplace_back(shift(i), shift(i % k + 1));
        }
        cycle = TestGraph(std::move(edges));
    }
    CensusResult r;
    r.k = k;
    for (const SetPartition& pi : enumerate_partitions(k)) {
        ++r.partitions;
        // A double tree on B vertices has 2(B-1) edges.
        if (2 * (pi.block_count() - 1) != k) continue;
        if (classify(quotient(cycle, pi)).is_double_tree) ++r.double_trees;
    }
    return r;
}

inline std::uint64_t double_tree_census(int k) { return double_tree_census_full(k).double_trees; }

}  // namespace sclab
