#include <sstream>

#include <gtest/gtest.h>

#include "sclab/multigraph.hpp"
#include "sclab/rng.hpp"

namespace sclab {
namespace {

TestGraph G(std::vector<std::pair<int, int>> pairs) { return TestGraph::from_pairs(pairs); }

TEST(TestGraph, DerivedCounts) {
    const TestGraph t = G({{1, 2}, {2, 1}, {2, 3}, {3, 3}});
    EXPECT_EQ(t.vertex_count(), 3);
    EXPECT_EQ(t.edge_count(), 4);
    EXPECT_EQ(t.distinct_edge_count(), 3);
    EXPECT_EQ(t.simple_edge_count(), 1);  // {2,3}; the loop is not simple
    EXPECT_FALSE(t.is_simple());
}

TEST(TestGraph, IsolatedVerticesAreKept) {
    const TestGraph t({Edge(1, 2)}, {5});
    EXPECT_EQ(t.vertices(), (std::vector<int>{1, 2, 5}));
    EXPECT_EQ(component_count(t), 2);
}

TEST(Classify, DoubleEdgeIsSmallestDoubleTree) {
    const GraphClass c = classify(G({{1, 2}, {1, 2}}));
    EXPECT_TRUE(c.is_double_tree);
    EXPECT_TRUE(c.is_fat_tree);
    EXPECT_FALSE(c.is_tree);
    EXPECT_EQ(c.cycle_count, 0);
}

TEST(Classify, FourCycle) {
    const GraphClass c = classify(G({{1, 2}, {2, 3}, {3, 4}, {4, 1}}));
    EXPECT_TRUE(c.is_cyclic_graph);
    EXPECT_FALSE(c.is_double_tree);
    EXPECT_EQ(c.cycle_count, 1);
}

TEST(Classify, DoubledPathIsDoubleTreeAndCyclic) {
    const GraphClass c = classify(G({{1, 2}, {1, 2}, {2, 3}, {2, 3}}));
    EXPECT_TRUE(c.is_double_tree);
    EXPECT_TRUE(c.is_cyclic_graph);
}

TEST(Classify, PathIsTreeButNotCyclic) {
    const GraphClass c = classify(G({{1, 2}, {2, 3}}));
    EXPECT_TRUE(c.is_tree);
    EXPECT_FALSE(c.is_cyclic_graph);
    EXPECT_FALSE(c.is_double_tree);
}

TEST(Classify, LoopCountsTwoTowardDegree) {
    const GraphClass c = classify(G({{1, 1}}));
    EXPECT_TRUE(c.is_cyclic_graph);
    EXPECT_FALSE(c.is_fat_tree);
    EXPECT_EQ(c.cycle_count, 1);
}

TEST(Classify, DisconnectedIsNotCyclic) {
    EXPECT_FALSE(classify(G({{1, 2}, {1, 2}, {3, 4}, {3, 4}})).is_cyclic_graph);
}

TEST(CycleGraph, Shapes) {
    const TestGraph t2 = cycle_graph(2);
    ASSERT_EQ(t2.distinct_edges().size(), 1U);
    EXPECT_EQ(t2.distinct_edges()[0].second, 2);

    const TestGraph t4 = cycle_graph(4);
    EXPECT_EQ(t4.edge_count(), 4);
    EXPECT_EQ(t4.distinct_edge_count(), 4);
    EXPECT_EQ(t4.simple_edge_count(), 4);

    const TestGraph t1 = cycle_graph(1);
    EXPECT_EQ(t1.vertex_count(), 1);
    ASSERT_EQ(t1.edge_count(), 1);
    EXPECT_TRUE(t1.edges()[0].is_loop());

    EXPECT_THROW(cycle_graph(0), PreconditionError);
}

TEST(CycleGraph, AlwaysCyclic) {
    for (int k = 1; k <= 12; ++k) EXPECT_TRUE(classify(cycle_graph(k)).is_cyclic_graph) << k;
}

TEST(Quotient, FourCycleToDoubleTree) {
    const TestGraph q = quotient(cycle_graph(4), std::vector<std::vector<int>>{{1, 3}, {2}, {4}});
    // Blocks in restricted-growth order: {1,3} -> 1, {2} -> 2, {4} -> 3.
    EXPECT_EQ(q, G({{1, 2}, {1, 2}, {1, 3}, {1, 3}}));
    EXPECT_TRUE(classify(q).is_double_tree);
}

TEST(Quotient, FourCycleToQuadrupleEdge) {
    const TestGraph q = quotient(cycle_graph(4), std::vector<std::vector<int>>{{1, 3}, {2, 4}});
    ASSERT_EQ(q.distinct_edges().size(), 1U);
    EXPECT_EQ(q.distinct_edges()[0].second, 4);
    EXPECT_FALSE(classify(q).is_double_tree);
}

TEST(Quotient, DoubleEdgeCollapsesToDoubleLoop) {
    const TestGraph q = quotient(cycle_graph(2), std::vector<std::vector<int>>{{1, 2}});
    EXPECT_EQ(q.vertex_count(), 1);
    ASSERT_EQ(q.distinct_edges().size(), 1U);
    EXPECT_TRUE(q.distinct_edges()[0].first.is_loop());
    EXPECT_EQ(q.distinct_edges()[0].second, 2);
}

TEST(Quotient, RejectsWrongGroundSet) {
    EXPECT_THROW(quotient(cycle_graph(4), SetPartition({0, 1, 0})), PreconditionError);
    EXPECT_THROW(quotient(cycle_graph(4), std::vector<std::vector<int>>{{1, 3}, {2}}), PreconditionError);
    EXPECT_THROW(quotient(cycle_graph(4), std::vector<std::vector<int>>{{1, 3}, {2, 9}, {4}}), PreconditionError);
}

// Properties over random multigraphs and random partitions.
TestGraph random_multigraph(Rng& rng) {
    const int v = 1 + static_cast<int>(rng.below(6));
    const int e = static_cast<int>(rng.below(9));
    std::vector<Edge> edges;
    for (int i = 0; i < e; ++i)
        edges.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(v))) * 3 + 2,
                           static_cast<int>(rng.below(static_cast<std::uint64_t>(v))) * 3 + 2);
    return TestGraph(std::move(edges), {2});
}

SetPartition random_partition(int k, Rng& rng) {
    std::vector<int> rgs(static_cast<std::size_t>(k));
    int blocks = 0;
    for (int i = 0; i < k; ++i) {
        rgs[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(blocks + 1)));
        if (rgs[static_cast<std::size_t>(i)] == blocks) ++blocks;
    }
    return SetPartition(rgs);
}

TEST(QuotientProperty, EdgeCountConserved) {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const TestGraph t = random_multigraph(rng);
        const TestGraph q = quotient(t, random_partition(t.vertex_count(), rng));
        EXPECT_EQ(q.edge_count(), t.edge_count());
        EXPECT_LE(q.distinct_edge_count(), q.edge_count());
        EXPECT_LE(q.simple_edge_count(), q.distinct_edge_count());
    }
}

TEST(ClassifyProperty, InvariantUnderRelabeling) {
    Rng rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const TestGraph t = random_multigraph(rng);
        // Random injective relabeling.
        std::vector<int> labels(static_cast<std::size_t>(t.vertex_count()));
        std::iota(labels.begin(), labels.end(), 100);
        for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
        std::vector<Edge> edges;
        for (const Edge& e : t.edges())
            edges.emplace_back(labels[static_cast<std::size_t>(t.index_of(e.u))], labels[static_cast<std::size_t>(t.index_of(e.v))]);
        std::vector<int> verts(labels.begin(), labels.end());
        const TestGraph r(std::move(edges), verts);
        const GraphClass a = classify(t);
        const GraphClass b = classify(r);
        EXPECT_EQ(a.is_tree, b.is_tree);
        EXPECT_EQ(a.is_fat_tree, b.is_fat_tree);
        EXPECT_EQ(a.is_double_tree, b.is_double_tree);
        EXPECT_EQ(a.is_cyclic_graph, b.is_cyclic_graph);
        EXPECT_EQ(a.cycle_count, b.cycle_count);
        EXPECT_GE(a.cycle_count, 0);
        if (a.is_double_tree && t.edge_count() > 0) {
            EXPECT_EQ(t.edge_count(), 2 * t.distinct_edge_count());
            EXPECT_EQ(t.simple_edge_count(), 0);
            EXPECT_EQ(a.cycle_count, 0);
        }
    }
}

TEST(EdgeListFormat, ReadsLoopsAndComments) {
    std::istringstream in("# square with a loop\n1 2\n2 3\n\n3 4\n4 1\n4 4\n");
    const TestGraph t = read_test_graph(in);
    EXPECT_EQ(t.edge_count(), 5);
    EXPECT_EQ(t.vertex_count(), 4);
    std::ostringstream out;
    write_test_graph(out, t);
    std::istringstream again(out.str());
    EXPECT_EQ(read_test_graph(again), t);
}

TEST(EdgeListFormat, RejectsMalformedLine) {
    std::istringstream in("1 2\n3\n");
    EXPECT_THROW(read_test_graph(in), PreconditionError);
    std::istringstream extra("1 2 3\n");
    EXPECT_THROW(read_test_graph(extra), PreconditionError);
}

}  // namespace
}  // namespace sclab
