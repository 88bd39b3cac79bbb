#include <gtest/gtest.h>

#include "sclab/estimators.hpp"

namespace sclab {
namespace {

const TestGraph kDisjoint = TestGraph::from_pairs({{1, 2}, {3, 4}});
const TestGraph kPath = TestGraph::from_pairs({{1, 2}, {2, 3}});
const TestGraph kTriangle = TestGraph::from_pairs({{1, 2}, {2, 3}, {3, 1}});
const TestGraph kEdge = TestGraph::from_pairs({{1, 2}});

TEST(CorrelationExact, SmallMatchings) {
    const auto disjoint = correlation_exact(4, 1, kDisjoint);
    ASSERT_TRUE(disjoint.exact_value.has_value());
    EXPECT_EQ(disjoint.exact_value->str(), "2/9");
    EXPECT_EQ(disjoint.method, Method::exact);
    EXPECT_EQ(disjoint.std_error, 0.0);
    const auto adjacent = correlation_exact(4, 1, kPath);
    ASSERT_TRUE(adjacent.exact_value.has_value());
    EXPECT_EQ(adjacent.exact_value->str(), "-1/9");
}

TEST(CorrelationExact, CompleteGraphHasNoFluctuation) {
    for (const auto& t : {kEdge, kPath, kTriangle}) EXPECT_EQ(correlation_exact(5, 4, t).estimate, 0.0);
}

TEST(CorrelationExact, SingleEdgeVanishes) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{4, 1}, {6, 2}, {8, 3}}) {
        EXPECT_EQ(correlation_exact(n, d, kEdge).exact_value->num, 0);
        EXPECT_EQ(correlation_from_subgraph(n, d, kEdge).exact_value->num, 0);
    }
}

TEST(CorrelationExact, AgreesWithInclusionExclusion) {
    const std::vector<std::pair<int, int>> params{{4, 1}, {6, 2}, {6, 3}, {7, 2}, {8, 3}};
    for (auto [n, d] : params)
        for (const auto& t : {kDisjoint, kPath, kTriangle}) {
            if (t.vertex_count() > n) continue;
            EXPECT_NEAR(correlation_exact(n, d, t).estimate, correlation_from_subgraph(n, d, t).estimate, 1e-12)
                << n << " " << d;
        }
}

TEST(CorrelationExact, ComplementDuality) {
    const std::vector<std::pair<int, int>> params{{6, 2}, {7, 2}, {8, 3}};
    for (auto [n, d] : params)
        for (const auto& t : {kDisjoint, kPath, kTriangle}) {
            const double sign = t.edge_count() % 2 == 0 ? 1.0 : -1.0;
            EXPECT_NEAR(correlation_exact(n, d, t).estimate, sign * correlation_exact(n, n - 1 - d, t).estimate, 1e-14);
        }
}

TEST(CorrelationExact, Preconditions) {
    EXPECT_THROW(correlation_exact(4, 1, TestGraph::from_pairs({{1, 5}})), PreconditionError);
    EXPECT_THROW(correlation_exact(4, 1, TestGraph::from_pairs({{1, 2}, {1, 2}})), PreconditionError);
    EXPECT_THROW(correlation_exact(4, 1, TestGraph::from_pairs({{1, 1}})), PreconditionError);
    EXPECT_THROW(correlation_from_subgraph(4, 1, TestGraph::from_pairs({{1, 5}})), PreconditionError);
}

TEST(CorrelationMc, WithinErrorBarsOfExact) {
    const double exact = correlation_exact(8, 3, kPath).estimate;
    const auto mc = correlation_mc(Ensemble::regular(8, 3), kPath, 20000, 11);
    EXPECT_EQ(mc.method, Method::monte_carlo);
    EXPECT_EQ(mc.replicas, 20000);
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_TRUE(mc.within(exact, 4.0)) << mc.estimate << " vs " << exact << " se " << mc.std_error;
}

TEST(CorrelationMc, PlacementsKeepTheMean) {
    const double exact = correlation_exact(8, 3, kDisjoint).estimate;
    const auto mc = correlation_mc(Ensemble::regular(8, 3), kDisjoint, 5000, 12, 1, 16);
    EXPECT_TRUE(mc.within(exact, 4.0)) << mc.estimate << " vs " << exact << " se " << mc.std_error;
}

TEST(CorrelationMc, ErdosRenyiIsUncorrelated) {
    const auto ens = Ensemble::erdos_renyi(30, 0.3);
    for (const auto& t : {kPath, kTriangle, kDisjoint}) {
        const auto mc = correlation_mc(ens, t, 20000, 13);
        EXPECT_TRUE(mc.within(0.0, 4.0)) << mc.estimate << " se " << mc.std_error;
    }
}

TEST(CorrelationMc, WorkerCountDoesNotChangeResult) {
    const auto a = correlation_mc(Ensemble::regular(20, 4), kPath, 300, 14, 1, 4);
    const auto b = correlation_mc(Ensemble::regular(20, 4), kPath, 300, 14, 3, 4);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(SubgraphProbability, ExactValues) {
    EXPECT_EQ(subgraph_probability_exact(4, 1, kEdge).exact_value->str(), "1/3");
    EXPECT_EQ(subgraph_probability_exact(4, 2, kTriangle).estimate, 0.0);
    EXPECT_EQ(subgraph_probability_exact(5, 4, kTriangle).estimate, 1.0);
    const auto e83 = subgraph_probability_exact(8, 3, kEdge);
    EXPECT_EQ(e83.exact_value->str(), "3/7");
    ASSERT_TRUE(e83.reference.has_value());
    EXPECT_DOUBLE_EQ(*e83.reference, 3.0 / 8.0);
    EXPECT_NEAR(e83.extra["ratio"].get<double>(), 8.0 / 7.0, 1e-15);
}

TEST(SubgraphProbability, GraphonRatioNearOne) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{8, 3}, {10, 3}}) {
        const double ratio = subgraph_probability_exact(n, d, kEdge).extra["ratio"].get<double>();
        EXPECT_GE(ratio, 1.0);
        EXPECT_LE(ratio, 1.2);
    }
}

TEST(SubgraphProbability, MonteCarloMatchesExact) {
    const double exact = subgraph_probability_exact(8, 3, kPath).estimate;
    const auto mc = subgraph_probability(8, 3, kPath, Method::monte_carlo, 20000, 15);
    EXPECT_TRUE(mc.within(exact, 4.0)) << mc.estimate << " vs " << exact;
}

TEST(EpsilonScaling, SingleEdgeIsZeroEverywhere) {
    const auto table = epsilon_scaling(kEdge, {{6, 2, {}}, {8, 3, {}}}, 0, 1);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.method, Method::exact);
        EXPECT_EQ(row.eps, 0.0);
        EXPECT_TRUE(row.zero_consistent);
    }
    EXPECT_EQ(table.fitted_points, 0);
    EXPECT_TRUE(std::isnan(table.slope));
}

TEST(EpsilonScaling, ExactRungsAndFit) {
    const auto table = epsilon_scaling(kPath, {{6, 2, {}}, {8, 3, {}}, {10, 3, {}}}, 0, 1);
    ASSERT_EQ(table.rows.size(), 3U);
    for (const auto& row : table.rows) {
        EXPECT_FALSE(row.zero_consistent);
        EXPECT_NEAR(row.eps, row.correlation / std::pow(static_cast<double>(row.d) / row.n, 2), 1e-15);
        EXPECT_NEAR(row.normalized, row.eps * row.d, 1e-15);
    }
    EXPECT_EQ(table.fitted_points, 3);
    EXPECT_TRUE(std::isfinite(table.slope));
    EXPECT_LE(table.slope_ci_low, table.slope);
    EXPECT_GE(table.slope_ci_high, table.slope);
    const Json j = to_json(table);
    EXPECT_EQ(j["rows"].size(), 3U);
}

TEST(EpsilonScaling, ErdosRenyiRungsAreFlagged) {
    const auto table = epsilon_scaling(kPath, {{40, 4, {}}, {60, 6, {}}}, 4000, 2, 1, 8, Ensemble::Kind::erdos_renyi);
    for (const auto& row : table.rows) {
        EXPECT_EQ(row.method, Method::monte_carlo);
        EXPECT_TRUE(row.zero_consistent) << row.correlation << " se " << row.correlation_se;
    }
}

TEST(EpsilonScaling, Preconditions) {
    EXPECT_THROW(epsilon_scaling(kPath, {}, 10, 1), PreconditionError);
    EXPECT_THROW(epsilon_scaling(kPath, {{10, 3, {}}, {8, 2, {}}}, 10, 1), PreconditionError);
}

TEST(Moments, SecondMomentIsExactlyOne) {
    const auto reps = estimate_moments(Ensemble::regular(60, 6), 4, 10, 3);
    ASSERT_EQ(reps.size(), 4U);
    EXPECT_NEAR(reps[1].estimate, 1.0, 1e-12);
    EXPECT_LE(reps[1].std_error, 1e-12);
    EXPECT_EQ(*reps[3].reference, 2.0);
}

TEST(Moments, OddMomentsVanishUnderSymmetricWeights) {
    const auto reps = estimate_moments(Ensemble::regular(80, 6, WeightDistribution::rademacher()), 5, 200, 4);
    for (int k : {1, 3, 5}) EXPECT_TRUE(reps[static_cast<std::size_t>(k - 1)].within(0.0, 4.0)) << k;
}

TEST(Moments, WorkerCountDoesNotChangeResult) {
    const auto a = estimate_moments(Ensemble::regular(50, 4, WeightDistribution::uniform_pm(1.0)), 6, 12, 5, 1);
    const auto b = estimate_moments(Ensemble::regular(50, 4, WeightDistribution::uniform_pm(1.0)), 6, 12, 5, 4);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].estimate, b[k].estimate);
        EXPECT_EQ(a[k].std_error, b[k].std_error);
    }
}

TEST(Moments, Preconditions) {
    EXPECT_THROW(estimate_moments(Ensemble::regular(10, 3), 13, 2, 1), PreconditionError);
    EXPECT_THROW(estimate_moments(Ensemble::regular(10, 3), 2, 0, 1), PreconditionError);
    EXPECT_THROW(estimate_moments(Ensemble::regular(5, 4), 2, 1, 1), PreconditionError);
}

FreenessLetter letter(int source, std::vector<double> coeffs, bool center = false) {
    return FreenessLetter{source, std::move(coeffs), center};
}

TEST(Freeness, WordValidation) {
    const auto y = DeterministicFamily{}.diagonal(20);
    EXPECT_THROW(prepare_word({"w", {letter(0, {0, 1}), letter(0, {0, 1})}}, 2, y, true), PreconditionError);
    EXPECT_THROW(prepare_word({"w", {letter(0, {0, 0, 1}), letter(1, {-1, 0, 1})}}, 2, y, true), PreconditionError);
    EXPECT_THROW(prepare_word({"w", {letter(0, {0, 1}), letter(2, {0, 1})}}, 2, y, true), PreconditionError);
    EXPECT_THROW(prepare_word({"w", {letter(0, {0, 1}), letter(kDeterministicSource, {0, 1})}}, 2, y, true),
                 PreconditionError);
    EXPECT_NO_THROW(prepare_word({"w", {letter(0, {-1, 0, 1}), letter(1, {-1, 0, 1})}}, 2, y, true));
    const auto shifted = prepare_word({"w", {letter(0, {0, 1}), letter(kDeterministicSource, {0, 1}, true)}}, 2, y, true);
    EXPECT_NEAR(shifted[1].coeffs[0], -1.0 / 20.0, 1e-15);
    EXPECT_NO_THROW(prepare_word({"w", {letter(0, {0, 0, 1}), letter(1, {0, 0, 1})}}, 2, y, false));
}

TEST(Freeness, SmallScaleEstimates) {
    const std::vector<Ensemble> sources{Ensemble::regular(150, 12), Ensemble::regular(150, 12)};
    const std::vector<FreenessWordSpec> words{
        {"(M1^2-1)(M2^2-1)", {letter(0, {-1, 0, 1}), letter(1, {-1, 0, 1})}},
        {"M1 M2 M1 M2", {letter(0, {0, 1}), letter(1, {0, 1}), letter(0, {0, 1}), letter(1, {0, 1})}},
        {"M1 Y M2 Y",
         {letter(0, {0, 1}), letter(kDeterministicSource, {0, 1}, true), letter(1, {0, 1}),
          letter(kDeterministicSource, {0, 1}, true)}},
    };
    const auto reps = freeness_estimates(words, sources, DeterministicFamily{}, 20, 6);
    ASSERT_EQ(reps.size(), 3U);
    for (const auto& r : reps) {
        EXPECT_LE(std::abs(r.estimate), 0.15) << r.label;
        EXPECT_EQ(*r.reference, 0.0);
        EXPECT_NEAR(r.extra["y_operator_norm"].get<double>(), 1.0, 1e-15);
    }
}

TEST(Freeness, UncenteredProductTendsToOne) {
    const std::vector<Ensemble> sources{Ensemble::regular(150, 12), Ensemble::regular(150, 12)};
    const auto reps = freeness_estimates({{"M1^2 M2^2", {letter(0, {0, 0, 1}), letter(1, {0, 0, 1})}}}, sources,
                                         DeterministicFamily{}, 20, 7, 1, false);
    EXPECT_NEAR(reps.front().estimate, 1.0, 0.1);
    EXPECT_FALSE(reps.front().reference.has_value());
}

TEST(Freeness, WorkerCountDoesNotChangeResult) {
    const std::vector<Ensemble> sources{Ensemble::regular(40, 4), Ensemble::regular(40, 6)};
    const FreenessWordSpec w{"M1 M2", {letter(0, {0, 1}), letter(1, {0, 1})}};
    const auto a = freeness_test(w, sources, DeterministicFamily{}, 9, 8, 1);
    const auto b = freeness_test(w, sources, DeterministicFamily{}, 9, 8, 3);
    EXPECT_EQ(a.estimate, b.estimate);
}

TEST(Report, JsonAndCsv) {
    const auto r = correlation_exact(4, 1, kDisjoint);
    const Json j = to_json(r);
    EXPECT_EQ(j["method"], "exact");
    EXPECT_EQ(j["exact"], "2/9");
    const std::string csv = to_csv({r}, {"4,1"});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k_or_rung,estimate,stderr,reference");
}

}  // namespace
}  // namespace sclab
