#include <gtest/gtest.h>
#include <json.hpp>

#include "sclab/parallel.hpp"
#include "sclab/weights.hpp"

namespace sclab {
namespace {

TEST(Weights, ClosedFormMoments) {
    auto c = moments(WeightDistribution::constant(1.0));
    EXPECT_EQ(c.m1, 1.0);
    EXPECT_EQ(c.m2, 1.0);
    auto r = moments(WeightDistribution::rademacher());
    EXPECT_EQ(r.m1, 0.0);
    EXPECT_EQ(r.m2, 1.0);
    auto u = moments(WeightDistribution::uniform_pm(std::sqrt(3.0)));
    EXPECT_EQ(u.m1, 0.0);
    EXPECT_NEAR(u.m2, 1.0, 1e-15);
    auto b = moments(WeightDistribution::bernoulli_shifted(0.25));
    EXPECT_EQ(b.m1, 0.25);
    EXPECT_EQ(b.m2, 0.25);
}

TEST(Weights, CauchySchwarzEqualityOnlyForConstant) {
    const std::vector<WeightDistribution> kinds{WeightDistribution::constant(2.5), WeightDistribution::rademacher(),
                                                WeightDistribution::uniform_pm(0.7),
                                                WeightDistribution::bernoulli_shifted(0.4)};
    for (const auto& w : kinds) {
        EXPECT_GT(w.m2(), 0.0);
        if (w.is_constant()) EXPECT_DOUBLE_EQ(w.m2(), w.m1() * w.m1());
        else EXPECT_GT(w.m2(), w.m1() * w.m1());
    }
}

TEST(Weights, InvalidParameters) {
    EXPECT_THROW(WeightDistribution::constant(0.0), PreconditionError);
    EXPECT_THROW(WeightDistribution::uniform_pm(-1.0), PreconditionError);
    EXPECT_THROW(WeightDistribution::bernoulli_shifted(0.0), PreconditionError);
}

SimpleGraph k4() {
    SimpleGraph g(4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) g.add_edge(i, j);
    return g;
}

TEST(SampleWeights, ConstantAndSymmetric) {
    Rng rng(1);
    const auto w = sample_weights(WeightDistribution::constant(1.0), k4(), rng);
    ASSERT_EQ(w.values.size(), 6U);
    for (double x : w.values) EXPECT_EQ(x, 1.0);
    const auto r = sample_weights(WeightDistribution::rademacher(), k4(), rng);
    for (auto [i, j] : r.edges) EXPECT_EQ(r.at(i, j), r.at(j, i));
    EXPECT_THROW(r.at(0, 0), PreconditionError);
}

TEST(SampleWeights, RademacherMeanPerEdge) {
    Rng rng(2);
    const SimpleGraph g = k4();
    const int draws = 100000;
    std::vector<std::vector<double>> per_edge(6);
    for (int i = 0; i < draws; ++i) {
        const auto w = sample_weights(WeightDistribution::rademacher(), g, rng);
        for (std::size_t e = 0; e < 6; ++e) per_edge[e].push_back(w.values[e]);
    }
    for (const auto& xs : per_edge) {
        const auto s = summarize(xs);
        EXPECT_LE(std::abs(s.mean), 4 * s.std_error);
    }
}

TEST(SampleWeights, EmpiricalMomentsMatch) {
    Rng rng(3);
    const std::vector<WeightDistribution> kinds{WeightDistribution::rademacher(),
                                                WeightDistribution::uniform_pm(std::sqrt(3.0)),
                                                WeightDistribution::bernoulli_shifted(0.3)};
    for (const auto& w : kinds) {
        std::vector<double> x1;
        std::vector<double> x2;
        for (int i = 0; i < 100000; ++i) {
            const double x = w.draw(rng);
            x1.push_back(x);
            x2.push_back(x * x);
        }
        const auto s1 = summarize(x1);
        const auto s2 = summarize(x2);
        EXPECT_LE(std::abs(s1.mean - w.m1()), 4 * s1.std_error + 1e-15) << w.name();
        EXPECT_LE(std::abs(s2.mean - w.m2()), 4 * s2.std_error + 1e-15) << w.name();
    }
}

TEST(WeightsJson, RoundTrip) {
    using J = nlohmann::json;
    const auto w = weights_from_json(J::parse(R"({"kind": "uniform_pm", "a": 2.0})"));
    EXPECT_EQ(w.kind, WeightDistribution::Kind::uniform_pm);
    EXPECT_EQ(w.param, 2.0);
    const auto back = weights_from_json(weights_to_json<J>(w));
    EXPECT_EQ(back.kind, w.kind);
    EXPECT_EQ(back.param, w.param);
    EXPECT_EQ(weights_from_json(J::parse(R"({"kind": "rademacher"})")).m2(), 1.0);
    EXPECT_THROW(weights_from_json(J::parse(R"({"kind": "gaussian"})")), PreconditionError);
    EXPECT_THROW(weights_from_json(J::parse(R"({})")), PreconditionError);
}

}  // namespace
}  // namespace sclab
