#include <numbers>

#include <gtest/gtest.h>

#include "sclab/matrixops.hpp"
#include "sclab/regular_sampler.hpp"

namespace sclab {
namespace {

Matrix random_symmetric(int n, Rng& rng) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = 2.0 * rng.uniform() - 1.0;
    return a;
}

SimpleGraph complete(int n) { return SimpleGraph(n).complement(); }

SimpleGraph ring(int n) {
    SimpleGraph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

EdgeWeights unit_weights(const SimpleGraph& g) {
    EdgeWeights w;
    w.edges = g.edges();
    w.values.assign(w.edges.size(), 1.0);
    return w;
}

TEST(Adjacency, EmptyAndComplete) {
    const SimpleGraph e(5);
    EXPECT_EQ(adjacency_matrix(e, unit_weights(e)).dense(), Matrix::Zero(5, 5));
    const SimpleGraph k = complete(4);
    Matrix expected = Matrix::Ones(4, 4);
    expected.diagonal().setZero();
    EXPECT_EQ(adjacency_matrix(k, unit_weights(k)).dense(), expected);
}

TEST(Adjacency, WeightsLandSymmetrically) {
    const SimpleGraph c = ring(4);  // 1-2-3-4-1 with 0-based labels
    EdgeWeights w;
    w.edges = c.edges();  // (0,1) (0,3) (1,2) (2,3)
    w.values = {1.0, -1.0, -1.0, 1.0};
    const Matrix a = adjacency_matrix(c, w).dense();
    EXPECT_EQ(a(0, 1), 1.0);
    EXPECT_EQ(a(1, 0), 1.0);
    EXPECT_EQ(a(0, 3), -1.0);
    EXPECT_EQ(a(3, 0), -1.0);
    EXPECT_EQ(a(1, 2), -1.0);
    EXPECT_EQ(a(2, 3), 1.0);
    EXPECT_EQ(a(0, 2), 0.0);
    EXPECT_EQ(a.diagonal(), Vector::Zero(4));
}

TEST(Adjacency, MismatchRejected) {
    const SimpleGraph c = ring(4);
    EdgeWeights w = unit_weights(c);
    w.edges.pop_back();
    w.values.pop_back();
    EXPECT_THROW(adjacency_matrix(c, w), PreconditionError);
}

TEST(Standardize, ConstantWeightsGiveUnitSecondMoment) {
    Rng rng(1);
    for (auto [n, d] : std::vector<std::pair<int, int>>{{10, 3}, {30, 4}, {50, 5}, {40, 20}}) {
        for (int s = 0; s < 3; ++s) {
            const SimpleGraph g = sample_regular(n, d, rng);
            const auto m = standardized_matrix(g, unit_weights(g), WeightDistribution::constant(), d);
            EXPECT_NEAR(trace_power(m, 2) / n, 1.0, 1e-10);
            EXPECT_EQ(m.dense().diagonal(), Vector::Zero(n));
        }
    }
}

TEST(Standardize, DegenerateCases) {
    const SimpleGraph k = complete(5);
    EXPECT_THROW(standardized_matrix(k, unit_weights(k), WeightDistribution::constant(), 4), PreconditionError);
    const SimpleGraph e(5);
    EXPECT_THROW(standardized_matrix(e, unit_weights(e), WeightDistribution::rademacher(), 0), PreconditionError);
}

TEST(Standardize, CenteredLawOnlyRescales) {
    Rng rng(2);
    const SimpleGraph g = sample_regular(12, 3, rng);
    const auto w = sample_weights(WeightDistribution::rademacher(), g, rng);
    const auto a = adjacency_matrix(g, w);
    const auto m = standardize(a, 3, 0.0, 1.0);
    EXPECT_LE((m.dense() - a.dense() / std::sqrt(3.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TracePower, IdentityGivesN) {
    const SymmetricMatrix id(Matrix::Identity(7, 7));
    for (int k = 1; k <= 9; ++k) EXPECT_DOUBLE_EQ(trace_power(id, k), 7.0);
}

TEST(TracePower, MatchesEigenvalueSums) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const SymmetricMatrix m(random_symmetric(8, rng));
        const auto spec = eigen_decompose(m).values;
        const auto tr = trace_powers(m, 10);
        for (int k = 1; k <= 10; ++k) {
            double s = 0;
            for (double l : spec) s += std::pow(l, k);
            EXPECT_LE(std::abs(tr[static_cast<std::size_t>(k)] - s), 1e-8 * std::max(1.0, std::abs(s))) << k;
        }
    }
}

TEST(TracePower, RademacherK4SecondMoment) {
    Rng rng(4);
    const SimpleGraph k = complete(4);
    const auto w = sample_weights(WeightDistribution::rademacher(), k, rng);
    const auto m = standardized_matrix(k, w, WeightDistribution::rademacher(), 3);
    double s = 0;
    for (double l : eigen_decompose(m).values) s += l * l;
    EXPECT_NEAR(trace_power(m, 2), s, 1e-10);
    // Every entry is +-1/sqrt(3): Tr M^2 = 12/3.
    EXPECT_NEAR(trace_power(m, 2), 4.0, 1e-12);
}

TEST(Eigen, ZeroMatrix) {
    for (double l : eigenvalues(SymmetricMatrix(Matrix::Zero(6, 6))).eigenvalues) EXPECT_EQ(l, 0.0);
}

TEST(Eigen, CompleteGraphSpectrum) {
    const SimpleGraph k = complete(4);
    const auto ev = eigenvalues(adjacency_matrix(k, unit_weights(k))).eigenvalues;
    ASSERT_EQ(ev.size(), 4U);
    EXPECT_NEAR(ev[0], -1.0, 1e-12);
    EXPECT_NEAR(ev[1], -1.0, 1e-12);
    EXPECT_NEAR(ev[2], -1.0, 1e-12);
    EXPECT_NEAR(ev[3], 3.0, 1e-12);
}

TEST(Eigen, CycleSpectrumIsCirculant) {
    for (int n : {5, 8, 13}) {
        const SimpleGraph c = ring(n);
        const auto ev = eigenvalues(adjacency_matrix(c, unit_weights(c))).eigenvalues;
        std::vector<double> expected;
        for (int j = 0; j < n; ++j) expected.push_back(2.0 * std::cos(2.0 * std::numbers::pi * j / n));
        std::sort(expected.begin(), expected.end());
        for (int j = 0; j < n; ++j) EXPECT_NEAR(ev[static_cast<std::size_t>(j)], expected[static_cast<std::size_t>(j)], 1e-12);
    }
}

TEST(Eigen, ResidualsAndOrdering) {
    Rng rng(5);
    for (int n : {1, 2, 3, 10, 40}) {
        const SymmetricMatrix m(random_symmetric(n, rng));
        const auto dec = eigen_decompose(m, true);
        const double norm = m.dense().norm();
        EXPECT_TRUE(std::is_sorted(dec.values.begin(), dec.values.end()));
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            const Vector v = dec.vectors.col(i);
            EXPECT_NEAR(v.norm(), 1.0, 1e-10);
            EXPECT_LE((m.dense() * v - dec.values[static_cast<std::size_t>(i)] * v).norm(), 1e-8 * norm);
            sum += dec.values[static_cast<std::size_t>(i)];
        }
        EXPECT_NEAR(sum, m.dense().trace(), 1e-8 * n);
    }
}

TEST(Eigen, AgreesWithEigenLibrary) {
    Rng rng(6);
    const Matrix a = random_symmetric(30, rng);
    const auto ours = eigen_decompose(SymmetricMatrix(a)).values;
    const Eigen::SelfAdjointEigenSolver<Matrix> ref(a, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(ours[static_cast<std::size_t>(i)], ref.eigenvalues()(i), 1e-10);
}

TEST(Eigen, NonConvergenceIsReported) {
    Rng rng(7);
    EXPECT_THROW(eigen_decompose(SymmetricMatrix(random_symmetric(20, rng)), false, 0), ConvergenceError);
}

TEST(Densities, PointValues) {
    EXPECT_NEAR(semicircle_density(1.0, 0.0), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(mckay_density(2, 0.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_EQ(semicircle_density(1.0, 2.5), 0.0);
    EXPECT_EQ(mckay_density(3, 3.0), 0.0);
    EXPECT_THROW(semicircle_density(0.0, 0.0), PreconditionError);
    EXPECT_THROW(mckay_density(1, 0.0), PreconditionError);
}

TEST(Densities, SemicircleMomentsAreCatalan) {
    EXPECT_EQ(semicircle_moment(0), 1.0);
    EXPECT_EQ(semicircle_moment(2), 1.0);
    EXPECT_EQ(semicircle_moment(4), 2.0);
    EXPECT_EQ(semicircle_moment(3), 0.0);
}

// Midpoint rule in the angle variable x = R sin(theta): no endpoint evaluations.
template <class F>
double integrate_on_interval(double radius, F&& density, int k, int points = 200000) {
    double s = 0.0;
    const double h = std::numbers::pi / points;
    for (int i = 0; i < points; ++i) {
        const double th = -std::numbers::pi / 2 + (i + 0.5) * h;
        const double x = radius * std::sin(th);
        s += std::pow(x, k) * density(x) * radius * std::cos(th) * h;
    }
    return s;
}

TEST(Densities, IntegrateToOne) {
    EXPECT_NEAR(integrate_on_interval(2.0, [](double t) { return semicircle_density(1.0, t); }, 0), 1.0, 1e-6);
    EXPECT_NEAR(integrate_on_interval(3.0, [](double t) { return semicircle_density(1.5, t); }, 0), 1.0, 1e-6);
    for (int d : {2, 3, 5}) {
        const double r = 2.0 * std::sqrt(d - 1.0);
        EXPECT_NEAR(integrate_on_interval(r, [d](double x) { return mckay_density(d, x); }, 0), 1.0, 1e-6) << d;
    }
}

TEST(Densities, SemicircleQuadratureMoments) {
    for (int k = 0; k <= 8; ++k)
        EXPECT_NEAR(integrate_on_interval(2.0, [](double t) { return semicircle_density(1.0, t); }, k),
                    semicircle_moment(k), 1e-6)
            << k;
}

TEST(Densities, McKaySecondMomentIsDegree) {
    // The d-regular tree has d closed walks of length 2 at the root.
    for (int d : {3, 5, 8}) {
        const double r = 2.0 * std::sqrt(d - 1.0);
        EXPECT_NEAR(integrate_on_interval(r, [d](double x) { return mckay_density(d, x); }, 2), d, 1e-6);
    }
}

}  // namespace
}  // namespace sclab
