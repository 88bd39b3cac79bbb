#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sclab/error.hpp"
#include "sclab/graph.hpp"
#include "sclab/parallel.hpp"
#include "sclab/partitions.hpp"
#include "sclab/weights.hpp"

namespace sclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Symmetry is checked on construction.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Matrix m, double tol = 1e-12) : m_(std::move(m)) {
        require(m_.rows() == m_.cols(), "SymmetricMatrix: not square");
        const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
        require((m_ - m_.transpose()).cwiseAbs().maxCoeff() <= tol * scale, "SymmetricMatrix: not symmetric");
    }

    int order() const { return static_cast<int>(m_.rows()); }
    const Matrix& dense() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Matrix m_;
};

/// A(i,j) = weight of {i,j} on edges, 0 elsewhere.
inline SymmetricMatrix adjacency_matrix(const SimpleGraph& g, const EdgeWeights& w) {
    require(w.edges.size() == w.values.size(), "adjacency_matrix: malformed weight table");
    require(w.edges == g.edges(), "adjacency_matrix: weight table does not cover exactly the graph's edges");
    const int n = g.order();
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t e = 0; e < w.edges.size(); ++e) {
        const auto [i, j] = w.edges[e];
        a(i, j) = w.values[e];
        a(j, i) = w.values[e];
    }
    return SymmetricMatrix(std::move(a));
}

/// (A - m1 * alpha * J) / sqrt(d * (m2 - m1^2 * alpha)), alpha = d/(N-1),
/// J the all-ones matrix with zero diagonal. `d` is the mean degree and may
/// be fractional (Erdos-Renyi ensembles).
inline SymmetricMatrix standardize(const SymmetricMatrix& a, double d, double m1, double m2) {
    const int n = a.order();
    require(n >= 2, "standardize: N must be >= 2");
    require(d >= 0.0 && d <= n - 1, "standardize: mean degree outside [0, N-1]");
    const double alpha = d / (n - 1);
    const double spread = m2 - m1 * m1 * alpha;
    const double denom = d * spread;
    if (!(d > 0.0) || !(spread > 1e-12 * std::max(m2, 1.0)))
        throw PreconditionError("standardize: degenerate normalization (d*(m2 - m1^2*alpha) = " +
                                std::to_string(denom) + "); the spectrum is deterministic and cannot be standardized");
    const double shift = m1 * alpha;
    const double scale = 1.0 / std::sqrt(denom);
    Matrix m = (a.dense().array() - shift).matrix() * scale;
    m.diagonal() = a.dense().diagonal() * scale;  // J has zero diagonal
    return SymmetricMatrix(std::move(m));
}

/// Standardized matrix of a weighted graph drawn from an ensemble of mean degree d.
inline SymmetricMatrix standardized_matrix(const SimpleGraph& g, const EdgeWeights& w, const WeightDistribution& law,
                                           double d) {
    return standardize(adjacency_matrix(g, w), d, law.m1(), law.m2());
}

/// Tr M^k for k = 0..k_max. Uses the powers P_j = M^j for j <= ceil(k_max/2)
/// and Tr M^(a+b) = <P_a, P_b> (Frobenius), valid since the P_j are symmetric.
inline std::vector<double> trace_powers(const SymmetricMatrix& m, int k_max) {
    require(k_max >= 0, "trace_powers: negative k");
    const Matrix& x = m.dense();
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
    out[0] = static_cast<double>(x.rows());
    if (k_max == 0) return out;
    const int half = (k_max + 1) / 2;
    std::vector<Matrix> pw;
    pw.reserve(static_cast<std::size_t>(half));
    pw.push_back(x);
    for (int j = 2; j <= half; ++j) {
        Matrix next(x.rows(), x.cols());
        next.noalias() = pw.back() * x;
        pw.push_back(std::move(next));
    }
    out[1] = x.trace();
    for (int k = 2; k <= k_max; ++k) {
        const int lo = k / 2;
        const int hi = k - lo;
        // Compensated so that identities like Tr M^2 = N survive large N.
        const double* a = pw[static_cast<std::size_t>(lo - 1)].data();
        const double* b = pw[static_cast<std::size_t>(hi - 1)].data();
        CompensatedSum s;
        for (Eigen::Index i = 0; i < x.size(); ++i) s.add(a[i] * b[i]);
        out[static_cast<std::size_t>(k)] = s.value();
    }
    return out;
}

inline double trace_power(const SymmetricMatrix& m, int k) {
    require(k >= 1, "trace_power: k must be >= 1");
    return trace_powers(m, k)[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit QL iteration (EISPACK tred2/tql2).

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column i pairs with values[i]; empty unless requested
};

namespace detail {

inline void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(v.rows());
    for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);
    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    // Accumulate the transformations.
    for (int i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

inline void ql_implicit(Matrix& v, std::vector<double>& d, std::vector<double>& e, bool vectors, int max_iter) {
    const int n = static_cast<int>(v.rows());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iter)
                    throw ConvergenceError("eigenvalues: QL iteration did not converge for eigenvalue " +
                                           std::to_string(l) + " after " + std::to_string(max_iter) + " sweeps");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if (vectors)
                        for (int k = 0; k < n; ++k) {
                            h = v(k, i + 1);
                            v(k, i + 1) = s * v(k, i) + c * h;
                            v(k, i) = c * v(k, i) - s * h;
                        }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace detail

inline EigenDecomposition eigen_decompose(const SymmetricMatrix& m, bool want_vectors = false, int max_iter = 60) {
    const int n = m.order();
    EigenDecomposition out;
    if (n == 0) return out;
    Matrix v = m.dense();
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(n));
    detail::tridiagonalize(v, d, e);
    detail::ql_implicit(v, d, e, want_vectors, max_iter);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    out.values.reserve(static_cast<std::size_t>(n));
    for (int i : order) out.values.push_back(d[i]);
    if (want_vectors) {
        out.vectors.resize(n, n);
        for (int c = 0; c < n; ++c) out.vectors.col(c) = v.col(order[static_cast<std::size_t>(c)]);
    }
    return out;
}

struct SpectrumReport {
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> moments;      // (1/N) sum lambda^k, k = 0..k_max
};

inline SpectrumReport eigenvalues(const SymmetricMatrix& m, int k_max = 0, int max_iter = 60) {
    SpectrumReport r;
    r.eigenvalues = eigen_decompose(m, false, max_iter).values;
    const double n = static_cast<double>(r.eigenvalues.size());
    r.moments.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        double s = 0.0;
        for (double x : r.eigenvalues) s += std::pow(x, k);
        r.moments[static_cast<std::size_t>(k)] = n > 0 ? s / n : 0.0;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Limit laws

/// Semicircle of radius 2a: sqrt(4a^2 - t^2) / (2 pi a^2) on |t| <= 2a.
inline double semicircle_density(double a, double t) {
    require(a > 0.0, "semicircle_density: a must be > 0");
    const double r2 = 4.0 * a * a - t * t;
    return r2 > 0.0 ? std::sqrt(r2) / (2.0 * std::numbers::pi * a * a) : 0.0;
}

/// Kesten-McKay law of degree d: d sqrt(4(d-1) - x^2) / (2 pi (d^2 - x^2)) on
/// |x| <= 2 sqrt(d-1).
inline double mckay_density(int d, double x) {
    require(d >= 2, "mckay_density: d must be >= 2");
    const double r2 = 4.0 * (d - 1) - x * x;
    if (r2 <= 0.0) return 0.0;
    return d * std::sqrt(r2) / (2.0 * std::numbers::pi * (static_cast<double>(d) * d - x * x));
}

/// k-th moment of the standard semicircle: Catalan(k/2) for even k, else 0.
inline double semicircle_moment(int k) {
    require(k >= 0, "semicircle_moment: k must be >= 0");
    return k % 2 ? 0.0 : static_cast<double>(catalan(k / 2));
}

}  // namespace sclab
