#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sclab/error.hpp"
#include "sclab/graph.hpp"
#include "sclab/rng.hpp"

namespace sclab {

/// Law of the i.i.d. edge weights. All kinds have closed-form moments.
struct WeightDistribution {
    enum class Kind { constant, rademacher, uniform_pm, bernoulli_shifted };

    Kind kind = Kind::constant;
    double param = 1.0;  // c for constant, a for uniform_pm, p for bernoulli_shifted

    static WeightDistribution constant(double c = 1.0) {
        require(c != 0.0, "weights: constant(0) has zero second moment");
        return {Kind::constant, c};
    }
    static WeightDistribution rademacher() { return {Kind::rademacher, 0.0}; }
    static WeightDistribution uniform_pm(double a) {
        require(a > 0.0 && std::isfinite(a), "weights: uniform_pm needs a > 0");
        return {Kind::uniform_pm, a};
    }
    static WeightDistribution bernoulli_shifted(double p) {
        require(p > 0.0 && p <= 1.0, "weights: bernoulli_shifted needs p in (0, 1]");
        return {Kind::bernoulli_shifted, p};
    }

    double m1() const {
        switch (kind) {
            case Kind::constant: return param;
            case Kind::rademacher: return 0.0;
            case Kind::uniform_pm: return 0.0;
            case Kind::bernoulli_shifted: return param;
        }
        return 0.0;
    }

    double m2() const {
        switch (kind) {
            case Kind::constant: return param * param;
            case Kind::rademacher: return 1.0;
            case Kind::uniform_pm: return param * param / 3.0;
            case Kind::bernoulli_shifted: return param;
        }
        return 0.0;
    }

    bool is_constant() const { return kind == Kind::constant || (kind == Kind::bernoulli_shifted && param == 1.0); }

    /// Law is invariant under x -> -x.
    bool is_symmetric() const { return kind == Kind::rademacher || kind == Kind::uniform_pm; }

    double draw(Rng& rng) const {
        switch (kind) {
            case Kind::constant: return param;
            case Kind::rademacher: return (rng() >> 63) ? 1.0 : -1.0;
            case Kind::uniform_pm: return param * (2.0 * rng.uniform() - 1.0);
            case Kind::bernoulli_shifted: return rng.uniform() < param ? 1.0 : 0.0;
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::constant: return "constant";
            case Kind::rademacher: return "rademacher";
            case Kind::uniform_pm: return "uniform_pm";
            case Kind::bernoulli_shifted: return "bernoulli_shifted";
        }
        return "?";
    }
};

struct Moments {
    double m1;
    double m2;
};

inline Moments moments(const WeightDistribution& w) { return {w.m1(), w.m2()}; }

/// One weight per edge of a simple graph, aligned with graph.edges().
/// The table is symmetric by construction: the weight of {i,j} is looked up
/// through the unordered pair.
struct EdgeWeights {
    std::vector<VertexPair> edges;
    std::vector<double> values;

    double at(int i, int j) const {
        const VertexPair key = ordered(i, j);
        auto it = std::lower_bound(edges.begin(), edges.end(), key);
        require(it != edges.end() && *it == key, "EdgeWeights: pair is not an edge");
        return values[static_cast<std::size_t>(it - edges.begin())];
    }
};

inline EdgeWeights sample_weights(const WeightDistribution& w, const SimpleGraph& g, Rng& rng) {
    EdgeWeights out;
    out.edges = g.edges();
    out.values.reserve(out.edges.size());
    for (std::size_t e = 0; e < out.edges.size(); ++e) out.values.push_back(w.draw(rng));
    return out;
}

/// Parses {"kind": "..."} plus the kind's parameter name ("c", "a", "p").
template <class Json>
WeightDistribution weights_from_json(const Json& j) {
    require(j.contains("kind"), "weights: missing \"kind\"");
    const std::string kind = j.at("kind").template get<std::string>();
    if (kind == "constant") return WeightDistribution::constant(j.value("c", 1.0));
    if (kind == "rademacher") return WeightDistribution::rademacher();
    if (kind == "uniform_pm") return WeightDistribution::uniform_pm(j.value("a", std::sqrt(3.0)));
    if (kind == "bernoulli_shifted") return WeightDistribution::bernoulli_shifted(j.value("p", 0.5));
    throw PreconditionError("weights: unknown kind \"" + kind + "\"");
}

template <class Json>
Json weights_to_json(const WeightDistribution& w) {
    Json j;
    j["kind"] = w.name();
    switch (w.kind) {
        case WeightDistribution::Kind::constant: j["c"] = w.param; break;
        case WeightDistribution::Kind::uniform_pm: j["a"] = w.param; break;
        case WeightDistribution::Kind::bernoulli_shifted: j["p"] = w.param; break;
        default: break;
    }
    return j;
}

}  // namespace sclab
