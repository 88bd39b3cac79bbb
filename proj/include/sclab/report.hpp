#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sclab/parallel.hpp"
#include "sclab/rational.hpp"

namespace sclab {

using Json = nlohmann::ordered_json;

enum class Method { exact, monte_carlo };

inline const char* to_string(Method m) { return m == Method::exact ? "exact" : "monte_carlo"; }

/// A single estimated (or exactly computed) quantity with its provenance.
/// Invariant: std_error == 0 when method == exact; replicas >= 1 otherwise.
struct EstimateReport {
    std::string label;
    double estimate = 0.0;
    double std_error = 0.0;
    long long replicas = 0;
    Method method = Method::exact;
    Json params = Json::object();      // N, d, weights, sampler, seed, ...
    std::optional<double> reference;   // comparison value, when one exists
    std::optional<Rational> exact_value;
    Json extra = Json::object();

    static EstimateReport exact(std::string label, double value, Json params = Json::object()) {
        EstimateReport r;
        r.label = std::move(label);
        r.estimate = value;
        r.params = std::move(params);
        return r;
    }

    static EstimateReport monte_carlo(std::string label, const SampleStats& s, Json params = Json::object()) {
        EstimateReport r;
        r.label = std::move(label);
        r.estimate = s.mean;
        r.std_error = s.std_error;
        r.replicas = s.count;
        r.method = Method::monte_carlo;
        r.params = std::move(params);
        return r;
    }

    /// |estimate - target| <= sigmas * std_error (exact reports need equality
    /// up to `abs_tol`).
    bool within(double target, double sigmas, double abs_tol = 0.0) const {
        return std::abs(estimate - target) <= sigmas * std_error + abs_tol;
    }
};

/// Doubles that are not finite serialize as null.
inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const EstimateReport& r) {
    Json j;
    j["label"] = r.label;
    j["estimate"] = number_or_null(r.estimate);
    j["stderr"] = number_or_null(r.std_error);
    j["replicas"] = r.replicas;
    j["method"] = to_string(r.method);
    if (r.exact_value) j["exact"] = r.exact_value->str();
    if (r.reference) j["reference"] = number_or_null(*r.reference);
    j["params"] = r.params;
    if (!r.extra.empty()) j["extra"] = r.extra;
    return j;
}

/// Fixed-format number for CSV output: 15 significant digits, '.' separator.
inline std::string csv_number(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

/// Columns: k_or_rung, estimate, stderr, reference.
inline std::string to_csv(const std::vector<EstimateReport>& rows, const std::vector<std::string>& keys) {
    std::ostringstream out;
    out << "k_or_rung,estimate,stderr,reference\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << keys[i] << ',' << csv_number(r.estimate) << ',' << csv_number(r.std_error) << ','
            << (r.reference ? csv_number(*r.reference) : std::string("nan")) << '\n';
    }
    return out.str();
}

}  // namespace sclab
