#pragma once

// Experiment runner behind the `sclab` executable. Kept in a header so the
// test suite can drive it in-process.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sclab/sclab.hpp"

namespace sclab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitNonConvergence = 3;

enum class ParamKind { integer, real, text, flag, list };

struct ParamSpec {
    std::string name;  // flag spelling without the leading dashes
    ParamKind kind;
    Json fallback;     // null: no default
    std::string help;

    std::string key() const {
        std::string k = name;
        std::replace(k.begin(), k.end(), '-', '_');
        return k;
    }
};

class RunDir;
using Handler = std::function<Json(const Json&, RunDir&)>;

struct Command {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
    Handler handler;
};

// ---------------------------------------------------------------------------
// Output directory and manifest

class RunDir {
public:
    RunDir(std::filesystem::path dir, Json manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {
        std::filesystem::create_directories(dir_);
        manifest_["files"] = Json::array();
        manifest_["status"] = "running";
        flush();
        started_ = std::chrono::steady_clock::now();
    }

    const std::filesystem::path& path() const { return dir_; }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << content;
        require(static_cast<bool>(f), "could not write " + (dir_ / name).string());
        manifest_["files"].push_back(name);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    void finalize(const std::string& status, const std::string& error = {}) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        manifest_["status"] = status;
        manifest_["duration_seconds"] = secs;
        if (!error.empty()) manifest_["error"] = error;
        flush();
    }

private:
    void flush() {
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        f << manifest_.dump(2) << "\n";
    }

    std::filesystem::path dir_;
    Json manifest_;
    std::chrono::steady_clock::time_point started_;
};

inline std::filesystem::path runs_root() {
    if (const char* env = std::getenv("SEMICIRCLE_LAB_RUNS"); env != nullptr && *env != '\0') return env;
    return "runs";
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point now) {
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

/// runs/<timestamp>-<subcommand>, with a numeric suffix on collision.
inline std::filesystem::path fresh_run_dir(const std::string& stamp, const std::string& sub) {
    const std::filesystem::path root = runs_root();
    std::filesystem::path dir = root / (stamp + "-" + sub);
    for (int i = 2; std::filesystem::exists(dir); ++i) dir = root / (stamp + "-" + sub + "-" + std::to_string(i));
    return dir;
}

// ---------------------------------------------------------------------------
// Parameter access

inline const Json& param(const Json& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end() || it->is_null()) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        throw PreconditionError("missing required parameter --" + flag);
    }
    return *it;
}

inline bool has(const Json& p, const std::string& key) { return p.contains(key) && !p.at(key).is_null(); }

inline int get_int(const Json& p, const std::string& key) {
    const long long v = param(p, key).get<long long>();
    require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(),
            "parameter " + key + " out of range");
    return static_cast<int>(v);
}
inline long long get_ll(const Json& p, const std::string& key) { return param(p, key).get<long long>(); }
inline double get_real(const Json& p, const std::string& key) { return param(p, key).get<double>(); }
inline std::string get_text(const Json& p, const std::string& key) { return param(p, key).get<std::string>(); }
inline bool get_flag(const Json& p, const std::string& key) { return param(p, key).get<bool>(); }

inline Json convert_flag_value(const ParamSpec& spec, const std::string& raw) {
    const std::string where = "--" + spec.name;
    try {
        std::size_t used = 0;
        switch (spec.kind) {
            case ParamKind::integer: {
                const long long v = std::stoll(raw, &used);
                if (used != raw.size()) break;
                return v;
            }
            case ParamKind::real: {
                const double v = std::stod(raw, &used);
                if (used != raw.size()) break;
                return v;
            }
            default: return raw;
        }
    } catch (const std::logic_error&) {
    }
    throw PreconditionError(where + ": cannot parse '" + raw + "' as " +
                            (spec.kind == ParamKind::integer ? "an integer" : "a number"));
}

inline void check_config_value(const ParamSpec& spec, const Json& v) {
    const std::string where = "config key '" + spec.key() + "'";
    bool ok = false;
    switch (spec.kind) {
        case ParamKind::integer: ok = v.is_number_integer(); break;
        case ParamKind::real: ok = v.is_number(); break;
        case ParamKind::text: ok = v.is_string(); break;
        case ParamKind::flag: ok = v.is_boolean(); break;
        case ParamKind::list: ok = v.is_array(); break;
    }
    require(ok, where + ": wrong type");
}

/// Defaults, then the config file, then explicit flags.
inline Json merge_parameters(const Command& cmd, const Json& config, const std::map<std::string, Json>& flags) {
    Json merged = Json::object();
    for (const auto& spec : cmd.params) merged[spec.key()] = spec.fallback;
    require(config.is_object(), "config: top level must be a JSON object");
    for (const auto& [key, value] : config.items()) {
        const auto it = std::find_if(cmd.params.begin(), cmd.params.end(), [&](const ParamSpec& s) { return s.key() == key; });
        require(it != cmd.params.end(), "config: unknown parameter '" + key + "' for " + cmd.name);
        check_config_value(*it, value);
        merged[key] = value;
    }
    for (const auto& [key, value] : flags) merged[key] = value;
    return merged;
}

// ---------------------------------------------------------------------------
// Shared parsing of domain values

inline WeightDistribution parse_weights(const Json& p) {
    Json j;
    j["kind"] = get_text(p, "weights");
    if (has(p, "weight_param")) {
        const double a = get_real(p, "weight_param");
        const std::string kind = j["kind"];
        if (kind == "constant") j["c"] = a;
        else if (kind == "uniform_pm") j["a"] = a;
        else if (kind == "bernoulli_shifted") j["p"] = a;
    }
    return weights_from_json(j);
}

inline SamplerKind parse_sampler(const std::string& s) {
    if (s == "automatic" || s == "auto") return SamplerKind::automatic;
    if (s == "configuration") return SamplerKind::configuration;
    if (s == "switch_mcmc" || s == "mcmc") return SamplerKind::switch_mcmc;
    throw PreconditionError("--sampler: unknown sampler '" + s + "'");
}

inline Ensemble parse_ensemble(const Json& p) {
    const int n = get_int(p, "n");
    const int d = get_int(p, "d");
    const std::string kind = get_text(p, "ensemble");
    const WeightDistribution w = parse_weights(p);
    if (kind == "regular") return Ensemble::regular(n, d, w, parse_sampler(get_text(p, "sampler")));
    if (kind == "erdos_renyi") {
        require(n >= 2, "--n must be >= 2");
        const double prob = has(p, "p") ? get_real(p, "p") : static_cast<double>(d) / (n - 1);
        return Ensemble::erdos_renyi(n, prob, w);
    }
    throw PreconditionError("--ensemble: unknown ensemble '" + kind + "'");
}

/// "u,v" or "u-v" or a JSON pair.
inline std::pair<int, int> parse_pair(const Json& v, const std::string& what) {
    if (v.is_array()) {
        require(v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer(), what + ": expected [u, v]");
        return {v[0].get<int>(), v[1].get<int>()};
    }
    require(v.is_string(), what + ": expected \"u,v\"");
    std::string s = v.get<std::string>();
    std::replace(s.begin(), s.end(), '-', ' ');
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    int a = 0;
    int b = 0;
    std::string rest;
    require(static_cast<bool>(in >> a >> b) && !(in >> rest), what + ": cannot parse '" + v.get<std::string>() + "'");
    return {a, b};
}

/// The test graph from --graph-file or --edges ("1-2,2-3" or a JSON list).
inline TestGraph parse_test_graph(const Json& p) {
    require(!(has(p, "graph_file") && has(p, "edges")), "--graph-file and --edges are mutually exclusive");
    if (has(p, "graph_file")) {
        const std::string path = get_text(p, "graph_file");
        std::ifstream f(path);
        require(static_cast<bool>(f), "--graph-file: cannot open '" + path + "'");
        return read_test_graph(f);
    }
    require(has(p, "edges"), "missing required parameter --graph-file or --edges");
    const Json& e = param(p, "edges");
    std::vector<std::pair<int, int>> pairs;
    if (e.is_string()) {
        std::istringstream in(e.get<std::string>());
        std::string tok;
        while (std::getline(in, tok, ';')) {
            std::istringstream inner(tok);
            std::string item;
            // "1-2,2-3" separates edges by ',' and endpoints by '-'; ';' also works.
            while (std::getline(inner, item, ','))
                if (!item.empty()) pairs.push_back(parse_pair(Json(item), "--edges"));
        }
    } else {
        for (const auto& x : e) pairs.push_back(parse_pair(x, "--edges"));
    }
    require(!pairs.empty(), "--edges: no edges given");
    return TestGraph::from_pairs(pairs);
}

inline Json test_graph_json(const TestGraph& t) {
    Json edges = Json::array();
    for (const Edge& e : t.edges()) edges.push_back({e.u, e.v});
    return edges;
}

/// "N:d,N:d,..." or a JSON list of [N, d] pairs.
inline std::vector<Rung> parse_ladder(const Json& v) {
    std::vector<Rung> out;
    auto add = [&](const Json& item) {
        if (item.is_array()) {
            require(item.size() >= 2 && item[0].is_number_integer() && item[1].is_number_integer(),
                    "--ladder: expected [N, d]");
            Rung r{item[0].get<int>(), item[1].get<int>(), {}};
            if (item.size() == 3) r.method = item[2].get<std::string>() == "exact" ? Method::exact : Method::monte_carlo;
            out.push_back(r);
            return;
        }
        std::string s = item.get<std::string>();
        std::istringstream in(s);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok.empty()) continue;
            const auto colon = tok.find(':');
            require(colon != std::string::npos, "--ladder: expected N:d, got '" + tok + "'");
            Rung r;
            try {
                r.n = std::stoi(tok.substr(0, colon));
                std::string rest = tok.substr(colon + 1);
                const auto colon2 = rest.find(':');
                r.d = std::stoi(rest.substr(0, colon2));
                if (colon2 != std::string::npos) {
                    const std::string m = rest.substr(colon2 + 1);
                    require(m == "exact" || m == "mc", "--ladder: method must be exact or mc, got '" + m + "'");
                    r.method = m == "exact" ? Method::exact : Method::monte_carlo;
                }
            } catch (const std::logic_error& e) {
                if (dynamic_cast<const PreconditionError*>(&e) != nullptr) throw;
                throw PreconditionError("--ladder: cannot parse '" + tok + "'");
            }
            out.push_back(r);
        }
    };
    if (v.is_array()) {
        for (const auto& item : v) add(item);
    } else {
        add(v);
    }
    require(!out.empty(), "--ladder: empty");
    return out;
}

inline Method parse_method(const std::string& s) {
    if (s == "exact") return Method::exact;
    if (s == "mc" || s == "monte_carlo") return Method::monte_carlo;
    throw PreconditionError("--method: expected exact or mc, got '" + s + "'");
}

inline int workers_of(const Json& p) {
    const int w = get_int(p, "workers");
    require(w >= 0, "--workers must be >= 0");
    return w == 0 ? default_workers() : w;
}

inline std::uint64_t seed_of(const Json& p) {
    const long long s = get_ll(p, "seed");
    require(s >= 0, "--seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

inline std::string rung_key(int n, int d) { return std::to_string(n) + ":" + std::to_string(d); }

// ---------------------------------------------------------------------------
// Subcommands

inline Json cmd_census(const Json& p, RunDir& dir) {
    const int k = get_int(p, "k");
    require(k >= 1 && k <= kMaxPartitionGround, "--k must be in [1, " + std::to_string(kMaxPartitionGround) + "]");
    const CensusResult r = double_tree_census_full(k);
    Json j;
    j["k"] = k;
    j["bell"] = r.partitions;
    j["double_trees"] = r.double_trees;
    j["catalan"] = k % 2 == 0 ? Json(catalan(k / 2)) : Json(nullptr);
    dir.write_json("census.json", j);
    return j;
}

inline Json cmd_moments(const Json& p, RunDir& dir) {
    const Ensemble ens = parse_ensemble(p);
    const int kmax = get_int(p, "kmax");
    const auto reps = estimate_moments(ens, kmax, get_ll(p, "replicas"), seed_of(p), workers_of(p));
    std::vector<std::string> keys;
    Json rows = Json::array();
    for (const auto& r : reps) {
        keys.push_back(std::to_string(r.params["k"].get<int>()));
        rows.push_back(to_json(r));
    }
    dir.write("moments.csv", to_csv(reps, keys));
    dir.write_json("moments.json", rows);
    Json summary = Json::array();
    for (const auto& r : reps)
        summary.push_back({{"k", r.params["k"]}, {"estimate", r.estimate}, {"stderr", r.std_error}, {"reference", *r.reference}});
    return summary;
}

inline Json cmd_correlation(const Json& p, RunDir& dir) {
    const TestGraph t = parse_test_graph(p);
    const std::uint64_t seed = seed_of(p);
    const int workers = workers_of(p);
    const long long replicas = get_ll(p, "replicas");
    const int placements = get_int(p, "placements");
    if (has(p, "ladder")) {
        const std::string kind = get_text(p, "ensemble");
        require(kind == "regular" || kind == "erdos_renyi", "--ensemble: unknown ensemble '" + kind + "'");
        const auto table = epsilon_scaling(t, parse_ladder(param(p, "ladder")), replicas, seed, workers, placements,
                                           kind == "regular" ? Ensemble::Kind::regular : Ensemble::Kind::erdos_renyi);
        Json j = to_json(table);
        j["T"] = test_graph_json(t);
        dir.write_json("epsilon.json", j);
        std::ostringstream csv;
        csv << "k_or_rung,estimate,stderr,reference,method,eps,eps_stderr,eps_times_d_pow_half_n,zero_consistent\n";
        for (const auto& r : table.rows)
            csv << rung_key(r.n, r.d) << ',' << csv_number(r.correlation) << ',' << csv_number(r.correlation_se)
                << ",0," << to_string(r.method) << ',' << csv_number(r.eps) << ',' << csv_number(r.eps_se) << ','
                << csv_number(r.normalized) << ',' << (r.zero_consistent ? "true" : "false") << '\n';
        dir.write("epsilon.csv", csv.str());
        return j;
    }
    const std::string method = get_text(p, "method");
    EstimateReport r;
    if (method == "exact") {
        r = correlation_exact(get_int(p, "n"), get_int(p, "d"), t);
    } else if (method == "inclusion_exclusion") {
        r = correlation_from_subgraph(get_int(p, "n"), get_int(p, "d"), t);
    } else if (method == "mc" || method == "monte_carlo") {
        r = correlation_mc(parse_ensemble(p), t, replicas, seed, workers, placements);
    } else {
        throw PreconditionError("--method: expected exact, inclusion_exclusion or mc, got '" + method + "'");
    }
    r.reference = 0.0;
    dir.write_json("correlation.json", to_json(r));
    dir.write("correlation.csv", to_csv({r}, {rung_key(get_int(p, "n"), get_int(p, "d"))}));
    return to_json(r);
}

inline Json cmd_graphon(const Json& p, RunDir& dir) {
    const TestGraph t = parse_test_graph(p);
    const Method method = parse_method(get_text(p, "method"));
    std::vector<Rung> ladder;
    if (has(p, "ladder")) ladder = parse_ladder(param(p, "ladder"));
    else ladder.push_back({get_int(p, "n"), get_int(p, "d"), {}});
    std::vector<EstimateReport> reps;
    std::vector<std::string> keys;
    Json rows = Json::array();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const Rung& rung = ladder[i];
        auto r = subgraph_probability(rung.n, rung.d, t, rung.method.value_or(method), get_ll(p, "replicas"),
                                      seed_of(p) + i, workers_of(p));
        rows.push_back(to_json(r));
        keys.push_back(rung_key(rung.n, rung.d));
        reps.push_back(std::move(r));
    }
    dir.write_json("graphon.json", rows);
    std::ostringstream csv;
    csv << "k_or_rung,estimate,stderr,reference,ratio\n";
    for (std::size_t i = 0; i < reps.size(); ++i)
        csv << keys[i] << ',' << csv_number(reps[i].estimate) << ',' << csv_number(reps[i].std_error) << ','
            << csv_number(*reps[i].reference) << ',' << csv_number(reps[i].extra["ratio"].get<double>()) << '\n';
    dir.write("graphon.csv", csv.str());
    return rows;
}

inline FreenessLetter letter_from_json(const Json& j) {
    FreenessLetter l;
    require(j.is_object() && j.contains("source") && j.contains("coeffs"), "words: each letter needs source and coeffs");
    const Json& s = j.at("source");
    if (s.is_string()) {
        require(s.get<std::string>() == "Y", "words: letter source must be an index or \"Y\"");
        l.source = kDeterministicSource;
    } else {
        l.source = s.get<int>();
    }
    l.coeffs = j.at("coeffs").get<std::vector<double>>();
    l.center = j.value("center", false);
    return l;
}

inline std::vector<FreenessWordSpec> canonical_words(const std::vector<std::string>& names) {
    const FreenessLetter m1{0, {0, 1}, false};
    const FreenessLetter m2{1, {0, 1}, false};
    const FreenessLetter y{kDeterministicSource, {0, 1}, true};
    std::vector<FreenessWordSpec> out;
    for (const auto& name : names) {
        if (name == "centered_squares") out.push_back({name, {{0, {-1, 0, 1}, false}, {1, {-1, 0, 1}, false}}});
        else if (name == "alternating") out.push_back({name, {m1, m2, m1, m2}});
        else if (name == "with_y") out.push_back({name, {m1, y, m2, y}});
        else if (name == "squares") out.push_back({name, {{0, {0, 0, 1}, false}, {1, {0, 0, 1}, false}}});
        else throw PreconditionError("--word: unknown word '" + name + "'");
    }
    return out;
}

inline Json cmd_freeness(const Json& p, RunDir& dir) {
    const Ensemble first = parse_ensemble(p);
    Json p2 = p;
    if (has(p, "d2")) {
        p2["d"] = p["d2"];
        p2.erase("p");
    }
    const Ensemble second = parse_ensemble(p2);
    std::vector<FreenessWordSpec> words;
    const Json& w = param(p, "word");
    require(w.is_array(), "--word: expected a list");
    std::vector<std::string> names;
    for (const auto& item : w) {
        if (item.is_string()) {
            names.push_back(item.get<std::string>());
            continue;
        }
        require(item.is_object() && item.contains("letters"), "words: custom word needs \"letters\"");
        FreenessWordSpec spec;
        spec.label = item.value("label", "word" + std::to_string(words.size()));
        for (const auto& l : item.at("letters")) spec.letters.push_back(letter_from_json(l));
        words.push_back(std::move(spec));
    }
    const auto named = canonical_words(names);
    words.insert(words.begin(), named.begin(), named.end());
    require(!words.empty(), "--word: no words given");
    const auto reps = freeness_estimates(words, {first, second}, DeterministicFamily{}, get_ll(p, "replicas"),
                                         seed_of(p), workers_of(p), !get_flag(p, "allow_uncentered"));
    Json rows = Json::array();
    std::vector<std::string> keys;
    for (const auto& r : reps) {
        rows.push_back(to_json(r));
        keys.push_back(r.label);
    }
    dir.write_json("freeness.json", rows);
    dir.write("freeness.csv", to_csv(reps, keys));
    return rows;
}

inline Json cmd_switch_verify(const Json& p, RunDir& dir) {
    const int n = get_int(p, "n");
    const int d = get_int(p, "d");
    const int k = get_int(p, "k");
    check_regular_params(n, d);
    require(enumerable(n, d), "switch-verify: (N, d) outside the enumeration range");
    Polygon poly;
    if (has(p, "polygon")) {
        for (const auto& v : param(p, "polygon")) {
            std::string s = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
            std::istringstream in(s);
            std::string tok;
            while (std::getline(in, tok, ','))
                if (!tok.empty()) {
                    try {
                        poly.push_back(std::stoi(tok) - 1);
                    } catch (const std::logic_error&) {
                        throw PreconditionError("--polygon: cannot parse '" + tok + "'");
                    }
                }
        }
        require(static_cast<int>(poly.size()) == 2 * k, "--polygon must list 2K vertices v1,w1,...,vK,wK");
    } else {
        require(2 * k <= n, "--k: polygon needs 2K <= N distinct vertices");
        for (int i = 0; i < 2 * k; ++i) poly.push_back(i);
    }
    ConstraintSet c;
    for (const auto& v : param(p, "require")) {
        const auto [a, b] = parse_pair(v, "--require");
        c.required.push_back(ordered(a - 1, b - 1));
    }
    for (const auto& v : param(p, "forbid")) {
        const auto [a, b] = parse_pair(v, "--forbid");
        c.forbidden.push_back(ordered(a - 1, b - 1));
    }
    const std::uint64_t a = count_constrained(n, d, poly, PolygonMode::spokes_present, c);
    const std::uint64_t b = count_constrained(n, d, poly, PolygonMode::links_present, c);
    Json j;
    j["N"] = n;
    j["d"] = d;
    j["K"] = k;
    Json pj = Json::array();
    for (int v : poly) pj.push_back(v + 1);
    j["polygon"] = pj;
    j["count_53"] = a;
    j["count_54"] = b;
    j["equal"] = a == b;
    dir.write_json("switch_verify.json", j);
    return j;
}

inline Json cmd_spectrum(const Json& p, RunDir& dir) {
    const Ensemble ens = parse_ensemble(p);
    Rng rng = replica_stream(seed_of(p), 0);
    const SimpleGraph g = ens.sample(rng);
    const EdgeWeights w = sample_weights(ens.weights, g, rng);
    const SymmetricMatrix m = get_flag(p, "raw") ? adjacency_matrix(g, w)
                                                 : standardized_matrix(g, w, ens.weights, ens.mean_degree());
    const int kmax = get_int(p, "kmax");
    require(kmax >= 0 && kmax <= kMaxMomentOrder, "--kmax must be in [0, " + std::to_string(kMaxMomentOrder) + "]");
    const SpectrumReport rep = eigenvalues(m, kmax, get_int(p, "max_iter"));
    std::ostringstream csv;
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) csv << i << ',' << csv_number(rep.eigenvalues[i]) << '\n';
    dir.write("spectrum.csv", csv.str());
    std::ostringstream edges;
    write_edge_list(edges, g);
    dir.write("graph.txt", edges.str());
    Json j;
    j["N"] = ens.n;
    j["min_eigenvalue"] = rep.eigenvalues.front();
    j["max_eigenvalue"] = rep.eigenvalues.back();
    Json moments = Json::array();
    for (std::size_t k = 1; k < rep.moments.size(); ++k)
        moments.push_back({{"k", k}, {"empirical", rep.moments[k]}, {"semicircle", semicircle_moment(static_cast<int>(k))}});
    j["moments"] = moments;
    dir.write_json("spectrum.json", j);
    return j;
}

inline Json cmd_density(const Json& p, RunDir& dir) {
    const std::string law = get_text(p, "law");
    const double param_value = get_real(p, "param");
    const double from = get_real(p, "from");
    const double to = get_real(p, "to");
    const int points = get_int(p, "points");
    require(points >= 2, "--points must be >= 2");
    require(to > from, "--to must exceed --from");
    std::function<double(double)> f;
    if (law == "sc") {
        f = [param_value](double x) { return semicircle_density(param_value, x); };
    } else if (law == "mckay") {
        const int d = static_cast<int>(param_value);
        require(d == param_value, "--param: McKay degree must be an integer");
        f = [d](double x) { return mckay_density(d, x); };
    } else {
        throw PreconditionError("--law: expected sc or mckay, got '" + law + "'");
    }
    f(0.0);  // surfaces parameter errors before writing anything
    std::ostringstream csv;
    csv << "x,density\n";
    for (int i = 0; i < points; ++i) {
        const double x = from + (to - from) * i / (points - 1);
        csv << csv_number(x) << ',' << csv_number(f(x)) << '\n';
    }
    dir.write("density.csv", csv.str());
    return {{"law", law}, {"param", param_value}, {"points", points}};
}

// ---------------------------------------------------------------------------
// Registry

inline std::vector<ParamSpec> ensemble_params(int n, int d) {
    return {
        {"n", ParamKind::integer, n > 0 ? Json(n) : Json(nullptr), "number of vertices N"},
        {"d", ParamKind::integer, d >= 0 ? Json(d) : Json(nullptr), "degree d"},
        {"ensemble", ParamKind::text, "regular", "regular | erdos_renyi"},
        {"p", ParamKind::real, nullptr, "edge probability for erdos_renyi (default d/(N-1))"},
        {"sampler", ParamKind::text, "automatic", "automatic | configuration | switch_mcmc"},
        {"weights", ParamKind::text, "constant", "constant | rademacher | uniform_pm | bernoulli_shifted"},
        {"weight-param", ParamKind::real, nullptr, "c, a or p of the weight law"},
    };
}

inline std::vector<ParamSpec> run_params(long long replicas) {
    return {
        {"replicas", ParamKind::integer, replicas, "Monte Carlo replicas"},
        {"seed", ParamKind::integer, 1, "master seed"},
        {"workers", ParamKind::integer, 1, "worker threads (0 = all cores); does not affect results"},
    };
}

inline std::vector<ParamSpec> graph_params() {
    return {
        {"graph-file", ParamKind::text, nullptr, "test graph T as 'u v' lines"},
        {"edges", ParamKind::text, nullptr, "test graph T inline, e.g. 1-2,2-3"},
    };
}

inline std::vector<ParamSpec> concat(std::initializer_list<std::vector<ParamSpec>> parts) {
    std::vector<ParamSpec> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline std::vector<Command> commands() {
    return {
        {"census", "count partitions whose cycle quotient is a double tree",
         {{"k", ParamKind::integer, nullptr, "cycle length"}}, cmd_census},
        {"moments", "Monte Carlo spectral moments of the standardized matrix",
         concat({ensemble_params(-1, -1), run_params(50), {{"kmax", ParamKind::integer, 6, "highest moment order"}}}),
         cmd_moments},
        {"correlation", "edge correlation function of a test graph (or its scaling along --ladder)",
         concat({ensemble_params(-1, -1), run_params(100000), graph_params(),
                 {{"method", ParamKind::text, "exact", "exact | inclusion_exclusion | mc"},
                  {"placements", ParamKind::integer, 1, "random placements of T per sampled graph"},
                  {"ladder", ParamKind::list, nullptr, "rungs N:d[:exact|mc], comma separated"}}}),
         cmd_correlation},
        {"graphon", "subgraph containment probability against (d/N)^n",
         concat({{{"n", ParamKind::integer, nullptr, "number of vertices N"},
                  {"d", ParamKind::integer, nullptr, "degree d"}},
                 run_params(100000), graph_params(),
                 {{"method", ParamKind::text, "exact", "exact | mc"},
                  {"ladder", ParamKind::list, nullptr, "rungs N:d[:exact|mc], comma separated"}}}),
         cmd_graphon},
        {"freeness", "alternating centered words in two independent ensembles and Y = diag(2i/N - 1)",
         concat({ensemble_params(-1, -1), run_params(100),
                 {{"d2", ParamKind::integer, nullptr, "degree of the second source (default: d)"},
                  {"word", ParamKind::list, Json::array({"centered_squares", "alternating", "with_y"}),
                   "centered_squares | alternating | with_y | squares (repeatable)"},
                  {"allow-uncentered", ParamKind::flag, false, "skip the centering check"}}}),
         cmd_freeness},
        {"switch-verify", "compare constrained counts on both sides of a 2K-gon switching",
         {{"n", ParamKind::integer, nullptr, "number of vertices N"},
          {"d", ParamKind::integer, nullptr, "degree d"},
          {"k", ParamKind::integer, 2, "polygon half-length K"},
          {"polygon", ParamKind::list, nullptr, "v1,w1,...,vK,wK (1-based; default 1..2K)"},
          {"require", ParamKind::list, Json::array(), "required edge u,v (repeatable)"},
          {"forbid", ParamKind::list, Json::array(), "forbidden edge u,v (repeatable)"}},
         cmd_switch_verify},
        {"spectrum", "eigenvalues of one sampled standardized matrix",
         concat({ensemble_params(-1, -1),
                 {{"seed", ParamKind::integer, 1, "seed"},
                  {"kmax", ParamKind::integer, 8, "empirical moments up to this order"},
                  {"raw", ParamKind::flag, false, "use the weighted adjacency matrix instead"},
                  {"max-iter", ParamKind::integer, 60, "QL iterations allowed per eigenvalue"}}}),
         cmd_spectrum},
        {"density", "tabulate a limiting density",
         {{"law", ParamKind::text, "sc", "sc | mckay"},
          {"param", ParamKind::real, 1.0, "semicircle variance a, or McKay degree d"},
          {"from", ParamKind::real, -2.5, "left end"},
          {"to", ParamKind::real, 2.5, "right end"},
          {"points", ParamKind::integer, 201, "grid size"}},
         cmd_density},
    };
}

inline std::optional<double> eta_margin(const Json& p) {
    if (!has(p, "n") || !has(p, "d")) return std::nullopt;
    const double n = param(p, "n").get<double>();
    const double d = param(p, "d").get<double>();
    if (d <= 0) return std::nullopt;
    return (n / 2.0 - d) / std::sqrt(d);
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const std::vector<Command> cmds = commands();
    CLI::App app{"Random regular graph spectra: moments, edge correlations, freeness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SCLAB_VERSION);

    std::map<std::string, std::string> config_paths;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> raw;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, CLI::App*> subs;
    for (const auto& cmd : cmds) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        sub->add_option("--config", config_paths[cmd.name], "JSON file with parameters; flags override it");
        for (const auto& spec : cmd.params) {
            const std::string flag = "--" + spec.name;
            if (spec.kind == ParamKind::flag) {
                sub->add_flag(flag, flags[cmd.name][spec.key()], spec.help);
            } else {
                auto* opt = sub->add_option(flag, raw[cmd.name][spec.key()], spec.help);
                if (spec.kind == ParamKind::list) opt->allow_extra_args();
                else opt->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitPrecondition;
    }

    const Command* cmd = nullptr;
    for (const auto& c : cmds)
        if (subs[c.name]->parsed()) cmd = &c;

    Json params;
    try {
        Json config = Json::object();
        if (const std::string& path = config_paths[cmd->name]; !path.empty()) {
            std::ifstream f(path);
            require(static_cast<bool>(f), "--config: cannot open '" + path + "'");
            try {
                config = Json::parse(f);
            } catch (const Json::parse_error& e) {
                throw PreconditionError("--config: invalid JSON in '" + path + "': " + e.what());
            }
        }
        std::map<std::string, Json> given;
        for (const auto& spec : cmd->params) {
            const std::string flag = "--" + spec.name;
            if (subs[cmd->name]->count(flag) == 0) continue;
            if (spec.kind == ParamKind::flag) {
                given[spec.key()] = flags[cmd->name][spec.key()];
            } else if (spec.kind == ParamKind::list) {
                given[spec.key()] = raw[cmd->name][spec.key()];
            } else {
                given[spec.key()] = convert_flag_value(spec, raw[cmd->name][spec.key()].back());
            }
        }
        params = merge_parameters(*cmd, config, given);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }

    const auto now = std::chrono::system_clock::now();
    Json manifest;
    manifest["subcommand"] = cmd->name;
    manifest["version"] = SCLAB_VERSION;
    manifest["started_utc"] = utc_timestamp(now);
    manifest["parameters"] = params;
    manifest["seed"] = params.contains("seed") ? params["seed"] : Json(nullptr);
    manifest["replicas"] = params.contains("replicas") ? params["replicas"] : Json(nullptr);
    if (const auto eta = eta_margin(params)) manifest["eta_margin"] = *eta;

    std::unique_ptr<RunDir> dir;
    try {
        dir = std::make_unique<RunDir>(fresh_run_dir(manifest["started_utc"].get<std::string>(), cmd->name), manifest);
    } catch (const std::exception& e) {
        err << "error: cannot create run directory: " << e.what() << "\n";
        return kExitFailure;
    }

    auto fail = [&](const std::string& status, const std::string& what, int code) {
        dir->finalize(status, what);
        err << "error: " << what << "\n";
        return code;
    };
    try {
        const Json summary = cmd->handler(params, *dir);
        dir->finalize("ok");
        out << summary.dump(2) << "\n";
        out << "run directory: " << dir->path().string() << "\n";
        return kExitOk;
    } catch (const PreconditionError& e) {
        return fail("precondition_error", e.what(), kExitPrecondition);
    } catch (const Json::exception& e) {
        return fail("precondition_error", std::string("bad parameter value: ") + e.what(), kExitPrecondition);
    } catch (const ConvergenceError& e) {
        return fail("non_convergence", e.what(), kExitNonConvergence);
    } catch (const RetryLimitError& e) {
        return fail("non_convergence", e.what(), kExitNonConvergence);
    } catch (const std::exception& e) {
        return fail("failed", e.what(), kExitFailure);
    }
}

}  // namespace sclab::cli
