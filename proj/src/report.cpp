#include "aqnn/report.hpp"

#include <ostream>
#include <string>

#include "aqnn/error.hpp"

namespace aqnn {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json truth_map(const std::map<Aggregation, std::optional<double>>& m) {
    json j = json::object();
    for (const auto& [agg, v] : m) j[std::string(to_string(agg))] = opt(v);
    return j;
}

json calls_json(const CallCounts& c) {
    return {{"oracle", c.oracle_calls}, {"proxy", c.proxy_calls}};
}

json synthetic_json(const SyntheticGenConfig& g) {
    return {{"n_objects", g.n_objects},
            {"embedding_dim", g.embedding_dim},
            {"n_clusters", g.n_clusters},
            {"cluster_spread", g.cluster_spread},
            {"cluster_sd", g.cluster_sd},
            {"proxy_noise_sigma", g.proxy_noise_sigma},
            {"attr_global_mean", g.attr_global_mean},
            {"attr_global_sd", g.attr_global_sd},
            {"attr_neighborhood_shift", g.attr_neighborhood_shift},
            {"attr_bounds", {g.attr_bounds.lo, g.attr_bounds.hi}},
            {"seed", g.seed}};
}

SyntheticGenConfig synthetic_from_json(const json& j) {
    SyntheticGenConfig g;
    g.n_objects = j.value("n_objects", g.n_objects);
    g.embedding_dim = j.value("embedding_dim", g.embedding_dim);
    g.n_clusters = j.value("n_clusters", g.n_clusters);
    g.cluster_spread = j.value("cluster_spread", g.cluster_spread);
    g.cluster_sd = j.value("cluster_sd", g.cluster_sd);
    g.proxy_noise_sigma = j.value("proxy_noise_sigma", g.proxy_noise_sigma);
    g.attr_global_mean = j.value("attr_global_mean", g.attr_global_mean);
    g.attr_global_sd = j.value("attr_global_sd", g.attr_global_sd);
    g.attr_neighborhood_shift = j.value("attr_neighborhood_shift", g.attr_neighborhood_shift);
    if (j.contains("attr_bounds")) {
        const auto& b = j.at("attr_bounds");
        g.attr_bounds = {b.at(0).get<double>(), b.at(1).get<double>(), false};
    }
    g.seed = j.value("seed", g.seed);
    return g;
}

json sprint_json(const SprintConfig& s) {
    return {{"s", s.sample_size},   {"s_p", s.pilot_size}, {"omega_v", s.omega_v},
            {"omega_c", s.omega_c}, {"alpha", s.alpha},    {"max_iters", s.max_iters}};
}

SprintConfig sprint_from_json(const json& j) {
    SprintConfig s;
    s.sample_size = j.value("s", s.sample_size);
    s.pilot_size = j.value("s_p", s.pilot_size);
    s.omega_v = j.value("omega_v", s.omega_v);
    s.omega_c = j.value("omega_c", s.omega_c);
    s.alpha = j.value("alpha", s.alpha);
    s.max_iters = j.value("max_iters", s.max_iters);
    return s;
}

}  // namespace

json to_json(const BoundsOutput& out) {
    return {{"s_min", out.s_min},
            {"s_p_min", out.s_p_min},
            {"s_raw", out.s_raw},
            {"s_p_raw", out.s_p_raw},
            {"omega_nn_implied", opt(out.omega_nn_implied)},
            {"reconciled", out.reconciled},
            {"warnings", out.warnings}};
}

json to_json(const ExperimentConfig& cfg) {
    json source = {{"path", cfg.source.path ? json(cfg.source.path->string()) : json(nullptr)},
                   {"synthetic", synthetic_json(cfg.source.synthetic)},
                   {"proxy_noise", opt(cfg.source.proxy_noise)},
                   {"oracle_cost", cfg.source.oracle_cost},
                   {"proxy_cost", cfg.source.proxy_cost}};
    json queries = cfg.queries.ids.empty() ? json{{"random", cfg.queries.random_count}}
                                           : json{{"ids", cfg.queries.ids}};
    json aggs = json::array();
    for (const auto a : cfg.aggs) aggs.push_back(std::string(to_string(a)));
    json algs = json::array();
    for (const auto& a : cfg.algorithms) algs.push_back(a.label());
    json sweep = nullptr;
    if (cfg.sweep) sweep = {{"axis", std::string(to_string(cfg.sweep->axis))}, {"grid", cfg.sweep->grid}};
    // Parallelism is an execution detail and stays out, so serial and parallel reports match.
    return {{"source", source},
            {"queries", queries},
            {"radius", cfg.radius},
            {"metric", std::string(to_string(cfg.metric))},
            {"aggs", aggs},
            {"algorithms", algs},
            {"sprint", sprint_json(cfg.sprint)},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"cost_ratio", cfg.cost_ratio},
            {"sweep", sweep},
            {"record_timings", cfg.record_timings}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    try {
        ExperimentConfig cfg;
        if (j.contains("source")) {
            const auto& s = j.at("source");
            if (s.contains("path") && !s.at("path").is_null())
                cfg.source.path = s.at("path").get<std::string>();
            if (s.contains("synthetic")) cfg.source.synthetic = synthetic_from_json(s.at("synthetic"));
            if (s.contains("proxy_noise") && !s.at("proxy_noise").is_null())
                cfg.source.proxy_noise = s.at("proxy_noise").get<double>();
            cfg.source.oracle_cost = s.value("oracle_cost", cfg.source.oracle_cost);
            cfg.source.proxy_cost = s.value("proxy_cost", cfg.source.proxy_cost);
        }
        if (j.contains("queries")) {
            const auto& q = j.at("queries");
            if (q.is_string()) {
                cfg.queries = QueryTargets::parse(q.get<std::string>());
            } else if (q.contains("ids")) {
                cfg.queries = {q.at("ids").get<std::vector<ObjectId>>(), 0};
            } else {
                cfg.queries = {{}, q.at("random").get<std::size_t>()};
            }
        }
        cfg.radius = j.value("radius", cfg.radius);
        if (j.contains("metric")) cfg.metric = parse_metric(j.at("metric").get<std::string>());
        if (j.contains("aggs")) {
            cfg.aggs.clear();
            for (const auto& a : j.at("aggs")) cfg.aggs.push_back(parse_aggregation(a.get<std::string>()));
        }
        if (j.contains("algorithms")) {
            cfg.algorithms.clear();
            for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(AlgorithmSpec::parse(a.get<std::string>()));
        }
        if (j.contains("sprint")) cfg.sprint = sprint_from_json(j.at("sprint"));
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.cost_ratio = j.value("cost_ratio", cfg.cost_ratio);
        if (j.contains("sweep") && !j.at("sweep").is_null()) {
            const auto& s = j.at("sweep");
            cfg.sweep = SweepSpec{parse_sweep_axis(s.at("axis").get<std::string>()),
                                  s.at("grid").get<std::vector<double>>()};
        }
        cfg.parallelism = j.value("parallelism", cfg.parallelism);
        cfg.record_timings = j.value("record_timings", cfg.record_timings);
        return cfg;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("bad experiment config: ") + e.what());
    }
}

json to_json(const MetricsReport& r) {
    json queries = json::array();
    for (const auto& q : r.queries)
        queries.push_back({{"query", q.query},
                           {"neighbors", q.neighbors},
                           {"density", q.density},
                           {"truth", truth_map(q.truth)}});
    json cells = json::array();
    for (const auto& c : r.cells) {
        json cj = {{"algorithm", c.algorithm},
                   {"agg", std::string(to_string(c.agg))},
                   {"query_index", c.query_index},
                   {"query", c.query},
                   {"trial", c.trial},
                   {"degenerate", c.degenerate}};
        if (c.degenerate) {
            cj["note"] = c.note;
        } else {
            cj.update({{"estimate", c.estimate},
                       {"truth", c.truth},
                       {"re_percent", c.re_percent},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"pr_gap", c.pr_gap},
                       {"t_star", opt(c.t_star)},
                       {"selected", c.selected},
                       {"on_s", c.on_s},
                       {"calls", calls_json(c.calls)}});
            if (r.timings_recorded) cj["selection_seconds"] = c.selection_seconds;
        }
        cells.push_back(std::move(cj));
    }
    json summary = json::array();
    for (const auto& s : r.summary) {
        json sj = {{"algorithm", s.algorithm},
                   {"agg", std::string(to_string(s.agg))},
                   {"cells", s.cells},
                   {"degenerate", s.degenerate},
                   {"re_mean", s.re_mean},
                   {"re_sd", s.re_sd},
                   {"f1_mean", s.f1_mean},
                   {"f1_sd", s.f1_sd},
                   {"pr_gap_mean", s.pr_gap_mean},
                   {"pr_gap_sd", s.pr_gap_sd},
                   {"oracle_calls_mean", s.oracle_calls_mean},
                   {"proxy_calls_mean", s.proxy_calls_mean},
                   {"speedup", s.speedup}};
        if (r.timings_recorded) sj["selection_seconds_mean"] = s.selection_seconds_mean;
        summary.push_back(std::move(sj));
    }
    return {{"population", r.population},
            {"brute_force_oracle_calls", r.brute_force_oracle_calls},
            {"queries", queries},
            {"summary", summary},
            {"cells", cells}};
}

json to_json(const ExperimentReport& r) {
    json points = json::array();
    for (const auto& p : r.points) points.push_back({{"value", p.value}, {"metrics", to_json(p.report)}});
    return {{"schema", "aqnn.experiment/1"},
            {"config", to_json(r.config)},
            {"sweep_axis", r.sweep_axis ? json(std::string(to_string(*r.sweep_axis))) : json(nullptr)},
            {"points", points}};
}

json to_json(const HypothesisTestReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"factor", c.factor},
                         {"op", std::string(to_string(c.op))},
                         {"accuracy", c.accuracy},
                         {"decisions", c.decisions},
                         {"skipped", c.skipped}});
    json by_factor = json::array();
    for (const auto& [f, a] : r.accuracy_by_factor) by_factor.push_back({{"factor", f}, {"accuracy", a}});
    return {{"schema", "aqnn.ht/1"},
            {"queries", r.queries},
            {"degenerate_trials", r.degenerate_trials},
            {"mean_accuracy", r.mean_accuracy},
            {"accuracy_by_factor", by_factor},
            {"cells", cells}};
}

json to_json(const CoverageResult& r) {
    return {{"coverage", r.coverage},       {"trials", r.trials},
            {"covered", r.covered},         {"degenerate", r.degenerate},
            {"sample_size", r.sample_size}, {"pilot_size", r.pilot_size},
            {"tolerance", r.tolerance}};
}

void write_cells_csv(const ExperimentReport& report, std::ostream& out) {
    const bool timings = report.config.record_timings;
    out << "point,algorithm,agg,query_index,query,trial,degenerate,estimate,truth,re_percent,"
           "precision,recall,f1,pr_gap,t_star,selected,on_s,oracle_calls,proxy_calls";
    if (timings) out << ",selection_seconds";
    out << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& p : report.points) {
        for (const auto& c : p.report.cells) {
            out << p.value << ',' << c.algorithm << ',' << to_string(c.agg) << ',' << c.query_index << ','
                << c.query << ',' << c.trial << ',' << (c.degenerate ? 1 : 0) << ',';
            if (c.degenerate) {
                out << ",,,,,,,,,,,";
            } else {
                out << c.estimate << ',' << c.truth << ',' << c.re_percent << ',' << c.precision << ','
                    << c.recall << ',' << c.f1 << ',' << c.pr_gap << ',';
                if (c.t_star) out << *c.t_star;
                out << ',' << c.selected << ',' << c.on_s << ',' << c.calls.oracle_calls << ','
                    << c.calls.proxy_calls;
            }
            if (timings) out << ',' << (c.degenerate ? 0.0 : c.selection_seconds);
            out << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace aqnn
