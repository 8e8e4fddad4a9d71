#include "aqnn/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "aqnn/aggregate.hpp"
#include "aqnn/error.hpp"
#include "aqnn/harness.hpp"
#include "aqnn/report.hpp"

namespace aqnn::cli {

namespace {

using nlohmann::json;

std::uint64_t env_seed() {
    const char* s = std::getenv("AQNN_SEED");
    if (s == nullptr || *s == '\0') return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != std::char_traits<char>::length(s)) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string("AQNN_SEED is not an unsigned integer: ") + s);
    }
}

/// Flags shared by every subcommand that needs a population.
struct SourceFlags {
    std::string data;
    SyntheticGenConfig gen;
    std::optional<std::uint64_t> data_seed;
    std::optional<double> proxy_noise;
    double oracle_cost = 2.0;

    void add(CLI::App& app) {
        app.add_option("--data", data, "JSONL dataset; synthetic when omitted")->check(CLI::ExistingFile);
        app.add_option("--n", gen.n_objects, "synthetic dataset size");
        app.add_option("--dim", gen.embedding_dim, "synthetic embedding dimension");
        app.add_option("--clusters", gen.n_clusters, "synthetic cluster count");
        app.add_option("--attr-shift", gen.attr_neighborhood_shift, "attribute shift of cluster 0");
        app.add_option("--data-seed", data_seed, "synthetic generator seed (defaults to --seed)");
        app.add_option("--proxy-noise", proxy_noise, "simulate the proxy as features plus N(0, sigma^2)");
        app.add_option("--cost-ratio", oracle_cost, "oracle cost per call relative to the proxy");
    }

    DatasetSource source(std::uint64_t seed) const {
        DatasetSource s;
        if (!data.empty()) s.path = data;
        s.synthetic = gen;
        s.synthetic.seed = data_seed.value_or(seed);
        s.proxy_noise = proxy_noise;
        s.oracle_cost = oracle_cost;
        return s;
    }
};

struct SprintFlags {
    SprintConfig cfg;

    void add(CLI::App& app) {
        app.add_option("--s", cfg.sample_size, "sample size");
        app.add_option("--sp", cfg.pilot_size, "pilot size");
        app.add_option("--omega-v", cfg.omega_v, "ternary-search tolerance");
        app.add_option("--omega-c", cfg.omega_c, "precision/recall gap tolerance");
        app.add_option("--alpha", cfg.alpha, "confidence parameter");
        app.add_option("--max-iters", cfg.max_iters, "binary-search cap");
    }
};

std::vector<Aggregation> parse_aggs(const std::string& text) {
    std::vector<Aggregation> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_aggregation(item));
    if (out.empty()) throw InvalidArgument("no aggregates given");
    return out;
}

std::vector<AlgorithmSpec> parse_algorithms(const std::string& text) {
    std::vector<AlgorithmSpec> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(AlgorithmSpec::parse(item));
    if (out.empty()) throw InvalidArgument("no algorithms given");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InvalidArgument("bad grid value '" + item + "'");
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << text;
}

// ---------------------------------------------------------------------------------------

int cmd_gen(const SyntheticGenConfig& gen, const std::string& out_path, std::ostream& out) {
    const Dataset ds = generate_synthetic(gen);
    save_dataset(ds, out_path);
    out << "wrote " << ds.size() << " objects to " << out_path << '\n';
    return ExitCode::ok;
}

struct QueryFlags {
    long long target = 0;
    double radius = 1.0;
    std::string metric = "euclidean";
    std::string agg = "AVG";
    bool truth = false;
    bool json_out = false;
};

int cmd_query(const SourceFlags& src, const SprintFlags& sf, const QueryFlags& qf, std::uint64_t seed,
              std::ostream& out) {
    const Population pop = materialize(src.source(seed));
    const QuerySpec q{ObjectId{qf.target}, qf.radius, parse_metric(qf.metric), parse_aggregation(qf.agg)};
    SprintConfig sc = sf.cfg;
    sc.seed = seed;
    CallLedger ledger;
    const auto outcome = select_neighbors(q, sc, pop.dataset, pop.oracle, pop.proxy, ledger);
    std::vector<double> values;
    for (const ObjectId id : outcome.result.neighbors.members) values.push_back(pop.dataset.attr(id));
    const double estimate =
        aggregate(q.agg, values, {sc.sample_size, pop.dataset.size(), AggregationScope::sample_estimate});

    json j = {{"agg", std::string(to_string(q.agg))},
              {"method", outcome.method},
              {"estimate", estimate},
              {"t_star", outcome.result.t_star},
              {"selected", outcome.result.neighbors.size()},
              {"pilot_f1", outcome.result.pilot_metrics.f1},
              {"calls", {{"oracle", outcome.calls.oracle_calls}, {"proxy", outcome.calls.proxy_calls}}}};
    if (qf.truth) {
        const Aggregation aggs[] = {q.agg};
        const GroundTruth gt = ground_truth(pop, q, aggs);
        std::vector<ObjectId> on_s;
        for (const ObjectId id : outcome.sample)
            if (gt.contains(id)) on_s.push_back(id);
        const auto pr = prf1(outcome.result.neighbors,
                             NeighborSet::from_ids(std::move(on_s), Space::oracle, "exact_frnn"));
        j["f1"] = pr.f1;
        j["precision"] = pr.precision;
        j["recall"] = pr.recall;
        const auto& t = gt.truth.at(q.agg);
        j["truth"] = t ? json(*t) : json(nullptr);
        j["re_percent"] = t && *t != 0.0 ? json(relative_error(estimate, *t)) : json(nullptr);
    }
    if (qf.json_out) {
        out << j.dump(2) << '\n';
        return ExitCode::ok;
    }
    out << std::setprecision(10);
    out << to_string(q.agg) << " estimate: " << estimate << '\n';
    if (qf.truth) {
        if (!j["truth"].is_null()) out << "truth: " << j["truth"].get<double>() << '\n';
        if (!j["re_percent"].is_null()) out << "RE: " << j["re_percent"].get<double>() << "%\n";
        out << "F1: " << j["f1"].get<double>() << '\n';
    }
    out << "t*: " << outcome.result.t_star << " (" << outcome.method << ")\n";
    out << "selected: " << outcome.result.neighbors.size() << '\n';
    out << "calls: oracle " << outcome.calls.oracle_calls << ", proxy " << outcome.calls.proxy_calls << '\n';
    return ExitCode::ok;
}

int cmd_bounds(const std::string& agg_name, const BoundsInput& in, bool json_out, std::ostream& out) {
    const Aggregation agg = parse_aggregation(agg_name);
    const BoundsOutput raw = min_sizes(agg, in);
    const BoundsOutput res = reconcile_sizes(raw);
    if (json_out) {
        json j = to_json(res);
        j["agg"] = std::string(to_string(agg));
        if (agg == Aggregation::sum) {
            const auto t = sum_bound_terms(in);
            j["terms"] = {{"s_count", t.s_count},     {"s_avg", t.s_avg},
                          {"s_p_count", t.s_p_count}, {"s_p_avg", t.s_p_avg},
                          {"omega_nn_sum", t.omega_nn_sum}};
        }
        out << j.dump(2) << '\n';
        return ExitCode::ok;
    }
    out << std::setprecision(10);
    out << "agg: " << to_string(agg) << '\n';
    out << "s_min = " << res.s_min << " (raw " << raw.s_raw << ")\n";
    out << "s_p_min = " << res.s_p_min << " (raw " << raw.s_p_raw << ")\n";
    if (res.omega_nn_implied) out << "omega_nn implied = " << *res.omega_nn_implied << '\n';
    if (res.reconciled) out << "s_min raised to s_p_min\n";
    for (const auto& w : res.warnings) out << "warning: " << w << '\n';
    return ExitCode::ok;
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
    out << std::setprecision(6);
    for (const auto& p : report.points) {
        if (report.sweep_axis) out << to_string(*report.sweep_axis) << " = " << p.value << '\n';
        for (const auto& s : p.report.summary) {
            out << "  " << s.algorithm << ' ' << to_string(s.agg) << ": RE " << s.re_mean << "% (sd "
                << s.re_sd << "), F1 " << s.f1_mean << ", |P-R| " << s.pr_gap_mean << ", speedup "
                << s.speedup;
            if (s.degenerate > 0) out << ", degenerate " << s.degenerate << '/' << s.cells;
            if (p.report.timings_recorded) out << ", selection " << s.selection_seconds_mean << " s";
            out << '\n';
        }
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Aggregation queries over nearest neighbors with sampled proxy/oracle embeddings", "aqnn"};
    app.require_subcommand(1);
    app.allow_extras(false);

    std::optional<std::uint64_t> seed_flag;
    auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed_flag, "root seed (AQNN_SEED fallback)"); };

    // gen
    auto* gen = app.add_subcommand("gen", "write a synthetic JSONL dataset");
    SyntheticGenConfig gen_cfg;
    std::string gen_out;
    gen->set_config("--config", "", "key = value file with generator settings");
    gen->add_option("--out,-o", gen_out, "output path")->required();
    gen->add_option("--n", gen_cfg.n_objects, "number of objects");
    gen->add_option("--dim", gen_cfg.embedding_dim, "embedding dimension");
    gen->add_option("--clusters", gen_cfg.n_clusters, "cluster count");
    gen->add_option("--spread", gen_cfg.cluster_spread, "sd of cluster centers");
    gen->add_option("--cluster-sd", gen_cfg.cluster_sd, "sd of points around their center");
    gen->add_option("--proxy-noise", gen_cfg.proxy_noise_sigma, "proxy noise sigma");
    gen->add_option("--attr-mean", gen_cfg.attr_global_mean, "attribute mean");
    gen->add_option("--attr-sd", gen_cfg.attr_global_sd, "attribute sd");
    gen->add_option("--attr-shift", gen_cfg.attr_neighborhood_shift, "attribute shift of cluster 0");
    gen->add_option("--attr-lo", gen_cfg.attr_bounds.lo, "attribute lower bound");
    gen->add_option("--attr-hi", gen_cfg.attr_bounds.hi, "attribute upper bound");
    add_seed(gen);

    // query
    auto* query = app.add_subcommand("query", "run one aggregation query");
    SourceFlags query_src;
    SprintFlags query_sprint;
    QueryFlags qf;
    query_src.add(*query);
    query_sprint.add(*query);
    query->add_option("--target", qf.target, "query target object id");
    query->add_option("--radius", qf.radius, "neighborhood radius");
    query->add_option("--metric", qf.metric, "euclidean or cosine");
    query->add_option("--agg", qf.agg, "AVG, VAR, PCT, COUNT or SUM");
    query->add_flag("--truth", qf.truth, "also compute the exact answer over all of D");
    query->add_flag("--json", qf.json_out, "machine-readable output");
    add_seed(query);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "minimum sample and pilot sizes");
    std::string bounds_agg = "AVG";
    BoundsInput bin;
    std::optional<std::uint64_t> on_s, sample_size;
    bool bounds_json = false;
    bounds->add_option("--agg", bounds_agg, "AVG, VAR, PCT, COUNT or SUM");
    bounds->add_option("--alpha", bin.alpha, "failure probability");
    bounds->add_option("--rho", bin.rho, "neighborhood density");
    bounds->add_option("--a", bin.a, "attribute lower bound");
    bounds->add_option("--b", bin.b, "attribute upper bound");
    bounds->add_option("--omega-s", bin.omega_s, "sampling-error tolerance");
    bounds->add_option("--omega-nn", bin.omega_nn, "selection-error tolerance");
    bounds->add_option("--omega-c", bin.omega_c, "precision/recall gap tolerance");
    bounds->add_option("--lambda", bin.lambda, "pilot F1 tolerance");
    bounds->add_option("--population", bin.population_size, "|D|");
    bounds->add_option("--on-s", on_s, "|ON_S|");
    bounds->add_option("--avg", bin.avg_s_abs, "|AVG_S| estimate (SUM)");
    bounds->add_option("--on-d", bin.on_d_size, "|ON_D| estimate (SUM)");
    bounds->add_option("--sample-size", sample_size, "|S| for the SUM selection tolerance");
    bounds->add_flag("--json", bounds_json, "machine-readable output");

    // bench
    auto* bench = app.add_subcommand("bench", "run an experiment grid");
    SourceFlags bench_src;
    SprintFlags bench_sprint;
    std::string bench_config, bench_queries = "random:10", bench_aggs = "AVG", bench_algs = "sprint";
    std::string bench_metric = "euclidean", bench_sweep, bench_grid, bench_out, bench_csv;
    double bench_radius = 1.0;
    std::size_t bench_trials = 30, bench_parallel = 1;
    bool bench_json = false, bench_timings = false;
    bench->add_option("--config", bench_config, "experiment config JSON; flags override it")
        ->check(CLI::ExistingFile);
    bench_src.add(*bench);
    bench_sprint.add(*bench);
    bench->add_option("--queries", bench_queries, "random:N or comma-separated ids");
    bench->add_option("--radius", bench_radius, "neighborhood radius");
    bench->add_option("--metric", bench_metric, "euclidean or cosine");
    bench->add_option("--agg", bench_aggs, "comma-separated aggregates");
    bench->add_option("--algorithms", bench_algs, "comma-separated algorithms");
    bench->add_option("--trials", bench_trials, "trials per query");
    bench->add_option("--sweep", bench_sweep, "dataset_size, sample_size, pilot_size or radius");
    bench->add_option("--grid", bench_grid, "comma-separated sweep values");
    bench->add_option("--parallel", bench_parallel, "worker threads");
    bench->add_option("--out,-o", bench_out, "write the JSON report here");
    bench->add_option("--csv", bench_csv, "write per-cell rows here");
    bench->add_flag("--json", bench_json, "print the JSON report");
    bench->add_flag("--timings", bench_timings, "record selection wall time");
    add_seed(bench);

    // ht
    auto* ht = app.add_subcommand("ht", "hypothesis-testing accuracy over a factor grid");
    SourceFlags ht_src;
    SprintFlags ht_sprint;
    HypothesisTestConfig hcfg;
    std::string ht_agg = "AVG", ht_alg = "sprint", ht_queries = "random:10", ht_metric = "euclidean", ht_ops = ">=,<=";
    bool ht_json = false;
    ht_src.add(*ht);
    ht_sprint.add(*ht);
    ht->add_option("--agg", ht_agg, "AVG or PCT");
    ht->add_option("--algorithm", ht_alg, "selection algorithm");
    ht->add_option("--queries", ht_queries, "random:N or comma-separated ids");
    ht->add_option("--radius", hcfg.radius, "neighborhood radius");
    ht->add_option("--metric", ht_metric, "euclidean or cosine");
    ht->add_option("--trials", hcfg.trials, "trials per query");
    ht->add_option("--factor-min", hcfg.factor_min, "smallest factor");
    ht->add_option("--factor-max", hcfg.factor_max, "largest factor");
    ht->add_option("--factor-step", hcfg.factor_step, "factor step");
    ht->add_option("--ops", ht_ops, "comma-separated comparisons");
    ht->add_option("--test-alpha", hcfg.test_alpha, "test significance level");
    ht->add_option("--parallel", hcfg.parallelism, "worker threads");
    ht->add_flag("--json", ht_json, "machine-readable output");
    add_seed(ht);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            std::ostringstream o, eo;
            const int code = app.exit(e, o, eo);
            out << o.str();
            err << eo.str();
            return code == 0 ? ExitCode::ok : ExitCode::usage_error;
        }
        const std::uint64_t seed = seed_flag ? *seed_flag : env_seed();

        if (gen->parsed()) {
            gen_cfg.seed = seed;
            return cmd_gen(gen_cfg, gen_out, out);
        }
        if (query->parsed()) return cmd_query(query_src, query_sprint, qf, seed, out);
        if (bounds->parsed()) {
            bin.on_s_size = on_s;
            bin.sample_size = sample_size;
            return cmd_bounds(bounds_agg, bin, bounds_json, out);
        }
        if (bench->parsed()) {
            ExperimentConfig cfg;
            if (!bench_config.empty()) {
                std::ifstream f(bench_config);
                json j;
                try {
                    f >> j;
                } catch (const json::exception& e) {
                    throw DataError(bench_config + ": " + e.what());
                }
                cfg = experiment_config_from_json(j);
            }
            auto given = [&](const char* name) { return bench->count(name) > 0; };
            if (bench_config.empty() || given("--data") || given("--n") || given("--proxy-noise") ||
                given("--data-seed") || given("--dim") || given("--clusters") || given("--attr-shift"))
                cfg.source = bench_src.source(seed);
            if (bench_config.empty() || given("--queries")) cfg.queries = QueryTargets::parse(bench_queries);
            if (bench_config.empty() || given("--radius")) cfg.radius = bench_radius;
            if (bench_config.empty() || given("--metric")) cfg.metric = parse_metric(bench_metric);
            if (bench_config.empty() || given("--agg")) cfg.aggs = parse_aggs(bench_aggs);
            if (bench_config.empty() || given("--algorithms")) cfg.algorithms = parse_algorithms(bench_algs);
            if (bench_config.empty() || given("--trials")) cfg.trials = bench_trials;
            if (bench_config.empty()) cfg.sprint = bench_sprint.cfg;
            else {
                if (given("--s")) cfg.sprint.sample_size = bench_sprint.cfg.sample_size;
                if (given("--sp")) cfg.sprint.pilot_size = bench_sprint.cfg.pilot_size;
                if (given("--omega-v")) cfg.sprint.omega_v = bench_sprint.cfg.omega_v;
                if (given("--omega-c")) cfg.sprint.omega_c = bench_sprint.cfg.omega_c;
                if (given("--alpha")) cfg.sprint.alpha = bench_sprint.cfg.alpha;
                if (given("--max-iters")) cfg.sprint.max_iters = bench_sprint.cfg.max_iters;
            }
            if (bench_config.empty() || seed_flag || std::getenv("AQNN_SEED")) cfg.seed = seed;
            if (!bench_sweep.empty()) cfg.sweep = SweepSpec{parse_sweep_axis(bench_sweep), parse_grid(bench_grid)};
            else if (!bench_grid.empty()) throw InvalidArgument("--grid needs --sweep");
            if (given("--parallel") || bench_config.empty()) cfg.parallelism = bench_parallel;
            if (bench_timings) cfg.record_timings = true;

            const ExperimentReport report = run_experiment(cfg);
            const std::string text = to_json(report).dump(2) + "\n";
            if (!bench_out.empty()) write_text_file(bench_out, text);
            if (!bench_csv.empty()) {
                std::ostringstream csv;
                write_cells_csv(report, csv);
                write_text_file(bench_csv, csv.str());
            }
            if (bench_json) out << text;
            else print_summary(report, out);
            return ExitCode::ok;
        }
        if (ht->parsed()) {
            hcfg.source = ht_src.source(seed);
            hcfg.queries = QueryTargets::parse(ht_queries);
            hcfg.metric = parse_metric(ht_metric);
            hcfg.agg = parse_aggregation(ht_agg);
            hcfg.algorithm = AlgorithmSpec::parse(ht_alg);
            hcfg.sprint = ht_sprint.cfg;
            hcfg.seed = seed;
            hcfg.ops.clear();
            std::stringstream ss(ht_ops);
            for (std::string item; std::getline(ss, item, ',');) hcfg.ops.push_back(parse_comparison(item));
            const auto report = run_hypothesis_tests(hcfg);
            if (ht_json) {
                out << to_json(report).dump(2) << '\n';
            } else {
                out << std::setprecision(6);
                out << "mean accuracy: " << report.mean_accuracy << " over " << report.queries << " queries\n";
                for (const auto& [f, a] : report.accuracy_by_factor) out << "  factor " << f << ": " << a << '\n';
                if (report.degenerate_trials > 0) out << "degenerate trials: " << report.degenerate_trials << '\n';
            }
            return ExitCode::ok;
        }
        return ExitCode::usage_error;
    } catch (const InvalidArgument& e) {
        err << "aqnn: " << e.what() << '\n';
        return ExitCode::usage_error;
    } catch (const DataError& e) {
        err << "aqnn: " << e.what() << '\n';
        return ExitCode::data_error;
    } catch (const DegenerateQuery& e) {
        err << "aqnn: degenerate query: " << e.what() << '\n';
        return ExitCode::degenerate_query;
    } catch (const std::exception& e) {
        err << "aqnn: " << e.what() << '\n';
        return ExitCode::data_error;
    }
}

}  // namespace aqnn::cli
