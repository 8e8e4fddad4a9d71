#include "aqnn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "aqnn/aggregate.hpp"
#include "aqnn/error.hpp"
#include "aqnn/rng.hpp"

namespace aqnn {

// ---------------------------------------------------------------------------------------
// Population and configuration parsing
// ---------------------------------------------------------------------------------------

Population materialize(const DatasetSource& source) {
    if (source.path) {
        Dataset ds = load_dataset(*source.path);
        EmbeddingModel oracle = ds.has_oracle_embeddings()
                                    ? EmbeddingModel::stored_oracle(source.oracle_cost)
                                    : EmbeddingModel::simulated_oracle(source.oracle_cost);
        EmbeddingModel proxy;
        if (source.proxy_noise) {
            proxy = EmbeddingModel::simulated_proxy(*source.proxy_noise,
                                                    synthetic_proxy_noise_seed(source.synthetic),
                                                    source.proxy_cost);
        } else if (ds.has_proxy_embeddings()) {
            proxy = EmbeddingModel::stored_proxy(source.proxy_cost);
        } else {
            proxy = EmbeddingModel::simulated_proxy(0.0, 0, source.proxy_cost);
        }
        return {std::move(ds), oracle, proxy};
    }
    SyntheticGenConfig gen = source.synthetic;
    if (source.proxy_noise) gen.proxy_noise_sigma = *source.proxy_noise;
    gen.materialize_embeddings = false;
    return {generate_synthetic(gen), EmbeddingModel::simulated_oracle(source.oracle_cost),
            EmbeddingModel::simulated_proxy(gen.proxy_noise_sigma, synthetic_proxy_noise_seed(gen),
                                            source.proxy_cost)};
}

std::string_view to_string(AlgorithmKind kind) noexcept {
    switch (kind) {
        case AlgorithmKind::sprint: return "sprint";
        case AlgorithmKind::sprint_v: return "sprint_v";
        case AlgorithmKind::sprint_c: return "sprint_c";
        case AlgorithmKind::two_phase: return "two_phase";
        case AlgorithmKind::pqe_pt_fixed: return "pqe_pt";
        case AlgorithmKind::top_k: return "top_k";
        case AlgorithmKind::brute_force: return "brute_force";
    }
    return "?";
}

AlgorithmSpec AlgorithmSpec::parse(std::string_view text) {
    AlgorithmSpec spec;
    std::string_view name = text;
    std::optional<std::string_view> arg;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    constexpr AlgorithmKind kinds[] = {AlgorithmKind::sprint,       AlgorithmKind::sprint_v,
                                       AlgorithmKind::sprint_c,     AlgorithmKind::two_phase,
                                       AlgorithmKind::pqe_pt_fixed, AlgorithmKind::top_k,
                                       AlgorithmKind::brute_force};
    const auto it = std::find_if(std::begin(kinds), std::end(kinds),
                                 [&](AlgorithmKind k) { return to_string(k) == name; });
    if (it == std::end(kinds)) throw InvalidArgument("unknown algorithm '" + std::string(text) + "'");
    spec.kind = *it;
    if (arg) {
        if (spec.kind != AlgorithmKind::pqe_pt_fixed)
            throw InvalidArgument("only pqe_pt takes a target argument");
        try {
            std::size_t used = 0;
            spec.target = std::stod(std::string(*arg), &used);
            if (used != arg->size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InvalidArgument("bad pqe_pt target '" + std::string(*arg) + "'");
        }
        if (!(spec.target >= 0.0 && spec.target <= 1.0))
            throw InvalidArgument("pqe_pt target must lie in [0, 1]");
    }
    return spec;
}

std::string AlgorithmSpec::label() const {
    std::string out(to_string(kind));
    if (kind == AlgorithmKind::pqe_pt_fixed) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ":%g", target);
        out += buf;
    }
    return out;
}

QueryTargets QueryTargets::parse(std::string_view text) {
    QueryTargets q;
    if (text.rfind("random:", 0) == 0) {
        const std::string n(text.substr(7));
        try {
            std::size_t used = 0;
            const long long v = std::stoll(n, &used);
            if (used != n.size() || v < 1) throw std::invalid_argument("bad");
            q.random_count = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw InvalidArgument("bad query count in '" + std::string(text) + "'");
        }
        return q;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument("bad");
            q.ids.push_back(v);
        } catch (const std::exception&) {
            throw InvalidArgument("bad query id '" + item + "'");
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return q;
}

std::vector<ObjectId> QueryTargets::resolve(std::size_t population, std::uint64_t seed) const {
    if (!ids.empty()) {
        for (const ObjectId id : ids)
            if (id < 0 || static_cast<std::size_t>(id) >= population)
                throw InvalidArgument("query id " + std::to_string(id) + " is outside the dataset");
        return ids;
    }
    if (random_count == 0) throw InvalidArgument("no query targets");
    if (random_count > population) throw InvalidArgument("more random queries than objects");
    return draw_sample(population, random_count, derive_seed(seed, "queries"));
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::dataset_size: return "dataset_size";
        case SweepAxis::sample_size: return "sample_size";
        case SweepAxis::pilot_size: return "pilot_size";
        case SweepAxis::radius: return "radius";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    for (const auto axis : {SweepAxis::dataset_size, SweepAxis::sample_size, SweepAxis::pilot_size,
                            SweepAxis::radius})
        if (to_string(axis) == name) return axis;
    throw InvalidArgument("unknown sweep axis '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be >= 0");
    if (aggs.empty()) throw InvalidArgument("no aggregates requested");
    if (algorithms.empty()) throw InvalidArgument("no algorithms requested");
    if (!(cost_ratio > 0.0)) throw InvalidArgument("cost ratio must be positive");
    if (parallelism < 1) throw InvalidArgument("parallelism must be >= 1");
    if (queries.ids.empty() && queries.random_count == 0) throw InvalidArgument("no query targets");
    if (sweep) {
        if (sweep->grid.empty()) throw InvalidArgument("sweep grid is empty");
        for (std::size_t i = 1; i < sweep->grid.size(); ++i)
            if (!(sweep->grid[i] > sweep->grid[i - 1]))
                throw InvalidArgument("sweep grid must be strictly increasing");
        if (sweep->axis == SweepAxis::dataset_size && source.path)
            throw InvalidArgument("a dataset_size sweep needs a synthetic source");
    }
}

// ---------------------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------------------

double GroundTruth::density(std::size_t population) const {
    return population == 0 ? 0.0 : static_cast<double>(on_d.size()) / static_cast<double>(population);
}

namespace {

std::vector<double> values_of(const Dataset& ds, std::span<const ObjectId> ids) {
    std::vector<double> out;
    out.reserve(ids.size());
    for (const ObjectId id : ids) out.push_back(ds.attr(id));
    return out;
}

}  // namespace

GroundTruth ground_truth(const Population& pop, const QuerySpec& query,
                         std::span<const Aggregation> aggs) {
    const Dataset& ds = pop.dataset;
    query.validate(ds);
    CallLedger ledger;
    // A member target reuses its own object embedding, so a pass costs exactly |D| calls.
    std::vector<double> q;
    if (const auto* id = std::get_if<ObjectId>(&query.target))
        q = embed(pop.oracle, ds, *id, ledger);
    else
        q = embed_query(pop.oracle, ds, query.target, ledger);

    GroundTruth gt;
    if (const auto* id = std::get_if<ObjectId>(&query.target)) gt.query = *id;
    gt.in_neighborhood.assign(ds.size(), 0);
    std::vector<ObjectId> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto id = static_cast<ObjectId>(i);
        if (dist(query.metric, embed(pop.oracle, ds, id, ledger), q) <= query.radius) {
            members.push_back(id);
            gt.in_neighborhood[i] = 1;
        }
    }
    gt.on_d = NeighborSet::from_ids(std::move(members), Space::oracle, "brute_force");
    gt.calls = ledger.counts();

    const auto values = values_of(ds, gt.on_d.members);
    const AggregationContext ctx{ds.size(), ds.size(), AggregationScope::population_truth};
    for (const Aggregation agg : aggs) {
        try {
            gt.truth[agg] = aggregate(agg, values, ctx);
        } catch (const DegenerateQuery&) {
            gt.truth[agg] = std::nullopt;
        }
    }
    return gt;
}

// ---------------------------------------------------------------------------------------
// Per-unit selection
// ---------------------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// What one algorithm selected in one unit, before aggregation.
struct Selected {
    NeighborSet neighbors;
    std::optional<double> t_star;
    CallCounts calls;
    double seconds = 0.0;
    bool exact = false;  // brute force: aggregate over ON_D at population scope
};

NeighborSet on_sample(const GroundTruth& gt, std::span<const ObjectId> sample) {
    std::vector<ObjectId> ids;
    for (const ObjectId id : sample)
        if (gt.contains(id)) ids.push_back(id);
    return NeighborSet::from_ids(std::move(ids), Space::oracle, "exact_frnn");
}

/// Runs one algorithm on a prepared problem. `base_calls` are the ledger counts after
/// preparation (query target, sample proxies, pilot oracles). Only brute force accepts a
/// null problem.
Selected run_algorithm(const AlgorithmSpec& spec, Aggregation agg, const SelectionProblem* problem,
                       const SprintConfig& sc, const NeighborSet& on_s, const GroundTruth& gt,
                       std::size_t population, CallCounts base_calls) {
    Selected out;
    out.calls = base_calls;
    SelectionResult r;
    AlgorithmKind kind = spec.kind;
    if (kind == AlgorithmKind::sprint) {
        switch (sensitivity_of(agg)) {
            case Sensitivity::value: kind = AlgorithmKind::sprint_v; break;
            case Sensitivity::count: kind = AlgorithmKind::sprint_c; break;
            case Sensitivity::both: kind = AlgorithmKind::two_phase; break;
        }
    }
    if (kind == AlgorithmKind::brute_force) {
        out.neighbors = gt.on_d;
        out.calls = {static_cast<std::uint64_t>(population), 0};
        out.exact = true;
        return out;
    }
    if (problem == nullptr) throw InvalidArgument("selection problem missing");
    switch (kind) {
        case AlgorithmKind::sprint_v: r = sprint_v(*problem, sc.omega_v); break;
        case AlgorithmKind::sprint_c: r = sprint_c(*problem, sc.omega_c, sc.max_iters); break;
        case AlgorithmKind::two_phase: r = two_phase(*problem, sc.omega_c, sc.omega_v, sc.max_iters); break;
        case AlgorithmKind::pqe_pt_fixed: r = pqe_pt_fixed(*problem, spec.target); break;
        case AlgorithmKind::top_k:
            // K is the exact neighborhood size within S, which takes an oracle pass over S.
            out.neighbors = top_k_baseline(problem->sample(), on_s.size());
            out.calls.oracle_calls = problem->sample().size() + 1;
            return out;
        case AlgorithmKind::brute_force:
        case AlgorithmKind::sprint: break;
    }
    out.neighbors = std::move(r.neighbors);
    out.t_star = r.t_star;
    return out;
}

double sample_sd(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(std::span<const double> xs) {
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Runs `work(i)` for i in [0, n) on `threads` workers. Exceptions are rethrown after join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& work) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::uint64_t trial_seed(std::uint64_t root, std::size_t query_index, std::size_t trial) {
    return derive_seed(root, "trial", query_index, trial);
}

}  // namespace

// ---------------------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------------------

const SummaryRow* MetricsReport::find(std::string_view algorithm, Aggregation agg) const {
    for (const auto& row : summary)
        if (row.algorithm == algorithm && row.agg == agg) return &row;
    return nullptr;
}

MetricsReport run_metrics(const ExperimentConfig& cfg, const Population& pop) {
    cfg.validate();
    const Dataset& ds = pop.dataset;
    cfg.sprint.validate(ds.size());
    const auto targets = cfg.queries.resolve(ds.size(), cfg.seed);

    MetricsReport report;
    report.population = ds.size();
    report.timings_recorded = cfg.record_timings;

    std::vector<GroundTruth> truths(targets.size());
    parallel_for(targets.size(), cfg.parallelism, [&](std::size_t qi) {
        const QuerySpec q{targets[qi], cfg.radius, cfg.metric, cfg.aggs.front()};
        truths[qi] = ground_truth(pop, q, cfg.aggs);
    });
    for (std::size_t qi = 0; qi < targets.size(); ++qi) {
        report.brute_force_oracle_calls = truths[qi].calls.oracle_calls;
        report.queries.push_back({targets[qi], truths[qi].on_d.size(), truths[qi].density(ds.size()),
                                  truths[qi].truth});
    }

    const std::size_t per_unit = cfg.algorithms.size() * cfg.aggs.size();
    const std::size_t units = targets.size() * cfg.trials;
    std::vector<CellResult> cells(units * per_unit);

    parallel_for(units, cfg.parallelism, [&](std::size_t unit) {
        const std::size_t qi = unit / cfg.trials;
        const std::size_t trial = unit % cfg.trials;
        const GroundTruth& gt = truths[qi];
        SprintConfig sc = cfg.sprint;
        sc.seed = trial_seed(cfg.seed, qi, trial);
        const QuerySpec q{targets[qi], cfg.radius, cfg.metric, cfg.aggs.front()};

        auto fill_base = [&](CellResult& c, std::size_t ai, std::size_t gi) {
            c.algorithm = cfg.algorithms[ai].label();
            c.agg = cfg.aggs[gi];
            c.query_index = qi;
            c.query = targets[qi];
            c.trial = trial;
        };
        auto cell_at = [&](std::size_t ai, std::size_t gi) -> CellResult& {
            return cells[unit * per_unit + ai * cfg.aggs.size() + gi];
        };

        CallLedger ledger;
        std::vector<ObjectId> sample;
        std::optional<SelectionProblem> problem;
        std::string unit_failure;
        const auto prep_start = Clock::now();
        try {
            problem.emplace(prepare_selection(q, sc, ds, pop.oracle, pop.proxy, ledger, &sample));
        } catch (const DegenerateQuery& e) {
            unit_failure = e.what();
        }
        const double prep_seconds = seconds_since(prep_start);
        const CallCounts base_calls = ledger.counts();
        const NeighborSet on_s = problem ? on_sample(gt, sample) : NeighborSet{};

        for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
            const AlgorithmSpec& spec = cfg.algorithms[ai];
            for (std::size_t gi = 0; gi < cfg.aggs.size(); ++gi) {
                CellResult& c = cell_at(ai, gi);
                fill_base(c, ai, gi);
                const Aggregation agg = cfg.aggs[gi];
                const auto& truth = gt.truth.at(agg);
                if (!truth) {
                    c.degenerate = true;
                    c.note = "empty neighborhood";
                    continue;
                }
                c.truth = *truth;
                if (!problem && spec.kind != AlgorithmKind::brute_force) {
                    c.degenerate = true;
                    c.note = unit_failure;
                    continue;
                }
                const auto start = Clock::now();
                const Selected sel = run_algorithm(spec, agg, problem ? &*problem : nullptr, sc, on_s, gt,
                                                   ds.size(), base_calls);
                c.calls = sel.calls;
                c.t_star = sel.t_star;
                c.selected = sel.neighbors.size();
                c.on_s = sel.exact ? gt.on_d.size() : on_s.size();
                const PrecisionRecall pr = prf1(sel.neighbors, sel.exact ? gt.on_d : on_s);
                c.precision = pr.precision;
                c.recall = pr.recall;
                c.f1 = pr.f1;
                c.pr_gap = pr.gap();
                try {
                    const auto values = values_of(ds, sel.neighbors.members);
                    const AggregationContext ctx =
                        sel.exact ? AggregationContext{ds.size(), ds.size(), AggregationScope::population_truth}
                                  : AggregationContext{sc.sample_size, ds.size(), AggregationScope::sample_estimate};
                    c.estimate = aggregate(agg, values, ctx);
                    c.re_percent = relative_error(c.estimate, c.truth);
                } catch (const DegenerateQuery& e) {
                    c.degenerate = true;
                    c.note = e.what();
                } catch (const InvalidArgument& e) {
                    c.degenerate = true;
                    c.note = e.what();
                }
                // Selection plus aggregation; the shared sample/pilot preparation is charged to
                // every sampled algorithm of the unit.
                if (cfg.record_timings)
                    c.selection_seconds =
                        seconds_since(start) + (spec.kind == AlgorithmKind::brute_force ? 0.0 : prep_seconds);
            }
        }
    });

    std::size_t degenerate = 0;
    for (const auto& c : cells) degenerate += c.degenerate ? 1 : 0;
    if (!cells.empty() && degenerate == cells.size())
        throw DegenerateQuery("every cell is degenerate (first: " + cells.front().note + ")");

    for (const auto& spec : cfg.algorithms) {
        for (const Aggregation agg : cfg.aggs) {
            SummaryRow row;
            row.algorithm = spec.label();
            row.agg = agg;
            std::vector<double> re, f1, gap, oc, pc, secs;
            for (const auto& c : cells) {
                if (c.algorithm != row.algorithm || c.agg != agg) continue;
                ++row.cells;
                if (c.degenerate) {
                    ++row.degenerate;
                    continue;
                }
                re.push_back(c.re_percent);
                f1.push_back(c.f1);
                gap.push_back(c.pr_gap);
                oc.push_back(static_cast<double>(c.calls.oracle_calls));
                pc.push_back(static_cast<double>(c.calls.proxy_calls));
                secs.push_back(c.selection_seconds);
            }
            row.re_mean = mean_of(re);
            row.re_sd = sample_sd(re, row.re_mean);
            row.f1_mean = mean_of(f1);
            row.f1_sd = sample_sd(f1, row.f1_mean);
            row.pr_gap_mean = mean_of(gap);
            row.pr_gap_sd = sample_sd(gap, row.pr_gap_mean);
            row.oracle_calls_mean = mean_of(oc);
            row.proxy_calls_mean = mean_of(pc);
            row.selection_seconds_mean = mean_of(secs);
            const double denom = cfg.cost_ratio * row.oracle_calls_mean + row.proxy_calls_mean;
            row.speedup = denom > 0.0 ? cfg.cost_ratio * static_cast<double>(ds.size()) / denom : 0.0;
            report.summary.push_back(std::move(row));
        }
    }
    report.cells = std::move(cells);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport out;
    out.config = cfg;
    if (!cfg.sweep) {
        out.points.push_back({0.0, run_metrics(cfg, materialize(cfg.source))});
        return out;
    }
    out.sweep_axis = cfg.sweep->axis;
    std::optional<Population> shared;
    if (cfg.sweep->axis != SweepAxis::dataset_size) shared = materialize(cfg.source);
    for (const double v : cfg.sweep->grid) {
        ExperimentConfig point = cfg;
        point.sweep.reset();
        auto as_size = [&](const char* what) {
            if (!(v >= 1.0) || v != std::floor(v))
                throw InvalidArgument(std::string(what) + " sweep values must be positive integers");
            return static_cast<std::size_t>(v);
        };
        switch (cfg.sweep->axis) {
            case SweepAxis::dataset_size: point.source.synthetic.n_objects = as_size("dataset_size"); break;
            case SweepAxis::sample_size: point.sprint.sample_size = as_size("sample_size"); break;
            case SweepAxis::pilot_size: point.sprint.pilot_size = as_size("pilot_size"); break;
            case SweepAxis::radius: point.radius = v; break;
        }
        if (shared) {
            out.points.push_back({v, run_metrics(point, *shared)});
        } else {
            out.points.push_back({v, run_metrics(point, materialize(point.source))});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------------------

CoverageResult coverage_check(const CoverageConfig& cfg, BoundSource source) {
    if (cfg.trials < 1) throw InvalidArgument("trials must be >= 1");
    const Sensitivity sens = sensitivity_of(cfg.agg);
    if (source == BoundSource::value_bound && sens != Sensitivity::value)
        throw InvalidArgument("the value-sensitive bound covers AVG and VAR only");
    if (source == BoundSource::count_bound && sens != Sensitivity::count)
        throw InvalidArgument("the count-sensitive bound covers PCT and COUNT only");

    const Population pop = materialize(cfg.source);
    const Dataset& ds = pop.dataset;
    const QuerySpec q{cfg.query, cfg.radius, cfg.metric, cfg.agg};
    const Aggregation aggs[] = {cfg.agg};
    const GroundTruth gt = ground_truth(pop, q, aggs);
    if (!gt.truth.at(cfg.agg)) throw DegenerateQuery("empty neighborhood");
    const double truth = *gt.truth.at(cfg.agg);

    BoundsInput in = cfg.tolerances;
    in.population_size = ds.size();
    if (source == BoundSource::value_bound) {
        in.a = ds.bounds().lo;
        in.b = ds.bounds().hi;
        in.bounds_data_derived = ds.bounds().data_derived;
    }
    const BoundsOutput sizes = reconcile_sizes(min_sizes(cfg.agg, in));

    CoverageResult res;
    res.sample_size = cfg.sample_size_override.value_or(sizes.s_min);
    res.pilot_size = std::min(cfg.pilot_size_override.value_or(sizes.s_p_min), res.sample_size);
    if (res.sample_size > ds.size())
        throw InvalidArgument("required sample size " + std::to_string(res.sample_size) +
                              " exceeds the dataset size " + std::to_string(ds.size()));
    const double omega_nn = source == BoundSource::value_bound ? sizes.omega_nn_implied.value_or(in.omega_nn)
                                                            : in.omega_nn;
    res.tolerance = in.omega_s + omega_nn;
    res.trials = cfg.trials;

    SprintConfig sc = cfg.search;
    sc.sample_size = res.sample_size;
    sc.pilot_size = res.pilot_size;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        sc.seed = derive_seed(cfg.seed, "coverage", t);
        try {
            CallLedger ledger;
            const auto outcome = select_neighbors(q, sc, ds, pop.oracle, pop.proxy, ledger);
            const auto values = values_of(ds, outcome.result.neighbors.members);
            const double est = aggregate(cfg.agg, values,
                                         {sc.sample_size, ds.size(), AggregationScope::sample_estimate});
            if (std::abs(est - truth) <= res.tolerance) ++res.covered;
        } catch (const DegenerateQuery&) {
            ++res.degenerate;
        }
    }
    res.coverage = static_cast<double>(res.covered) / static_cast<double>(res.trials);
    return res;
}

// ---------------------------------------------------------------------------------------
// Hypothesis testing
// ---------------------------------------------------------------------------------------

std::vector<double> HypothesisTestConfig::factors() const {
    std::vector<double> out;
    const auto steps = static_cast<long>(std::floor((factor_max - factor_min) / factor_step + 1e-9));
    for (long i = 0; i <= steps; ++i) {
        // Rounded to the step's decimal grid so 0.5 + 20*0.05 prints as 1.5.
        out.push_back(std::round((factor_min + static_cast<double>(i) * factor_step) * 1e9) / 1e9);
    }
    return out;
}

void HypothesisTestConfig::validate() const {
    if (agg != Aggregation::avg && agg != Aggregation::pct)
        throw InvalidArgument("hypothesis tests support AVG (t-test) and PCT (z-test)");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (!(factor_step > 0.0) || !(factor_max >= factor_min) || !(factor_min >= 0.0))
        throw InvalidArgument("factor grid must satisfy 0 <= min <= max and step > 0");
    if (ops.empty()) throw InvalidArgument("no comparison operators");
    if (!(test_alpha > 0.0 && test_alpha < 1.0)) throw InvalidArgument("test alpha must lie in (0, 1)");
    if (parallelism < 1) throw InvalidArgument("parallelism must be >= 1");
    if (algorithm.kind == AlgorithmKind::brute_force)
        throw InvalidArgument("brute force is the reference, not an estimator");
}

namespace {

struct TrialSelection {
    bool degenerate = false;
    std::vector<double> values;  // attribute values of the selected objects
};

std::optional<TestDecision> decide(Aggregation agg, std::span<const double> values, double p_hat,
                                   std::size_t n, const Hypothesis& h) {
    try {
        return agg == Aggregation::avg ? t_test_one_sample(values, h) : z_test_proportion(p_hat, n, h);
    } catch (const DegenerateQuery&) {
        return std::nullopt;
    }
}

}  // namespace

HypothesisTestReport run_hypothesis_tests(const HypothesisTestConfig& cfg) {
    cfg.validate();
    const Population pop = materialize(cfg.source);
    const Dataset& ds = pop.dataset;
    cfg.sprint.validate(ds.size());
    const auto targets = cfg.queries.resolve(ds.size(), cfg.seed);
    const auto factors = cfg.factors();
    const Aggregation aggs[] = {cfg.agg};

    HypothesisTestReport report;
    report.queries = targets.size();

    std::vector<GroundTruth> truths(targets.size());
    std::vector<std::vector<TrialSelection>> trials(targets.size(),
                                                    std::vector<TrialSelection>(cfg.trials));
    parallel_for(targets.size(), cfg.parallelism, [&](std::size_t qi) {
        truths[qi] = ground_truth(pop, {targets[qi], cfg.radius, cfg.metric, cfg.agg}, aggs);
    });
    parallel_for(targets.size() * cfg.trials, cfg.parallelism, [&](std::size_t unit) {
        const std::size_t qi = unit / cfg.trials;
        const std::size_t k = unit % cfg.trials;
        SprintConfig sc = cfg.sprint;
        sc.seed = trial_seed(cfg.seed, qi, k);
        const QuerySpec q{targets[qi], cfg.radius, cfg.metric, cfg.agg};
        TrialSelection& out = trials[qi][k];
        try {
            CallLedger ledger;
            std::vector<ObjectId> sample;
            const auto problem = prepare_selection(q, sc, ds, pop.oracle, pop.proxy, ledger, &sample);
            const auto sel = run_algorithm(cfg.algorithm, cfg.agg, &problem, sc, on_sample(truths[qi], sample),
                                           truths[qi], ds.size(), ledger.counts());
            out.values = values_of(ds, sel.neighbors.members);
        } catch (const DegenerateQuery&) {
            out.degenerate = true;
        }
    });
    for (const auto& per_query : trials)
        for (const auto& t : per_query) report.degenerate_trials += t.degenerate ? 1 : 0;

    double total = 0.0;
    std::size_t total_cells = 0;
    for (const double factor : factors) {
        double by_factor = 0.0;
        std::size_t by_factor_n = 0;
        for (const Comparison op : cfg.ops) {
            FactorAccuracy cell;
            cell.factor = factor;
            cell.op = op;
            double acc_sum = 0.0;
            std::size_t acc_queries = 0;
            for (std::size_t qi = 0; qi < targets.size(); ++qi) {
                const GroundTruth& gt = truths[qi];
                const auto& truth = gt.truth.at(cfg.agg);
                if (!truth) {
                    cell.skipped += cfg.trials;
                    continue;
                }
                const Hypothesis h{cfg.agg, op, factor * *truth, cfg.test_alpha};
                const auto on_d_values = values_of(ds, gt.on_d.members);
                const auto truth_decision =
                    decide(cfg.agg, on_d_values, gt.density(ds.size()), ds.size(), h);
                if (!truth_decision) {
                    cell.skipped += cfg.trials;
                    continue;
                }
                std::vector<bool> est, ref;
                for (const auto& t : trials[qi]) {
                    if (t.degenerate) {
                        ++cell.skipped;
                        continue;
                    }
                    const double p_hat = static_cast<double>(t.values.size()) /
                                         static_cast<double>(cfg.sprint.sample_size);
                    const auto d = decide(cfg.agg, t.values, p_hat, cfg.sprint.sample_size, h);
                    if (!d) {
                        ++cell.skipped;
                        continue;
                    }
                    est.push_back(d->reject_null);
                    ref.push_back(truth_decision->reject_null);
                }
                if (est.empty()) continue;
                cell.decisions += est.size();
                acc_sum += ht_accuracy(est, ref);
                ++acc_queries;
            }
            if (acc_queries > 0) {
                cell.accuracy = acc_sum / static_cast<double>(acc_queries);
                by_factor += cell.accuracy;
                ++by_factor_n;
                total += cell.accuracy;
                ++total_cells;
            }
            report.cells.push_back(cell);
        }
        if (by_factor_n > 0)
            report.accuracy_by_factor.emplace_back(factor, by_factor / static_cast<double>(by_factor_n));
    }
    report.mean_accuracy = total_cells > 0 ? total / static_cast<double>(total_cells) : 0.0;
    return report;
}

}  // namespace aqnn
