#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqnn/bounds.hpp"
#include "aqnn/dataset.hpp"
#include "aqnn/frnn.hpp"
#include "aqnn/models.hpp"
#include "aqnn/sprint.hpp"
#include "aqnn/stats.hpp"
#include "aqnn/types.hpp"

namespace aqnn {

/// Where the population comes from: a JSONL file or the synthetic generator.
struct DatasetSource {
    std::optional<std::filesystem::path> path;
    SyntheticGenConfig synthetic;
    /// Forces a simulated proxy with this noise level over the features.
    std::optional<double> proxy_noise;
    double oracle_cost = 2.0;
    double proxy_cost = 1.0;
};

/// A dataset together with the oracle and proxy models that embed it.
struct Population {
    Dataset dataset;
    EmbeddingModel oracle;
    EmbeddingModel proxy;
};

/// Loads or generates the dataset and picks stored or simulated models.
/// Synthetic populations are generated without stored embeddings; the simulated models
/// reproduce what the generator would have stored.
Population materialize(const DatasetSource& source);

enum class AlgorithmKind { sprint, sprint_v, sprint_c, two_phase, pqe_pt_fixed, top_k, brute_force };

struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::sprint;
    double target = 0.95;  // pqe_pt_fixed only

    /// "sprint", "sprint_v", "sprint_c", "two_phase", "pqe_pt", "pqe_pt:0.9", "top_k", "brute_force".
    static AlgorithmSpec parse(std::string_view text);
    std::string label() const;
    friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

/// Explicit ids, or `random_count` targets drawn uniformly from D.
struct QueryTargets {
    std::vector<ObjectId> ids;
    std::size_t random_count = 0;

    /// "random:10" or a comma-separated id list.
    static QueryTargets parse(std::string_view text);
    std::vector<ObjectId> resolve(std::size_t population, std::uint64_t seed) const;
};

enum class SweepAxis { dataset_size, sample_size, pilot_size, radius };

struct SweepSpec {
    SweepAxis axis = SweepAxis::sample_size;
    std::vector<double> grid;  // strictly increasing
};

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(AlgorithmKind kind) noexcept;

struct ExperimentConfig {
    DatasetSource source;
    QueryTargets queries{{}, 10};
    double radius = 1.0;
    Metric metric = Metric::euclidean;
    std::vector<Aggregation> aggs{Aggregation::avg};
    std::vector<AlgorithmSpec> algorithms{AlgorithmSpec{}};
    SprintConfig sprint;
    std::size_t trials = 30;
    std::uint64_t seed = 0;
    double cost_ratio = 2.0;
    std::optional<SweepSpec> sweep;
    std::size_t parallelism = 1;
    bool record_timings = false;

    void validate() const;
};

/// Exact oracle neighborhood of one query over all of D and its exact aggregates.
struct GroundTruth {
    ObjectId query = 0;
    NeighborSet on_d;
    std::vector<char> in_neighborhood;  // indexed by object id
    std::map<Aggregation, std::optional<double>> truth;  // empty when undefined
    CallCounts calls;

    double density(std::size_t population) const;
    bool contains(ObjectId id) const { return in_neighborhood[static_cast<std::size_t>(id)] != 0; }
};

/// Embeds all of D with the oracle (charged to a dedicated ledger), runs exact FRNN and
/// aggregates. Aggregates that are undefined (empty neighborhood for AVG/VAR) are left empty.
GroundTruth ground_truth(const Population& pop, const QuerySpec& query,
                         std::span<const Aggregation> aggs);

struct CellResult {
    std::string algorithm;
    Aggregation agg = Aggregation::avg;
    std::size_t query_index = 0;
    ObjectId query = 0;
    std::size_t trial = 0;
    bool degenerate = false;
    std::string note;
    double estimate = 0.0;
    double truth = 0.0;
    double re_percent = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double pr_gap = 0.0;
    std::optional<double> t_star;
    std::size_t selected = 0;
    std::size_t on_s = 0;
    CallCounts calls;
    double selection_seconds = 0.0;
};

struct SummaryRow {
    std::string algorithm;
    Aggregation agg = Aggregation::avg;
    std::size_t cells = 0;
    std::size_t degenerate = 0;
    double re_mean = 0.0, re_sd = 0.0;
    double f1_mean = 0.0, f1_sd = 0.0;
    double pr_gap_mean = 0.0, pr_gap_sd = 0.0;
    double oracle_calls_mean = 0.0, proxy_calls_mean = 0.0;
    double speedup = 0.0;
    double selection_seconds_mean = 0.0;
};

struct QueryTruthRow {
    ObjectId query = 0;
    std::size_t neighbors = 0;
    double density = 0.0;
    std::map<Aggregation, std::optional<double>> truth;
};

struct MetricsReport {
    std::size_t population = 0;
    std::uint64_t brute_force_oracle_calls = 0;
    std::vector<QueryTruthRow> queries;
    std::vector<CellResult> cells;  // ordered by (query, trial, algorithm, agg)
    std::vector<SummaryRow> summary;
    bool timings_recorded = false;

    const SummaryRow* find(std::string_view algorithm, Aggregation agg) const;
};

struct SweepPoint {
    double value = 0.0;
    MetricsReport report;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::optional<SweepAxis> sweep_axis;
    std::vector<SweepPoint> points;  // one point with value 0 when no sweep is configured
};

/// Runs every (algorithm x aggregate) over every (query x trial) unit. Each unit owns its
/// ledger and RNG stream; results are keyed by unit index so serial and parallel runs agree.
MetricsReport run_metrics(const ExperimentConfig& cfg, const Population& pop);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class BoundSource { value_bound, count_bound };

struct CoverageConfig {
    DatasetSource source;
    ObjectId query = 0;
    double radius = 1.0;
    Metric metric = Metric::euclidean;
    Aggregation agg = Aggregation::pct;
    BoundsInput tolerances;
    SprintConfig search;  // sizes are overwritten from the bounds unless overridden below
    std::optional<std::size_t> sample_size_override;
    std::optional<std::size_t> pilot_size_override;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
};

struct CoverageResult {
    double coverage = 0.0;
    std::size_t trials = 0;
    std::size_t covered = 0;
    std::size_t degenerate = 0;
    std::size_t sample_size = 0;
    std::size_t pilot_size = 0;
    double tolerance = 0.0;  // omega_s + omega_nn
};

/// Fraction of trials whose estimate lands within omega_s + omega_nn of the truth.
/// Degenerate trials count as not covered.
CoverageResult coverage_check(const CoverageConfig& cfg, BoundSource source);

struct HypothesisTestConfig {
    DatasetSource source;
    QueryTargets queries{{}, 10};
    double radius = 1.0;
    Metric metric = Metric::euclidean;
    Aggregation agg = Aggregation::avg;  // AVG (t-test) or PCT (z-test)
    AlgorithmSpec algorithm;
    SprintConfig sprint;
    std::size_t trials = 30;
    double factor_min = 0.5;
    double factor_max = 1.5;
    double factor_step = 0.05;
    std::vector<Comparison> ops{Comparison::ge, Comparison::le};
    double test_alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t parallelism = 1;

    std::vector<double> factors() const;
    void validate() const;
};

struct FactorAccuracy {
    double factor = 0.0;
    Comparison op = Comparison::ge;
    double accuracy = 0.0;  // mean over queries
    std::size_t decisions = 0;
    std::size_t skipped = 0;
};

struct HypothesisTestReport {
    std::vector<FactorAccuracy> cells;
    std::vector<std::pair<double, double>> accuracy_by_factor;  // averaged over ops
    double mean_accuracy = 0.0;
    std::size_t degenerate_trials = 0;
    std::size_t queries = 0;
};

HypothesisTestReport run_hypothesis_tests(const HypothesisTestConfig& cfg);

}  // namespace aqnn
