#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "aqnn/aggregate.hpp"
#include "aqnn/error.hpp"
#include "aqnn/harness.hpp"
#include "aqnn/report.hpp"
#include "test_util.hpp"

using namespace aqnn;

namespace {

ExperimentConfig small_config(double noise) {
    ExperimentConfig cfg;
    cfg.source = fixtures::synthetic_source(2000, noise);
    cfg.queries = QueryTargets::parse("random:4");
    cfg.radius = 6.0;
    cfg.aggs = {Aggregation::avg, Aggregation::pct};
    cfg.algorithms = {AlgorithmSpec::parse("sprint"), AlgorithmSpec::parse("brute_force")};
    cfg.sprint.sample_size = 600;
    cfg.sprint.pilot_size = 300;
    cfg.trials = 3;
    cfg.seed = 17;
    return cfg;
}

}  // namespace

TEST(ExperimentConfig, AlgorithmSpecRoundTrip) {
    for (const char* text : {"sprint", "sprint_v", "sprint_c", "two_phase", "top_k", "brute_force"}) {
        EXPECT_EQ(AlgorithmSpec::parse(text).label(), text);
    }
    const auto spec = AlgorithmSpec::parse("pqe_pt:0.9");
    EXPECT_EQ(spec.kind, AlgorithmKind::pqe_pt_fixed);
    EXPECT_DOUBLE_EQ(spec.target, 0.9);
    EXPECT_EQ(AlgorithmSpec::parse(spec.label()), spec);
    EXPECT_THROW(AlgorithmSpec::parse("magic"), InvalidArgument);
    EXPECT_THROW(AlgorithmSpec::parse("pqe_pt:2"), InvalidArgument);
}

TEST(ExperimentConfig, QueryTargets) {
    const auto random = QueryTargets::parse("random:10");
    EXPECT_EQ(random.random_count, 10u);
    const auto ids = random.resolve(1000, 3);
    EXPECT_EQ(ids.size(), 10u);
    EXPECT_EQ(ids, random.resolve(1000, 3));
    EXPECT_EQ(QueryTargets::parse("4,8,15").resolve(1000, 0), (std::vector<ObjectId>{4, 8, 15}));
    EXPECT_THROW(QueryTargets::parse("4,x"), InvalidArgument);
}

TEST(ExperimentConfig, Validation) {
    auto cfg = small_config(0.0);
    EXPECT_NO_THROW(cfg.validate());
    cfg.trials = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = small_config(0.0);
    cfg.sweep = SweepSpec{SweepAxis::sample_size, {800, 700}};
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    EXPECT_EQ(parse_sweep_axis(to_string(SweepAxis::radius)), SweepAxis::radius);
}

TEST(GroundTruth, PatientLayout) {
    auto ds = fixtures::patient_layout();
    const Population pop{ds, EmbeddingModel::stored_oracle(), EmbeddingModel::stored_proxy()};
    const Aggregation aggs[] = {Aggregation::avg, Aggregation::count};
    const auto gt = ground_truth(pop, {ObjectId{0}, 1.0}, aggs);
    EXPECT_EQ(gt.on_d.size(), 6u);
    EXPECT_EQ(gt.calls.oracle_calls, ds.size());
    EXPECT_EQ(gt.calls.proxy_calls, 0u);
    EXPECT_DOUBLE_EQ(*gt.truth.at(Aggregation::count), 6.0);
    EXPECT_DOUBLE_EQ(*gt.truth.at(Aggregation::avg), (75 + 78 + 72 + 84 + 90 + 66) / 6.0);
}

TEST(GroundTruth, HugeRadiusAggregatesEverything) {
    const auto pop = materialize(fixtures::synthetic_source(500, 0.0));
    const Aggregation aggs[] = {Aggregation::avg, Aggregation::var, Aggregation::sum};
    const auto gt = ground_truth(pop, {ObjectId{3}, 1e6}, aggs);
    const auto attrs = pop.dataset.attrs();
    const AggregationContext all{500, 500, AggregationScope::population_truth};
    EXPECT_EQ(gt.on_d.size(), 500u);
    EXPECT_DOUBLE_EQ(*gt.truth.at(Aggregation::avg), aggregate(Aggregation::avg, attrs, all));
    EXPECT_DOUBLE_EQ(*gt.truth.at(Aggregation::sum), std::accumulate(attrs.begin(), attrs.end(), 0.0));
    EXPECT_EQ(gt.calls.oracle_calls, 500u);
}

TEST(RunMetrics, CellCount) {
    auto cfg = small_config(0.4);
    cfg.queries = QueryTargets::parse("random:10");
    cfg.aggs = {Aggregation::avg};
    cfg.trials = 30;
    cfg.sprint.sample_size = 300;
    cfg.sprint.pilot_size = 200;
    const auto report = run_experiment(cfg);
    ASSERT_EQ(report.points.size(), 1u);
    EXPECT_EQ(report.points[0].report.cells.size(), 600u);
}

TEST(RunMetrics, BruteForceIsExactAndZeroNoiseIsPerfect) {
    const auto cfg = small_config(0.0);
    const auto pop = materialize(cfg.source);
    const auto report = run_metrics(cfg, pop);
    std::size_t checked = 0;
    for (const auto& cell : report.cells) {
        if (cell.degenerate) continue;
        ++checked;
        if (cell.algorithm == "brute_force") {
            EXPECT_EQ(cell.re_percent, 0.0);
            EXPECT_EQ(cell.calls.oracle_calls, pop.dataset.size());
        } else {
            EXPECT_EQ(cell.f1, 1.0);
            EXPECT_EQ(cell.calls, (CallCounts{301, 601}));
        }
    }
    EXPECT_GT(checked, 0u);
    ASSERT_NE(report.find("brute_force", Aggregation::avg), nullptr);
    EXPECT_EQ(report.find("brute_force", Aggregation::avg)->re_mean, 0.0);
}

TEST(RunMetrics, DeterministicAndOrderIndependent) {
    auto cfg = small_config(0.4);
    const auto serial = to_json(run_experiment(cfg)).dump();
    EXPECT_EQ(to_json(run_experiment(cfg)).dump(), serial);
    cfg.parallelism = 4;
    EXPECT_EQ(to_json(run_experiment(cfg)).dump(), serial);
}

TEST(RunMetrics, SweepKeepsOtherSeeds) {
    auto cfg = small_config(0.4);
    cfg.algorithms = {AlgorithmSpec::parse("sprint")};
    cfg.sweep = SweepSpec{SweepAxis::sample_size, {500, 600}};
    const auto swept = run_experiment(cfg);
    ASSERT_EQ(swept.points.size(), 2u);
    cfg.sweep.reset();
    const auto plain = run_experiment(cfg);
    EXPECT_EQ(to_json(swept.points[1].report).dump(), to_json(plain.points[0].report).dump());
}

TEST(RunMetrics, AllDegenerateThrows) {
    auto cfg = small_config(0.0);
    cfg.queries = QueryTargets::parse("5");
    cfg.radius = 1e-9;
    cfg.algorithms = {AlgorithmSpec::parse("sprint")};
    cfg.aggs = {Aggregation::avg};
    cfg.sprint.sample_size = 40;
    cfg.sprint.pilot_size = 20;
    cfg.trials = 2;
    EXPECT_THROW(run_experiment(cfg), DegenerateQuery);
}

TEST(Coverage, WideToleranceCoversEverything) {
    CoverageConfig cfg;
    cfg.source = fixtures::synthetic_source(2000, 0.0);
    cfg.radius = 1e6;
    cfg.agg = Aggregation::avg;
    cfg.tolerances.omega_s = 250.0;
    cfg.trials = 200;
    const auto r = coverage_check(cfg, BoundSource::value_bound);
    EXPECT_EQ(r.coverage, 1.0);
    EXPECT_EQ(r.trials, 200u);
}

TEST(Coverage, SingleObjectSampleFallsShort) {
    CoverageConfig cfg;
    cfg.source = fixtures::synthetic_source(2000, 0.0);
    cfg.radius = 1e6;
    cfg.agg = Aggregation::avg;
    cfg.tolerances.omega_s = 1.0;
    cfg.sample_size_override = 1;
    cfg.pilot_size_override = 1;
    cfg.trials = 200;
    EXPECT_LT(coverage_check(cfg, BoundSource::value_bound).coverage, 0.5);
}

TEST(Coverage, MinimumSizedPctMeetsConfidence) {
    CoverageConfig cfg;
    cfg.source = fixtures::synthetic_source(5000, 0.0);
    cfg.radius = 6.0;
    cfg.agg = Aggregation::pct;
    cfg.tolerances.alpha = 0.05;
    cfg.tolerances.omega_s = 0.05;
    cfg.tolerances.omega_nn = 0.1;
    cfg.tolerances.omega_c = 0.0001;
    cfg.tolerances.rho = 1.0;
    cfg.trials = 200;
    const auto r = coverage_check(cfg, BoundSource::count_bound);
    EXPECT_EQ(r.sample_size, 740u);
    EXPECT_GE(r.coverage, 0.95);
}

TEST(HypothesisTests, ConfigChecks) {
    HypothesisTestConfig cfg;
    EXPECT_EQ(cfg.factors().size(), 21u);
    EXPECT_DOUBLE_EQ(cfg.factors().front(), 0.5);
    EXPECT_DOUBLE_EQ(cfg.factors().back(), 1.5);
    cfg.agg = Aggregation::var;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.agg = Aggregation::avg;
    cfg.algorithm = AlgorithmSpec::parse("brute_force");
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(HypothesisTests, ExtremeFactorsAreDecidedCorrectly) {
    HypothesisTestConfig cfg;
    cfg.source = fixtures::synthetic_source(3000, 0.0);
    cfg.queries = QueryTargets::parse("random:2");
    cfg.radius = 6.0;
    cfg.agg = Aggregation::avg;
    cfg.sprint.sample_size = 1500;
    cfg.sprint.pilot_size = 600;
    cfg.trials = 5;
    cfg.factor_step = 0.5;
    cfg.seed = 2;
    const auto report = run_hypothesis_tests(cfg);
    ASSERT_EQ(report.accuracy_by_factor.size(), 3u);
    EXPECT_EQ(report.accuracy_by_factor.front().second, 1.0);
    EXPECT_EQ(report.accuracy_by_factor.back().second, 1.0);
}
