#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "aqnn/aggregate.hpp"
#include "aqnn/error.hpp"

using namespace aqnn;

namespace {

constexpr AggregationContext kTruth{1, 1, AggregationScope::population_truth};

}  // namespace

TEST(Aggregate, HeartRateBags) {
    const std::vector<double> oracle{72, 84, 78};
    const std::vector<double> proxy{72, 84, 100};
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::avg, oracle, kTruth), 78.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::sum, oracle, kTruth), 234.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::sum, proxy, kTruth), 256.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::count, oracle, kTruth), 3.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::count, proxy, kTruth), 3.0);
    EXPECT_NEAR(relative_error(aggregate(Aggregation::avg, proxy, kTruth), 78.0), 9.40, 0.005);
}

TEST(Aggregate, PopulationVariance) {
    const std::vector<double> same{4, 4, 4};
    EXPECT_EQ(aggregate(Aggregation::var, same, kTruth), 0.0);
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::var, v, kTruth), 4.0);
}

TEST(Aggregate, EstimateScaling) {
    const std::vector<double> v{1, 2, 3, 4};
    const AggregationContext est{100, 1000, AggregationScope::sample_estimate};
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::pct, v, est), 0.04);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::count, v, est), 40.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::sum, v, est), 100.0);
    const AggregationContext truth{100, 1000, AggregationScope::population_truth};
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::pct, v, truth), 0.004);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::count, v, truth), 4.0);
    EXPECT_DOUBLE_EQ(aggregate(Aggregation::sum, v, truth), 10.0);
}

TEST(Aggregate, EmptyNeighborhood) {
    const std::vector<double> none;
    EXPECT_THROW(aggregate(Aggregation::avg, none, kTruth), DegenerateQuery);
    EXPECT_THROW(aggregate(Aggregation::var, none, kTruth), DegenerateQuery);
    EXPECT_EQ(aggregate(Aggregation::pct, none, kTruth), 0.0);
    EXPECT_EQ(aggregate(Aggregation::sum, none, kTruth), 0.0);
}

TEST(Aggregate, BadContext) {
    const std::vector<double> v{1};
    EXPECT_THROW(aggregate(Aggregation::pct, v, {10, 5, AggregationScope::sample_estimate}), InvalidArgument);
    EXPECT_THROW(aggregate(Aggregation::pct, v, {0, 5, AggregationScope::sample_estimate}), InvalidArgument);
}

TEST(Aggregate, RandomBagProperties) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-50.0, 150.0);
    std::uniform_int_distribution<std::size_t> len(1, 200);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<double> v(len(rng));
        for (auto& x : v) x = u(rng);
        const std::size_t s = 200 + v.size();
        const AggregationContext est{s, 10 * s, AggregationScope::sample_estimate};
        const double avg = aggregate(Aggregation::avg, v, est);
        ASSERT_GE(avg, *std::min_element(v.begin(), v.end()) - 1e-9);
        ASSERT_LE(avg, *std::max_element(v.begin(), v.end()) + 1e-9);
        ASSERT_GE(aggregate(Aggregation::var, v, est), 0.0);
        const double pct = aggregate(Aggregation::pct, v, est);
        ASSERT_GE(pct, 0.0);
        ASSERT_LE(pct, 1.0);
        const double count = aggregate(Aggregation::count, v, est);
        ASSERT_LE(count, static_cast<double>(est.population_size));
        const double sum = aggregate(Aggregation::sum, v, est);
        ASSERT_NEAR(sum, static_cast<double>(est.population_size) * pct * avg, 1e-9 * std::max(1.0, std::abs(sum)));
    }
}

TEST(RelativeError, Values) {
    EXPECT_EQ(relative_error(78, 78), 0.0);
    EXPECT_EQ(relative_error(0, 5), 100.0);
    EXPECT_NEAR(relative_error(256.0 / 3.0, 78), 9.4017, 1e-4);
    EXPECT_DOUBLE_EQ(relative_error(-6, -4), 50.0);
    EXPECT_THROW(relative_error(1, 0), InvalidArgument);
}

TEST(RelativeError, ScaleInvariant) {
    for (double k : {-3.0, 0.5, 7.0, 1e6}) {
        EXPECT_NEAR(relative_error(k * 85.0, k * 78.0), relative_error(85.0, 78.0), 1e-9);
    }
}
