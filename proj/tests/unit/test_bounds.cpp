#include <gtest/gtest.h>

#include <cmath>

#include "aqnn/bounds.hpp"
#include "aqnn/error.hpp"

using namespace aqnn;

namespace {

BoundsInput heart_rate() {
    BoundsInput in;
    in.alpha = 0.05;
    in.rho = 0.8;
    in.a = 50;
    in.b = 120;
    in.omega_s = 5;
    return in;
}

BoundsInput pct_example() {
    BoundsInput in;
    in.alpha = 0.05;
    in.omega_s = 0.05;
    in.rho = 1.0;
    in.omega_nn = 0.1;
    in.omega_c = 0.0001;
    return in;
}

BoundsInput sum_example() {
    BoundsInput in;
    in.alpha = 0.05;
    in.population_size = 1000;
    in.avg_s_abs = 3;
    in.a = 1;
    in.b = 5;
    in.on_d_size = 100;
    in.omega_s = 1.0;
    in.omega_nn = 0.1;
    in.rho = 0.1;
    return in;
}

}  // namespace

TEST(CeilSize, Convention) {
    EXPECT_EQ(ceil_size(452.0), 452u);
    EXPECT_EQ(ceil_size(451.001), 452u);
    EXPECT_EQ(ceil_size(451.0000001), 451u);
    EXPECT_EQ(ceil_size(452.0 + 1e-12), 452u);
    EXPECT_EQ(ceil_size(0.0), 1u);
    EXPECT_THROW(ceil_size(std::nan("")), InvalidArgument);
}

TEST(ValueBounds, AvgWorkedExample) {
    const auto out = min_sizes_value(Aggregation::avg, heart_rate());
    EXPECT_EQ(out.s_min, 452u);
    EXPECT_EQ(out.s_p_min, static_cast<std::uint64_t>(std::ceil(32 * std::log(40.0))));
}

TEST(ValueBounds, HalvingLambdaQuadruplesPilot) {
    auto in = heart_rate();
    in.lambda = 1.0;
    const double a = min_sizes_value(Aggregation::avg, in).s_p_raw;
    in.lambda = 0.5;
    EXPECT_NEAR(min_sizes_value(Aggregation::avg, in).s_p_raw, 4 * a, 1e-9 * a);
}

// 70^4 * ln(40) / (2 * 0.8) / 25 = 2,214,249.89..., checked in long double.
TEST(ValueBounds, VarWorkedExample) {
    const long double raw = std::pow(70.0L, 4) * std::log(40.0L) / 1.6L / 25.0L;
    EXPECT_NEAR(static_cast<double>(raw), 2214249.89, 0.01);
    const auto out = min_sizes_value(Aggregation::var, heart_rate());
    EXPECT_EQ(out.s_min, static_cast<std::uint64_t>(std::ceil(raw)));
    EXPECT_EQ(out.s_min, 2214250u);
}

TEST(ValueBounds, ImpliedSelectionTolerance) {
    auto in = heart_rate();
    in.on_s_size = 100;
    in.lambda = 0.5;
    EXPECT_DOUBLE_EQ(*min_sizes_value(Aggregation::avg, in).omega_nn_implied, 2 * 70.0 / 100 * 0.5);
    EXPECT_DOUBLE_EQ(*min_sizes_value(Aggregation::var, in).omega_nn_implied,
                     3 * 4900.0 / 100 * 0.5 + 4900.0 / 100 * 0.25);
    // AVG linear in lambda; VAR strictly increasing.
    in.lambda = 1.0;
    EXPECT_DOUBLE_EQ(*min_sizes_value(Aggregation::avg, in).omega_nn_implied, 2 * 70.0 / 100);
    double prev = 0;
    for (double l = 0.1; l < 3; l += 0.1) {
        in.lambda = l;
        const double v = *min_sizes_value(Aggregation::var, in).omega_nn_implied;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(ValueBounds, DerivedBoundsWarn) {
    auto in = heart_rate();
    EXPECT_TRUE(min_sizes_value(Aggregation::avg, in).warnings.empty());
    in.bounds_data_derived = true;
    EXPECT_EQ(min_sizes_value(Aggregation::avg, in).warnings.size(), 1u);
}

TEST(ValueBounds, RejectsBadInputs) {
    auto in = heart_rate();
    in.rho = 0.0;
    EXPECT_THROW(min_sizes_value(Aggregation::avg, in), InvalidArgument);
    in = heart_rate();
    in.b = in.a;
    EXPECT_THROW(min_sizes_value(Aggregation::avg, in), InvalidArgument);
    EXPECT_THROW(min_sizes_value(Aggregation::pct, heart_rate()), InvalidArgument);
}

TEST(CountBounds, PctWorkedExample) {
    const auto out = min_sizes_count(Aggregation::pct, pct_example());
    EXPECT_EQ(out.s_min, 738u);
    EXPECT_GE(out.s_p_min, 739u);
    EXPECT_LE(out.s_p_min, 740u);
}

TEST(CountBounds, CountScalesByPopulationSquared) {
    auto in = pct_example();
    in.population_size = 1;
    EXPECT_EQ(min_sizes_count(Aggregation::count, in).s_min, 738u);
    in.population_size = 1000;
    const double pct = min_sizes_count(Aggregation::pct, in).s_raw;
    EXPECT_NEAR(min_sizes_count(Aggregation::count, in).s_raw, pct * 1e6, 1e-6 * pct * 1e6);
}

TEST(CountBounds, DenominatorMustBePositive) {
    auto in = pct_example();
    in.omega_c = 0.2;
    try {
        min_sizes_count(Aggregation::pct, in);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_STREQ(e.what(), "omega_nn must exceed rho*omega_c");
    }
}

TEST(SumBounds, CrossoverAtBalancedNeighborhood) {
    // s_count = s_avg when |ON_D| = |D| |AVG_S| / (b - a) = 750; omega_s cancels.
    auto in = sum_example();
    in.on_d_size = 750;
    const auto t = sum_bound_terms(in);
    EXPECT_NEAR(t.s_count, t.s_avg, 1e-12 * t.s_count);
    EXPECT_NEAR(t.s_count, 2e6 * 9 * std::log(80.0), 1e-12 * t.s_count);
    EXPECT_NEAR(t.s_count, 78876479.42, 0.01);
    in.on_d_size = 749;
    EXPECT_GT(sum_bound_terms(in).s_count, sum_bound_terms(in).s_avg);
    in.on_d_size = 751;
    EXPECT_LT(sum_bound_terms(in).s_count, sum_bound_terms(in).s_avg);
}

TEST(SumBounds, DoublingToleranceQuarters) {
    auto in = sum_example();
    const auto a = sum_bound_terms(in);
    in.omega_s *= 2;
    const auto b = sum_bound_terms(in);
    EXPECT_NEAR(b.s_count, a.s_count / 4, 1e-9 * a.s_count);
    EXPECT_NEAR(b.s_avg, a.s_avg / 4, 1e-9 * a.s_avg);
}

TEST(SumBounds, NarrowRangeLeavesCountTerm) {
    auto in = sum_example();
    in.b = in.a + 1e-9;
    const auto t = sum_bound_terms(in);
    EXPECT_LT(t.s_avg, 1e-6);
    EXPECT_EQ(min_sizes_sum(in).s_min, ceil_size(t.s_count));
}

TEST(SumBounds, SelectionToleranceAndWarning) {
    auto in = sum_example();
    in.sample_size = 5000;
    const auto t = sum_bound_terms(in);
    EXPECT_DOUBLE_EQ(t.omega_nn_sum, 0.1 * 5000 / (2 * 1000 * 3.0));
    EXPECT_NEAR(t.s_p_count, 2 * std::log(40.0) / 0.01 / std::pow(t.omega_nn_sum, 2), 1e-6);
    EXPECT_TRUE(min_sizes_sum(in).warnings.empty());
    in.sample_size.reset();
    EXPECT_EQ(min_sizes_sum(in).warnings.size(), 1u);
}

TEST(Reconcile, Rule) {
    BoundsOutput o;
    o.s_min = 738;
    o.s_p_min = 739;
    auto r = reconcile_sizes(o);
    EXPECT_EQ(r.s_min, 739u);
    EXPECT_EQ(r.s_p_min, 739u);
    EXPECT_TRUE(r.reconciled);

    o.s_min = 452;
    o.s_p_min = 111;
    r = reconcile_sizes(o);
    EXPECT_EQ(r.s_min, 452u);
    EXPECT_FALSE(r.reconciled);

    o.s_min = o.s_p_min = 10;
    EXPECT_FALSE(reconcile_sizes(o).reconciled);
}

TEST(Bounds, MonotoneInTolerances) {
    for (Aggregation agg : {Aggregation::avg, Aggregation::var, Aggregation::pct, Aggregation::count, Aggregation::sum}) {
        BoundsInput in = sum_example();
        in.omega_s = 0.5;
        in.omega_nn = 0.5;
        in.sample_size = 100000;
        BoundsOutput prev = min_sizes(agg, in);
        for (int step = 0; step < 6; ++step) {
            in.omega_s *= 0.8;
            in.lambda *= 0.8;
            in.omega_nn *= 0.8;
            const auto cur = min_sizes(agg, in);
            EXPECT_GE(cur.s_min, prev.s_min) << to_string(agg);
            EXPECT_GE(cur.s_p_min, prev.s_p_min) << to_string(agg);
            prev = cur;
        }
    }
}
