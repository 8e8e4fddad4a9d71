#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aqnn/error.hpp"
#include "aqnn/stats.hpp"

using namespace aqnn;

namespace {

struct TCase {
    std::vector<double> values;
    const char* op;
    double c, statistic, p_value;
};

struct ZCase {
    double p_hat;
    std::size_t n;
    const char* op;
    double c, statistic, p_value;
};

#include "../data/stat_reference_cases.inc"

Hypothesis avg(Comparison op, double c, double alpha = 0.05) { return {Aggregation::avg, op, c, alpha}; }
Hypothesis pct(Comparison op, double c, double alpha = 0.05) { return {Aggregation::pct, op, c, alpha}; }

// Thirty values with mean 78 and n-1 standard deviation 10.
std::vector<double> heart_rates() {
    const double a = 10.0 * std::sqrt(29.0 / 30.0);
    std::vector<double> v;
    for (int i = 0; i < 15; ++i) {
        v.push_back(78 - a);
        v.push_back(78 + a);
    }
    return v;
}

}  // namespace

TEST(Comparison, ParseAndPrint) {
    EXPECT_EQ(parse_comparison(">="), Comparison::ge);
    EXPECT_EQ(parse_comparison("le"), Comparison::le);
    EXPECT_EQ(parse_comparison("!="), Comparison::ne);
    EXPECT_EQ(parse_comparison(to_string(Comparison::ge)), Comparison::ge);
    EXPECT_THROW(parse_comparison("=="), InvalidArgument);
}

TEST(TTest, ReferenceCases) {
    for (const auto& c : kTCases) {
        const auto d = t_test_one_sample(c.values, avg(parse_comparison(c.op), c.c));
        EXPECT_NEAR(d.statistic, c.statistic, 1e-8);
        EXPECT_NEAR(d.p_value, c.p_value, 1e-8);
        EXPECT_EQ(d.reject_null, c.p_value < 0.05);
    }
}

TEST(ZTest, ReferenceCases) {
    for (const auto& c : kZCases) {
        const auto d = z_test_proportion(c.p_hat, c.n, pct(parse_comparison(c.op), c.c));
        EXPECT_NEAR(d.statistic, c.statistic, 1e-8);
        EXPECT_NEAR(d.p_value, c.p_value, 1e-8);
    }
}

TEST(TTest, MeanAtNullValue) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto d = t_test_one_sample(v, avg(Comparison::ne, 3.0));
    EXPECT_EQ(d.statistic, 0.0);
    EXPECT_NEAR(d.p_value, 1.0, 1e-15);
    EXPECT_FALSE(d.reject_null);
}

// Reference p-value from scipy.stats.t.cdf(-12.0499, 29).
TEST(TTest, HeartRateExample) {
    const auto d = t_test_one_sample(heart_rates(), avg(Comparison::ge, 100.0));
    EXPECT_NEAR(d.statistic, -12.049896265113654, 1e-9);
    EXPECT_NEAR(d.p_value, 4.095661659626027e-13, 1e-20);
    EXPECT_TRUE(d.reject_null);
}

TEST(TTest, Preconditions) {
    const std::vector<double> one{3}, flat{2, 2, 2};
    EXPECT_THROW(t_test_one_sample(one, avg(Comparison::ne, 0)), DegenerateQuery);
    EXPECT_THROW(t_test_one_sample(flat, avg(Comparison::ne, 0)), DegenerateQuery);
}

TEST(ZTest, NullValue) {
    const auto d = z_test_proportion(0.3, 200, pct(Comparison::ne, 0.3));
    EXPECT_EQ(d.statistic, 0.0);
    EXPECT_FALSE(d.reject_null);
}

// Reference p-value from scipy.stats.norm.sf(2.0412).
TEST(ZTest, ProportionExample) {
    const auto d = z_test_proportion(0.5, 100, pct(Comparison::le, 0.4));
    EXPECT_NEAR(d.statistic, 2.0412414523193148, 1e-12);
    EXPECT_NEAR(d.p_value, 0.02061341666858185, 1e-12);
    EXPECT_TRUE(d.reject_null);
}

TEST(ZTest, Preconditions) {
    EXPECT_THROW(z_test_proportion(0.1, 100, pct(Comparison::ne, 0.0)), DegenerateQuery);
    EXPECT_THROW(z_test_proportion(0.1, 100, pct(Comparison::ne, 1.0)), DegenerateQuery);
    EXPECT_THROW(z_test_proportion(0.1, 100, pct(Comparison::ne, 0.04)), DegenerateQuery);
    EXPECT_THROW(z_test_proportion(1.5, 100, pct(Comparison::ne, 0.5)), InvalidArgument);
}

TEST(Tails, TwoSidedIsTwiceTheSmallerTail) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> v(12);
        for (auto& x : v) x = n01(rng);
        const double c = 0.5 * n01(rng);
        const double ge = t_test_one_sample(v, avg(Comparison::ge, c)).p_value;
        const double le = t_test_one_sample(v, avg(Comparison::le, c)).p_value;
        const double ne = t_test_one_sample(v, avg(Comparison::ne, c)).p_value;
        EXPECT_NEAR(ge + le, 1.0, 1e-12);
        EXPECT_NEAR(ne, 2 * std::min(ge, le), 1e-12);
    }
}

TEST(TTest, DecisionsInvariantUnderAffineRescaling) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> v(20), w(20);
        for (auto& x : v) x = 50 + 10 * n01(rng);
        const double c = 50 + 5 * n01(rng);
        const double k = 3.7, b = -12.0;
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = k * v[i] + b;
        for (Comparison op : {Comparison::ge, Comparison::le, Comparison::ne}) {
            const auto d1 = t_test_one_sample(v, avg(op, c));
            const auto d2 = t_test_one_sample(w, avg(op, k * c + b));
            EXPECT_EQ(d1.reject_null, d2.reject_null);
            EXPECT_NEAR(d1.statistic, d2.statistic, 1e-9);
        }
    }
}

TEST(Kernels, DistributionFunctions) {
    EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
    EXPECT_NEAR(normal_cdf(-1.959963984540054), 0.025, 1e-12);
    EXPECT_NEAR(student_t_cdf(0.0, 5), 0.5, 1e-16);
    // dof = 1 is Cauchy: cdf(1) = 3/4.
    EXPECT_NEAR(student_t_cdf(1.0, 1), 0.75, 1e-14);
}

TEST(Accuracy, Counting) {
    std::vector<bool> a(30, true), b(30, true);
    EXPECT_EQ(ht_accuracy(a, b), 1.0);
    std::vector<bool> c(30, false);
    EXPECT_EQ(ht_accuracy(a, c), 0.0);
    b[0] = b[10] = b[20] = false;
    EXPECT_DOUBLE_EQ(ht_accuracy(a, b), 0.9);
    EXPECT_EQ(ht_accuracy(a, b), ht_accuracy(b, a));
    EXPECT_THROW(ht_accuracy({}, {}), InvalidArgument);
    EXPECT_THROW(ht_accuracy({true}, {true, false}), InvalidArgument);
}
