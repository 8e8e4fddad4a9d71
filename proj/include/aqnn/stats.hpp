#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "aqnn/types.hpp"

namespace aqnn {

/// Null-hypothesis relation "agg op c". The alternative is the strict opposite:
/// ge -> mean < c (left tail), le -> mean > c (right tail), ne -> two-sided.
enum class Comparison { ge, le, ne };

std::string_view to_string(Comparison op) noexcept;
Comparison parse_comparison(std::string_view s);

struct Hypothesis {
    Aggregation agg = Aggregation::avg;
    Comparison op = Comparison::ne;
    double c = 0.0;
    double alpha = 0.05;
};

struct TestDecision {
    bool reject_null = false;
    double statistic = 0.0;
    double p_value = 1.0;
};

double student_t_cdf(double t, double dof);
double normal_cdf(double z);

/// p-value for `statistic` under the tail selected by `op`, given the null CDF at it.
double tail_p_value(Comparison op, double cdf_at_statistic, double sf_at_statistic);

/// One-sample t-test with the n-1 sample standard deviation. Requires >= 2 values and sd > 0.
TestDecision t_test_one_sample(std::span<const double> values, const Hypothesis& h);

/// One-sample proportion z-test. Requires 0 < c < 1, n*c >= 5 and n*(1-c) >= 5.
TestDecision z_test_proportion(double p_hat, std::size_t n, const Hypothesis& h);

/// Fraction of positions where the two decision lists agree.
/// Throws InvalidArgument for empty or unequal-length lists.
double ht_accuracy(const std::vector<bool>& decisions_est, const std::vector<bool>& decisions_true);

}  // namespace aqnn
