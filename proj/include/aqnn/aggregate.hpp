#pragma once

#include <cstddef>
#include <span>

#include "aqnn/types.hpp"

namespace aqnn {

enum class AggregationScope { sample_estimate, population_truth };

struct AggregationContext {
    std::size_t sample_size = 1;      // s
    std::size_t population_size = 1;  // |D|
    AggregationScope scope = AggregationScope::sample_estimate;
};

/// Mean and population variance of the bag, or a count-scaled PCT / COUNT / SUM. In sample_estimate scope the
/// count terms scale by 1/s (PCT) or |D|/s (COUNT, SUM). AVG and VAR on an empty bag throw
/// DegenerateQuery("empty neighborhood").
double aggregate(Aggregation agg, std::span<const double> values, AggregationContext ctx);

/// |estimate - truth| / |truth| * 100. Throws InvalidArgument for a zero truth.
double relative_error(double estimate, double truth);

}  // namespace aqnn
