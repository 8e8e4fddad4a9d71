#include "aqnn/aggregate.hpp"

#include <cmath>
#include <numeric>

#include "aqnn/error.hpp"

namespace aqnn {

namespace {

double mean(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

double aggregate(Aggregation agg, std::span<const double> values, AggregationContext ctx) {
    if (ctx.sample_size == 0 || ctx.population_size == 0)
        throw InvalidArgument("aggregation context needs positive sizes");
    if (ctx.sample_size > ctx.population_size)
        throw InvalidArgument("sample size exceeds population size");
    const double n = static_cast<double>(values.size());
    const double s = static_cast<double>(ctx.sample_size);
    const double big_d = static_cast<double>(ctx.population_size);
    const bool truth = ctx.scope == AggregationScope::population_truth;

    switch (agg) {
        case Aggregation::avg:
            if (values.empty()) throw DegenerateQuery("empty neighborhood");
            return mean(values);
        case Aggregation::var: {
            if (values.empty()) throw DegenerateQuery("empty neighborhood");
            const double m = mean(values);
            double acc = 0.0;
            for (const double v : values) acc += (v - m) * (v - m);
            return acc / n;
        }
        case Aggregation::count:
            return truth ? n : big_d * n / s;
        case Aggregation::pct:
            return truth ? n / big_d : n / s;
        case Aggregation::sum: {
            const double total = std::accumulate(values.begin(), values.end(), 0.0);
            return truth ? total : (big_d / s) * total;
        }
    }
    return 0.0;
}

double relative_error(double estimate, double truth) {
    if (truth == 0.0) throw InvalidArgument("RE undefined for zero truth");
    return std::abs(estimate - truth) / std::abs(truth) * 100.0;
}

}  // namespace aqnn
