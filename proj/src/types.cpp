#include "aqnn/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "aqnn/error.hpp"

namespace aqnn {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Sensitivity sensitivity_of(Aggregation agg) noexcept {
    switch (agg) {
        case Aggregation::avg:
        case Aggregation::var:
            return Sensitivity::value;
        case Aggregation::pct:
        case Aggregation::count:
            return Sensitivity::count;
        case Aggregation::sum:
            return Sensitivity::both;
    }
    return Sensitivity::both;
}

std::string_view to_string(Aggregation agg) noexcept {
    switch (agg) {
        case Aggregation::avg: return "AVG";
        case Aggregation::var: return "VAR";
        case Aggregation::pct: return "PCT";
        case Aggregation::count: return "COUNT";
        case Aggregation::sum: return "SUM";
    }
    return "?";
}

std::string_view to_string(Sensitivity s) noexcept {
    switch (s) {
        case Sensitivity::value: return "value";
        case Sensitivity::count: return "count";
        case Sensitivity::both: return "both";
    }
    return "?";
}

std::string_view to_string(Metric m) noexcept {
    return m == Metric::euclidean ? "euclidean" : "cosine";
}

std::string_view to_string(Space s) noexcept {
    switch (s) {
        case Space::oracle: return "oracle";
        case Space::proxy: return "proxy";
        case Space::mixed: return "mixed";
    }
    return "?";
}

Aggregation parse_aggregation(std::string_view name) {
    const auto n = lower(name);
    if (n == "avg") return Aggregation::avg;
    if (n == "var") return Aggregation::var;
    if (n == "pct") return Aggregation::pct;
    if (n == "count") return Aggregation::count;
    if (n == "sum") return Aggregation::sum;
    throw InvalidArgument("unknown aggregation '" + std::string(name) + "'");
}

Metric parse_metric(std::string_view name) {
    const auto n = lower(name);
    if (n == "euclidean" || n == "l2") return Metric::euclidean;
    if (n == "cosine") return Metric::cosine;
    throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

}  // namespace aqnn
