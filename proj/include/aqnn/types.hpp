#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aqnn {

using ObjectId = std::int64_t;

enum class Aggregation { avg, var, pct, count, sum };

/// Which kind of neighbor-selection error drives the aggregate's error.
enum class Sensitivity { value, count, both };

enum class Metric { euclidean, cosine };

/// Embedding space a neighbor set was computed in.
enum class Space { oracle, proxy, mixed };

Sensitivity sensitivity_of(Aggregation agg) noexcept;

std::string_view to_string(Aggregation agg) noexcept;
std::string_view to_string(Sensitivity s) noexcept;
std::string_view to_string(Metric m) noexcept;
std::string_view to_string(Space s) noexcept;

// Parsing is case-insensitive; unknown names throw InvalidArgument.
Aggregation parse_aggregation(std::string_view name);
Metric parse_metric(std::string_view name);

}  // namespace aqnn
