#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqnn/types.hpp"

namespace aqnn {

/// Inputs to the minimum sample-size calculators. Only the fields a calculator reads are
/// validated by it.
struct BoundsInput {
    double alpha = 0.05;
    double rho = 1.0;        // neighborhood density |ON_S| / |S|
    double a = 0.0;          // attribute lower bound
    double b = 1.0;          // attribute upper bound
    double omega_s = 0.05;   // sampling-error tolerance
    double omega_nn = 0.1;   // selection-error tolerance
    double omega_c = 0.0;    // precision/recall gap tolerance
    double lambda = 1.0;     // tolerance on |F1_S - F1_{S_p}|
    std::uint64_t population_size = 1;
    std::optional<std::uint64_t> on_s_size;  // |ON_S|; estimated as max(1, round(rho*s)) if unset
    double avg_s_abs = 1.0;                  // |AVG_S| estimate (SUM)
    std::uint64_t on_d_size = 1;             // |ON_D| estimate (SUM)
    std::optional<std::uint64_t> sample_size;  // |S| for the SUM selection tolerance
    bool bounds_data_derived = false;
};

struct BoundsOutput {
    std::uint64_t s_min = 1;
    std::uint64_t s_p_min = 1;
    std::optional<double> omega_nn_implied;
    bool reconciled = false;
    double s_raw = 0.0;
    double s_p_raw = 0.0;
    std::vector<std::string> warnings;
};

/// ceil with exact integers kept; tolerant to last-ulp noise in the raw value.
std::uint64_t ceil_size(double raw);

/// Value-sensitive sizes (AVG, VAR): s >= k1 / omega_s^2, s_p >= 32 ln(2/alpha) / lambda^2.
BoundsOutput min_sizes_value(Aggregation agg, const BoundsInput& in);

/// Count-sensitive sizes (PCT, COUNT): s >= k1 / omega_s^2,
/// s_p >= 2 ln(2/alpha) rho^-2 / (omega_nn - rho omega_c)^2.
BoundsOutput min_sizes_count(Aggregation agg, const BoundsInput& in);

struct SumBoundTerms {
    double s_count = 0.0;
    double s_avg = 0.0;
    double s_p_count = 0.0;
    double s_p_avg = 0.0;
    double omega_nn_sum = 0.0;
};

SumBoundTerms sum_bound_terms(const BoundsInput& in);

/// SUM sizes: the max of the count and mean terms for both s and s_p.
BoundsOutput min_sizes_sum(const BoundsInput& in);

/// Dispatches on the aggregate.
BoundsOutput min_sizes(Aggregation agg, const BoundsInput& in);

/// When s_p_min exceeds s_min, raises s_min to s_p_min and marks the output reconciled.
BoundsOutput reconcile_sizes(BoundsOutput out);

}  // namespace aqnn
