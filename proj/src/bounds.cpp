#include "aqnn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aqnn/error.hpp"

namespace aqnn {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw InvalidArgument(std::string(field) + " " + what);
}

void check_alpha(const BoundsInput& in) { require(in.alpha > 0.0 && in.alpha < 1.0, "alpha", "must lie in (0, 1)"); }
void check_rho(const BoundsInput& in) { require(in.rho > 0.0 && in.rho <= 1.0, "rho", "must lie in (0, 1]"); }
void check_omega_s(const BoundsInput& in) { require(in.omega_s > 0.0, "omega_s", "must be positive"); }
void check_lambda(const BoundsInput& in) { require(in.lambda > 0.0, "lambda", "must be positive"); }
void check_range(const BoundsInput& in) { require(in.a < in.b, "attribute bounds", "must satisfy a < b"); }
void check_omega_c(const BoundsInput& in) { require(in.omega_c >= 0.0, "omega_c", "must be nonnegative"); }

void warn_if_derived(const BoundsInput& in, BoundsOutput& out) {
    if (in.bounds_data_derived)
        out.warnings.emplace_back(
            "attribute bounds were derived from the observed data; the guarantee assumes declared bounds");
}

}  // namespace

std::uint64_t ceil_size(double raw) {
    if (!(raw >= 0.0) || !std::isfinite(raw)) throw InvalidArgument("sample size bound is not finite");
    // Absorb representation noise just above an exact integer before taking the ceiling.
    const double nearest = std::round(raw);
    const double value = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::ceil(raw);
    if (value >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
        throw InvalidArgument("sample size bound overflows");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(value));
}

BoundsOutput min_sizes_value(Aggregation agg, const BoundsInput& in) {
    if (agg != Aggregation::avg && agg != Aggregation::var)
        throw InvalidArgument("value-sensitive bounds cover AVG and VAR only");
    check_alpha(in);
    check_rho(in);
    check_range(in);
    check_omega_s(in);
    check_lambda(in);

    const double log_term = std::log(2.0 / in.alpha);
    const double range = in.b - in.a;
    const double range_pow = agg == Aggregation::avg ? range * range : std::pow(range, 4);
    const double k1 = range_pow * log_term / (2.0 * in.rho);
    const double k2 = 32.0 * log_term;

    BoundsOutput out;
    out.s_raw = k1 / (in.omega_s * in.omega_s);
    out.s_p_raw = k2 / (in.lambda * in.lambda);
    out.s_min = ceil_size(out.s_raw);
    out.s_p_min = ceil_size(out.s_p_raw);

    std::uint64_t on_s = 0;
    if (in.on_s_size) {
        require(*in.on_s_size > 0, "on_s_size", "must be positive");
        on_s = *in.on_s_size;
    } else {
        on_s = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::llround(in.rho * static_cast<double>(out.s_min))));
    }
    const double on = static_cast<double>(on_s);
    const double c1 = agg == Aggregation::avg ? 2.0 * range / on : 3.0 * range * range / on;
    const double c2 = agg == Aggregation::avg ? 0.0 : range * range / on;
    out.omega_nn_implied = c1 * in.lambda + c2 * in.lambda * in.lambda;
    warn_if_derived(in, out);
    return out;
}

BoundsOutput min_sizes_count(Aggregation agg, const BoundsInput& in) {
    if (agg != Aggregation::pct && agg != Aggregation::count)
        throw InvalidArgument("count-sensitive bounds cover PCT and COUNT only");
    check_alpha(in);
    check_rho(in);
    check_omega_s(in);
    check_omega_c(in);
    require(in.omega_nn > 0.0, "omega_nn", "must be positive");
    if (agg == Aggregation::count) require(in.population_size > 0, "population_size", "must be positive");

    const double denom = in.omega_nn - in.rho * in.omega_c;
    if (!(denom > 0.0)) throw InvalidArgument("omega_nn must exceed rho*omega_c");

    const double log_term = std::log(2.0 / in.alpha);
    const double big_d = static_cast<double>(in.population_size);
    const double k1 = agg == Aggregation::pct ? 0.5 * log_term : big_d * big_d / 2.0 * log_term;
    const double k2 = 2.0 * log_term / (in.rho * in.rho);

    BoundsOutput out;
    out.s_raw = k1 / (in.omega_s * in.omega_s);
    out.s_p_raw = k2 / (denom * denom);
    out.s_min = ceil_size(out.s_raw);
    out.s_p_min = ceil_size(out.s_p_raw);
    return out;
}

SumBoundTerms sum_bound_terms(const BoundsInput& in) {
    check_alpha(in);
    check_rho(in);
    check_range(in);
    check_omega_s(in);
    check_omega_c(in);
    check_lambda(in);
    require(in.omega_nn > 0.0, "omega_nn", "must be positive");
    require(in.avg_s_abs > 0.0, "avg_s_abs", "must be positive");
    require(in.on_d_size >= 1, "on_d_size", "must be at least 1");
    require(in.population_size >= 1, "population_size", "must be at least 1");

    const double log4 = std::log(4.0 / in.alpha);
    const double log2 = std::log(2.0 / in.alpha);
    const double big_d = static_cast<double>(in.population_size);
    const double range = in.b - in.a;
    const double on_d = static_cast<double>(in.on_d_size);
    const double w2 = in.omega_s * in.omega_s;

    SumBoundTerms t;
    t.s_count = 2.0 * big_d * big_d * in.avg_s_abs * in.avg_s_abs * log4 / w2;
    t.s_avg = 2.0 * range * range * on_d * on_d * log4 / w2;

    const double s = in.sample_size ? static_cast<double>(*in.sample_size)
                                    : static_cast<double>(ceil_size(std::max(t.s_count, t.s_avg)));
    t.omega_nn_sum = in.omega_nn * s / (2.0 * big_d * in.avg_s_abs);
    const double denom = t.omega_nn_sum - in.rho * in.omega_c;
    if (!(denom > 0.0)) throw InvalidArgument("omega_nn_sum must exceed rho*omega_c");
    const double k2_count = 2.0 * log2 / (in.rho * in.rho);
    const double k2_avg = 32.0 * log2;
    t.s_p_count = k2_count / (denom * denom);
    t.s_p_avg = k2_avg / (in.lambda * in.lambda);
    return t;
}

BoundsOutput min_sizes_sum(const BoundsInput& in) {
    const auto t = sum_bound_terms(in);
    BoundsOutput out;
    out.s_raw = std::max(t.s_count, t.s_avg);
    out.s_p_raw = std::max(t.s_p_count, t.s_p_avg);
    out.s_min = ceil_size(out.s_raw);
    out.s_p_min = ceil_size(out.s_p_raw);
    if (!in.sample_size)
        out.warnings.emplace_back("omega_nn_sum evaluated at |S| = s_min; pass sample_size to pin |S|");
    warn_if_derived(in, out);
    return out;
}

BoundsOutput min_sizes(Aggregation agg, const BoundsInput& in) {
    switch (sensitivity_of(agg)) {
        case Sensitivity::value: return min_sizes_value(agg, in);
        case Sensitivity::count: return min_sizes_count(agg, in);
        case Sensitivity::both: return min_sizes_sum(in);
    }
    return {};
}

BoundsOutput reconcile_sizes(BoundsOutput out) {
    if (out.s_p_min > out.s_min) {
        out.s_min = out.s_p_min;
        out.reconciled = true;
    }
    return out;
}

}  // namespace aqnn
