#include "aqnn/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "aqnn/error.hpp"

namespace aqnn {

std::string_view to_string(Comparison op) noexcept {
    switch (op) {
        case Comparison::ge: return ">=";
        case Comparison::le: return "<=";
        case Comparison::ne: return "!=";
    }
    return "?";
}

Comparison parse_comparison(std::string_view s) {
    if (s == ">=" || s == "ge") return Comparison::ge;
    if (s == "<=" || s == "le") return Comparison::le;
    if (s == "!=" || s == "ne") return Comparison::ne;
    throw InvalidArgument("unknown comparison '" + std::string(s) + "' (expected >=, <=, !=)");
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t(dof), t);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double tail_p_value(Comparison op, double cdf, double sf) {
    switch (op) {
        case Comparison::ge: return cdf;
        case Comparison::le: return sf;
        case Comparison::ne: return std::min(1.0, 2.0 * std::min(cdf, sf));
    }
    return 1.0;
}

namespace {

void check_alpha(const Hypothesis& h) {
    if (!(h.alpha > 0.0 && h.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

}  // namespace

TestDecision t_test_one_sample(std::span<const double> values, const Hypothesis& h) {
    check_alpha(h);
    const std::size_t n = values.size();
    if (n < 2) throw DegenerateQuery("t-test needs at least 2 values");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DegenerateQuery("t-test on constant values");

    const double t = (mean - h.c) / (sd / std::sqrt(static_cast<double>(n)));
    const double dof = static_cast<double>(n - 1);
    const boost::math::students_t dist(dof);
    const double cdf = boost::math::cdf(dist, t);
    const double sf = boost::math::cdf(boost::math::complement(dist, t));
    TestDecision d;
    d.statistic = t;
    d.p_value = tail_p_value(h.op, cdf, sf);
    d.reject_null = d.p_value < h.alpha;
    return d;
}

TestDecision z_test_proportion(double p_hat, std::size_t n, const Hypothesis& h) {
    check_alpha(h);
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InvalidArgument("proportion must lie in [0, 1]");
    if (!(h.c > 0.0 && h.c < 1.0)) throw DegenerateQuery("z-test needs 0 < c < 1");
    const double nd = static_cast<double>(n);
    if (nd * h.c < 5.0 || nd * (1.0 - h.c) < 5.0)
        throw DegenerateQuery("z-test needs n*c >= 5 and n*(1-c) >= 5");

    const double z = (p_hat - h.c) / std::sqrt(h.c * (1.0 - h.c) / nd);
    TestDecision d;
    d.statistic = z;
    d.p_value = tail_p_value(h.op, normal_cdf(z), normal_cdf(-z));
    d.reject_null = d.p_value < h.alpha;
    return d;
}

double ht_accuracy(const std::vector<bool>& est, const std::vector<bool>& truth) {
    if (est.empty() || est.size() != truth.size())
        throw InvalidArgument("decision lists must be non-empty and of equal length");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < est.size(); ++i) agree += est[i] == truth[i] ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(est.size());
}

}  // namespace aqnn
