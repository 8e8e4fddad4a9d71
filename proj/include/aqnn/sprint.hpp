#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aqnn/dataset.hpp"
#include "aqnn/frnn.hpp"
#include "aqnn/models.hpp"
#include "aqnn/types.hpp"

namespace aqnn {

struct SprintConfig {
    std::size_t sample_size = 1000;  // s
    std::size_t pilot_size = 600;    // s_p
    double omega_v = 0.01;           // ternary-search width tolerance
    double omega_c = 0.01;           // precision/recall gap tolerance
    double alpha = 0.05;             // confidence parameter, also the calibration delta
    int max_iters = 30;              // binary-search cap
    std::uint64_t seed = 0;

    /// Throws InvalidArgument unless s_p <= s <= population and all tolerances are in range.
    void validate(std::size_t population) const;
};

struct QuerySpec {
    QueryTarget target = ObjectId{0};
    double radius = 1.0;
    Metric metric = Metric::euclidean;
    Aggregation agg = Aggregation::avg;

    Sensitivity sensitivity() const noexcept { return sensitivity_of(agg); }
    void validate(const Dataset& ds) const;
};

/// Uniform sample of `s` ids from [0, population) without replacement (Floyd's algorithm,
/// O(s) expected). Returned in draw order.
std::vector<ObjectId> draw_sample(std::size_t population, std::size_t s, std::uint64_t seed);

/// Uniform subsample of `sample` without replacement, size s_p.
std::vector<ObjectId> draw_pilot(std::span<const ObjectId> sample, std::size_t s_p,
                                 std::uint64_t seed);

/// Derived seeds keep the sample fixed when only the pilot size changes.
std::uint64_t sample_seed(std::uint64_t root) noexcept;
std::uint64_t pilot_seed(std::uint64_t root) noexcept;

/// The per-query state the selectors search over: the sample S scored in proxy space and
/// the pilot S_p labeled by the oracle. Throws DegenerateQuery when the pilot contains no
/// true neighbor.
class SelectionProblem {
public:
    SelectionProblem(std::vector<ScoredObject> sample_proxy,
                     std::vector<LabeledCandidate> pilot, double radius, double delta);

    /// Runs the calibrated selector on S_p itself and scores it against the pilot truth.
    PrecisionRecall evaluate_on_pilot(double target) const;

    /// Selects from S by proxy distance with the threshold calibrated on S_p.
    NeighborSet select_on_sample(double target, const std::string& method) const;

    /// Selects from S_p only (pilot as both candidate and calibration set).
    NeighborSet select_on_pilot(double target) const;

    ThresholdChoice threshold_for(double target) const { return calibration_.choose(target); }

    std::span<const ScoredObject> sample() const noexcept { return sample_; }
    std::span<const ScoredObject> pilot_scored() const noexcept { return pilot_scored_; }
    std::span<const LabeledCandidate> pilot() const noexcept { return pilot_; }
    const NeighborSet& pilot_truth() const noexcept { return pilot_truth_; }
    double radius() const noexcept { return radius_; }

private:
    std::vector<ScoredObject> sample_;
    std::vector<LabeledCandidate> pilot_;
    std::vector<ScoredObject> pilot_scored_;
    NeighborSet pilot_truth_;
    PrecisionCalibration calibration_;
    double radius_;
};

struct TernaryResult {
    double t_star = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    int iterations = 0;
};

/// Ternary search for the maximum of `objective` over [lo, hi]. Keeps [lo, t2] when
/// f(t1) > f(t2), else [t1, hi], until the width is <= tol; returns the midpoint.
TernaryResult ternary_search_max(const std::function<double(double)>& objective, double lo,
                                 double hi, double tol);

struct BalanceResult {
    double t_star = 0.5;
    double gap = 1.0;
    int iterations = 0;
    bool converged = false;
};

/// Bisection over t in [0, 1] on the precision/recall balance: raise t while P <= R, lower it
/// otherwise, stop once |R - P| <= tol or after max_iters probes. Without convergence the
/// probe with the smallest gap (earliest on ties) is returned.
BalanceResult balance_search(const std::function<PrecisionRecall(double)>& evaluate, double tol,
                             int max_iters, double lo = 0.0, double hi = 1.0);

struct SelectionResult {
    NeighborSet neighbors;
    double t_star = 0.0;
    int iterations = 0;
    PrecisionRecall pilot_metrics;
};

/// F1-maximizing target search (value-sensitive aggregates).
SelectionResult sprint_v(const SelectionProblem& problem, double omega_v);
/// Precision/recall balancing target search (count-sensitive aggregates).
SelectionResult sprint_c(const SelectionProblem& problem, double omega_c, int max_iters);
/// Balance first, then maximize F1 within +-0.05 of the balanced target (SUM).
SelectionResult two_phase(const SelectionProblem& problem, double omega_c, double omega_v,
                          int max_iters);
/// Calibrated selection at a fixed precision target (baseline).
SelectionResult pqe_pt_fixed(const SelectionProblem& problem, double target);

inline constexpr double kTwoPhaseWindow = 0.05;

std::string_view selector_for(Aggregation agg) noexcept;

struct SelectionOutcome {
    SelectionResult result;
    std::string method;
    std::vector<ObjectId> sample;
    std::vector<ObjectId> pilot;
    NeighborSet pilot_truth;
    CallCounts calls;
};

/// Embeds the query target and the sample (proxy) and pilot (oracle), charging `ledger`.
SelectionProblem prepare_selection(const QuerySpec& query, const SprintConfig& cfg,
                                   const Dataset& ds, const EmbeddingModel& oracle,
                                   const EmbeddingModel& proxy, CallLedger& ledger,
                                   std::vector<ObjectId>* sample_out = nullptr,
                                   std::vector<ObjectId>* pilot_out = nullptr);

/// Full pipeline: sample, pilot, then the selector matching the aggregate's sensitivity.
SelectionOutcome select_neighbors(const QuerySpec& query, const SprintConfig& cfg,
                                  const Dataset& ds, const EmbeddingModel& oracle,
                                  const EmbeddingModel& proxy, CallLedger& ledger);

}  // namespace aqnn
