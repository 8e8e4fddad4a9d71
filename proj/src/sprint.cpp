#include "aqnn/sprint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "aqnn/error.hpp"
#include "aqnn/rng.hpp"

namespace aqnn {

void SprintConfig::validate(std::size_t population) const {
    if (sample_size == 0) throw InvalidArgument("sample size s must be positive");
    if (pilot_size == 0) throw InvalidArgument("pilot size s_p must be positive");
    if (pilot_size > sample_size)
        throw InvalidArgument("pilot size s_p = " + std::to_string(pilot_size) +
                              " exceeds sample size s = " + std::to_string(sample_size));
    if (sample_size > population)
        throw InvalidArgument("sample size s = " + std::to_string(sample_size) +
                              " exceeds the population size " + std::to_string(population));
    if (!(omega_v > 0.0 && omega_v < 1.0)) throw InvalidArgument("omega_v must lie in (0, 1)");
    if (!(omega_c > 0.0 && omega_c < 1.0)) throw InvalidArgument("omega_c must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
}

void QuerySpec::validate(const Dataset& ds) const {
    if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    if (const auto* id = std::get_if<ObjectId>(&target)) {
        if (*id < 0 || static_cast<std::size_t>(*id) >= ds.size())
            throw InvalidArgument("query target id " + std::to_string(*id) + " is not in the dataset");
    }
}

std::vector<ObjectId> draw_sample(std::size_t population, std::size_t s, std::uint64_t seed) {
    if (s > population)
        throw InvalidArgument("cannot draw " + std::to_string(s) + " objects from a population of " +
                              std::to_string(population));
    Rng rng(seed);
    std::vector<ObjectId> out;
    out.reserve(s);
    std::unordered_set<ObjectId> chosen;
    chosen.reserve(s * 2);
    for (std::size_t j = population - s; j < population; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        auto t = static_cast<ObjectId>(pick(rng));
        if (!chosen.insert(t).second) {
            t = static_cast<ObjectId>(j);
            chosen.insert(t);
        }
        out.push_back(t);
    }
    return out;
}

std::vector<ObjectId> draw_pilot(std::span<const ObjectId> sample, std::size_t s_p,
                                 std::uint64_t seed) {
    if (s_p > sample.size())
        throw InvalidArgument("pilot size " + std::to_string(s_p) + " exceeds the sample size " +
                              std::to_string(sample.size()));
    Rng rng(seed);
    std::vector<ObjectId> pool(sample.begin(), sample.end());
    for (std::size_t i = 0; i < s_p; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(s_p);
    return pool;
}

std::uint64_t sample_seed(std::uint64_t root) noexcept { return derive_seed(root, "sprint.sample"); }
std::uint64_t pilot_seed(std::uint64_t root) noexcept { return derive_seed(root, "sprint.pilot"); }

// ---------------------------------------------------------------------------------------

namespace {

std::vector<ScoredObject> scored_view(std::span<const LabeledCandidate> pilot) {
    std::vector<ScoredObject> out;
    out.reserve(pilot.size());
    for (const auto& c : pilot) out.push_back({c.id, c.proxy_distance});
    return out;
}

NeighborSet truth_of(std::span<const LabeledCandidate> pilot) {
    std::vector<ObjectId> ids;
    for (const auto& c : pilot)
        if (c.true_neighbor) ids.push_back(c.id);
    return NeighborSet::from_ids(std::move(ids), Space::oracle, "pilot_truth");
}

}  // namespace

SelectionProblem::SelectionProblem(std::vector<ScoredObject> sample_proxy,
                                   std::vector<LabeledCandidate> pilot, double radius, double delta)
    : sample_(std::move(sample_proxy)),
      pilot_(std::move(pilot)),
      pilot_scored_(scored_view(pilot_)),
      pilot_truth_(truth_of(pilot_)),
      calibration_(pilot_, radius, delta),
      radius_(radius) {
    if (sample_.empty()) throw InvalidArgument("empty sample");
    if (pilot_truth_.empty())
        throw DegenerateQuery("pilot contains no true neighbors; increase s_p or r");
}

NeighborSet SelectionProblem::select_on_pilot(double target) const {
    return select_within_threshold(pilot_scored_, calibration_.choose(target).threshold, "pqe_pt");
}

PrecisionRecall SelectionProblem::evaluate_on_pilot(double target) const {
    return prf1(select_on_pilot(target), pilot_truth_);
}

NeighborSet SelectionProblem::select_on_sample(double target, const std::string& method) const {
    auto set = select_within_threshold(sample_, calibration_.choose(target).threshold, method);
    set.space = Space::mixed;
    return set;
}

TernaryResult ternary_search_max(const std::function<double(double)>& objective, double lo,
                                 double hi, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("ternary search tolerance must be positive");
    if (!(lo <= hi)) throw InvalidArgument("ternary search needs lo <= hi");
    TernaryResult r;
    while (hi - lo > tol) {
        const double third = (hi - lo) / 3.0;
        const double t1 = lo + third;
        const double t2 = hi - third;
        if (objective(t1) > objective(t2)) hi = t2;
        else lo = t1;
        ++r.iterations;
    }
    r.lo = lo;
    r.hi = hi;
    r.t_star = (lo + hi) / 2.0;
    return r;
}

BalanceResult balance_search(const std::function<PrecisionRecall(double)>& evaluate, double tol,
                             int max_iters, double lo, double hi) {
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
    BalanceResult best;
    best.gap = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iters; ++it) {
        const double t = (lo + hi) / 2.0;
        const auto pr = evaluate(t);
        const double gap = pr.gap();
        if (gap < best.gap) {
            best.t_star = t;
            best.gap = gap;
        }
        best.iterations = it;
        if (gap <= tol) {
            best.t_star = t;
            best.gap = gap;
            best.converged = true;
            return best;
        }
        if (pr.precision <= pr.recall) lo = t;
        else hi = t;
    }
    return best;
}

namespace {

SelectionResult finish(const SelectionProblem& problem, double t_star, int iterations,
                       const std::string& method) {
    SelectionResult r;
    r.t_star = t_star;
    r.iterations = iterations;
    r.neighbors = problem.select_on_sample(t_star, method);
    r.pilot_metrics = problem.evaluate_on_pilot(t_star);
    return r;
}

}  // namespace

SelectionResult sprint_v(const SelectionProblem& problem, double omega_v) {
    const auto search = ternary_search_max(
        [&](double t) { return problem.evaluate_on_pilot(t).f1; }, 0.0, 1.0, omega_v);
    return finish(problem, search.t_star, search.iterations, "sprint_v");
}

SelectionResult sprint_c(const SelectionProblem& problem, double omega_c, int max_iters) {
    const auto search = balance_search(
        [&](double t) { return problem.evaluate_on_pilot(t); }, omega_c, max_iters);
    return finish(problem, search.t_star, search.iterations, "sprint_c");
}

SelectionResult two_phase(const SelectionProblem& problem, double omega_c, double omega_v,
                          int max_iters) {
    const auto balanced = balance_search(
        [&](double t) { return problem.evaluate_on_pilot(t); }, omega_c, max_iters);
    const double lo = std::max(0.0, balanced.t_star - kTwoPhaseWindow);
    const double hi = std::min(1.0, balanced.t_star + kTwoPhaseWindow);
    const auto refined = ternary_search_max(
        [&](double t) { return problem.evaluate_on_pilot(t).f1; }, lo, hi, omega_v);
    return finish(problem, refined.t_star, balanced.iterations + refined.iterations, "two_phase");
}

SelectionResult pqe_pt_fixed(const SelectionProblem& problem, double target) {
    if (!(target >= 0.0 && target <= 1.0)) throw InvalidArgument("precision target must lie in [0, 1]");
    return finish(problem, target, 0, "pqe_pt");
}

std::string_view selector_for(Aggregation agg) noexcept {
    switch (sensitivity_of(agg)) {
        case Sensitivity::value: return "sprint_v";
        case Sensitivity::count: return "sprint_c";
        case Sensitivity::both: return "two_phase";
    }
    return "sprint_v";
}

SelectionProblem prepare_selection(const QuerySpec& query, const SprintConfig& cfg, const Dataset& ds,
                                   const EmbeddingModel& oracle, const EmbeddingModel& proxy,
                                   CallLedger& ledger, std::vector<ObjectId>* sample_out,
                                   std::vector<ObjectId>* pilot_out) {
    if (oracle.role != ModelRole::oracle || proxy.role != ModelRole::proxy)
        throw InvalidArgument("models passed in the wrong roles");
    query.validate(ds);
    cfg.validate(ds.size());

    const auto q_oracle = embed_query(oracle, ds, query.target, ledger);
    const auto q_proxy = embed_query(proxy, ds, query.target, ledger);

    auto sample = draw_sample(ds.size(), cfg.sample_size, sample_seed(cfg.seed));
    auto pilot = draw_pilot(sample, cfg.pilot_size, pilot_seed(cfg.seed));

    std::vector<ScoredObject> scored;
    scored.reserve(sample.size());
    std::unordered_map<ObjectId, double> proxy_distance;
    proxy_distance.reserve(sample.size() * 2);
    for (const ObjectId id : sample) {
        const double d = dist(query.metric, embed(proxy, ds, id, ledger), q_proxy);
        scored.push_back({id, d});
        proxy_distance.emplace(id, d);
    }

    std::vector<LabeledCandidate> labeled;
    labeled.reserve(pilot.size());
    for (const ObjectId id : pilot) {
        const double d = dist(query.metric, embed(oracle, ds, id, ledger), q_oracle);
        labeled.push_back({id, proxy_distance.at(id), d <= query.radius});
    }

    if (sample_out) *sample_out = std::move(sample);
    if (pilot_out) *pilot_out = std::move(pilot);
    return SelectionProblem(std::move(scored), std::move(labeled), query.radius, cfg.alpha);
}

SelectionOutcome select_neighbors(const QuerySpec& query, const SprintConfig& cfg, const Dataset& ds,
                                  const EmbeddingModel& oracle, const EmbeddingModel& proxy,
                                  CallLedger& ledger) {
    SelectionOutcome out;
    const auto problem = prepare_selection(query, cfg, ds, oracle, proxy, ledger, &out.sample, &out.pilot);
    switch (query.sensitivity()) {
        case Sensitivity::value:
            out.result = sprint_v(problem, cfg.omega_v);
            break;
        case Sensitivity::count:
            out.result = sprint_c(problem, cfg.omega_c, cfg.max_iters);
            break;
        case Sensitivity::both:
            out.result = two_phase(problem, cfg.omega_c, cfg.omega_v, cfg.max_iters);
            break;
    }
    out.method = std::string(selector_for(query.agg));
    out.pilot_truth = problem.pilot_truth();
    out.calls = ledger.counts();
    return out;
}

}  // namespace aqnn
