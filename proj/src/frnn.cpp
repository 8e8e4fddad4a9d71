#include "aqnn/frnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "aqnn/error.hpp"

namespace aqnn {

double dist(Metric metric, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw InvalidArgument("distance between vectors of dimension " + std::to_string(u.size()) +
                              " and " + std::to_string(v.size()));
    if (metric == Metric::euclidean) {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - v[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw InvalidArgument("cosine distance of a zero vector");
    const double cos = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
    return 1.0 - cos;
}

bool NeighborSet::contains(ObjectId id) const {
    return std::ranges::binary_search(members, id);
}

NeighborSet NeighborSet::from_ids(std::vector<ObjectId> ids, Space space, std::string method) {
    std::ranges::sort(ids);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return {std::move(ids), space, std::move(method), std::nullopt};
}

void EmbeddedObjects::push_back(ObjectId id, std::span<const double> embedding) {
    if (ids.empty() && dim == 0) dim = embedding.size();
    if (embedding.size() != dim)
        throw DataError("embedding of object " + std::to_string(id) + " has dimension " +
                        std::to_string(embedding.size()) + ", expected " + std::to_string(dim));
    ids.push_back(id);
    data.insert(data.end(), embedding.begin(), embedding.end());
}

std::vector<ScoredObject> distances_to(const EmbeddedObjects& objects, std::span<const double> q,
                                       Metric metric) {
    std::vector<ScoredObject> out;
    out.reserve(objects.size());
    for (std::size_t i = 0; i < objects.size(); ++i)
        out.push_back({objects.ids[i], dist(metric, objects.row(i), q)});
    return out;
}

NeighborSet within_radius(std::span<const ScoredObject> scored, double radius, Space space,
                          std::string method) {
    std::vector<ObjectId> ids;
    for (const auto& s : scored)
        if (s.distance <= radius) ids.push_back(s.id);
    auto set = NeighborSet::from_ids(std::move(ids), space, std::move(method));
    set.threshold = radius;
    return set;
}

NeighborSet exact_frnn(const EmbeddedObjects& universe, std::span<const double> q, double radius,
                       Metric metric, Space space) {
    return within_radius(distances_to(universe, q, metric), radius, space);
}

NeighborSet exact_frnn(const Dataset& ds, std::span<const ObjectId> ids, Space space,
                       std::span<const double> q, double radius, Metric metric) {
    if (space == Space::mixed) throw InvalidArgument("exact search needs the oracle or proxy space");
    std::vector<ScoredObject> scored;
    scored.reserve(ids.size());
    for (const ObjectId id : ids) {
        const auto e = space == Space::oracle ? ds.oracle_embedding(id) : ds.proxy_embedding(id);
        scored.push_back({id, dist(metric, e, q)});
    }
    return within_radius(scored, radius, space);
}

double PrecisionRecall::gap() const noexcept { return std::abs(precision - recall); }

PrecisionRecall prf1_from_counts(std::size_t selected, std::size_t truth, std::size_t overlap) {
    PrecisionRecall pr;
    pr.precision = selected == 0 ? 1.0 : static_cast<double>(overlap) / static_cast<double>(selected);
    pr.recall = truth == 0 ? 1.0 : static_cast<double>(overlap) / static_cast<double>(truth);
    const double sum = pr.precision + pr.recall;
    pr.f1 = sum == 0.0 ? 0.0 : 2.0 * pr.precision * pr.recall / sum;
    return pr;
}

PrecisionRecall prf1(const NeighborSet& selected, const NeighborSet& truth) {
    std::size_t overlap = 0;
    auto a = selected.members.begin();
    auto b = truth.members.begin();
    while (a != selected.members.end() && b != truth.members.end()) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else { ++overlap; ++a; ++b; }
    }
    return prf1_from_counts(selected.size(), truth.size(), overlap);
}

NeighborSet top_k_baseline(std::span<const ScoredObject> proxy_scored, std::size_t k) {
    if (k == 0) throw InvalidArgument("top-K needs K >= 1");
    if (k > proxy_scored.size())
        throw InvalidArgument("K = " + std::to_string(k) + " exceeds the universe size " +
                              std::to_string(proxy_scored.size()));
    std::vector<ScoredObject> sorted(proxy_scored.begin(), proxy_scored.end());
    const auto closer = [](const ScoredObject& x, const ScoredObject& y) {
        return x.distance < y.distance || (x.distance == y.distance && x.id < y.id);
    };
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(), closer);
    std::vector<ObjectId> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) ids.push_back(sorted[i].id);
    auto set = NeighborSet::from_ids(std::move(ids), Space::proxy, "top_k");
    set.threshold = sorted[k - 1].distance;
    return set;
}

// ---------------------------------------------------------------------------------------

void PrecisionTargetConfig::validate() const {
    if (!(target >= 0.0 && target <= 1.0)) throw InvalidArgument("precision target must lie in [0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
}

double precision_lower_bound(std::size_t true_positives, std::size_t selected, double delta) {
    if (selected == 0) return 0.0;
    const double m = static_cast<double>(selected);
    const double p_hat = static_cast<double>(true_positives) / m;
    const double eps = std::sqrt(std::log(1.0 / delta) / (2.0 * m));
    return std::max(0.0, p_hat - eps);
}

PrecisionCalibration::PrecisionCalibration(std::span<const LabeledCandidate> labeled, double radius,
                                           double delta)
    : labeled_size_(labeled.size()), delta_(delta) {
    if (labeled.empty()) throw InvalidArgument("calibration needs at least one labeled candidate");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");

    std::vector<LabeledCandidate> sorted(labeled.begin(), labeled.end());
    std::ranges::sort(sorted, {}, &LabeledCandidate::proxy_distance);

    std::vector<double> candidates;
    candidates.reserve(sorted.size() + 1);
    for (const auto& c : sorted) candidates.push_back(c.proxy_distance);
    candidates.push_back(radius);
    std::ranges::sort(candidates);
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t next = 0, selected = 0, tp = 0;
    for (const double tau : candidates) {
        while (next < sorted.size() && sorted[next].proxy_distance <= tau) {
            ++selected;
            tp += sorted[next].true_neighbor ? 1 : 0;
            ++next;
        }
        if (selected == 0) continue;
        thresholds_.push_back(tau);
        lower_bounds_.push_back(precision_lower_bound(tp, selected, delta));
        precisions_.push_back(static_cast<double>(tp) / static_cast<double>(selected));
    }
    // Highest lower bound; ties (typically all zero on a sparse pilot) go to the highest empirical
    // precision, then to the largest threshold.
    for (std::size_t i = 0; i < lower_bounds_.size(); ++i) {
        const auto key = std::pair{lower_bounds_[i], precisions_[i]};
        if (key >= std::pair{lower_bounds_[best_index_], precisions_[best_index_]}) best_index_ = i;
    }
}

ThresholdChoice PrecisionCalibration::choose(double target) const {
    for (std::size_t i = thresholds_.size(); i-- > 0;) {
        if (lower_bounds_[i] >= target) return {thresholds_[i], lower_bounds_[i], true};
    }
    return {thresholds_[best_index_], lower_bounds_[best_index_], false};
}

NeighborSet select_within_threshold(std::span<const ScoredObject> candidates, double threshold,
                                    std::string method) {
    auto set = within_radius(candidates, threshold, Space::proxy, std::move(method));
    set.threshold = threshold;
    return set;
}

NeighborSet pqe_pt(std::span<const ScoredObject> sample, std::span<const LabeledCandidate> labeled,
                   PrecisionTargetConfig cfg, double radius) {
    cfg.validate();
    if (sample.empty()) throw InvalidArgument("calibrated selection over an empty sample");
    const PrecisionCalibration calibration(labeled, radius, cfg.delta);
    const auto choice = calibration.choose(cfg.target);
    auto set = select_within_threshold(sample, choice.threshold, "pqe_pt");
    set.space = Space::mixed;
    return set;
}

}  // namespace aqnn
