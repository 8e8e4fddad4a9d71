#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqnn/dataset.hpp"
#include "aqnn/types.hpp"

namespace aqnn {

/// Euclidean: L2 norm of u - v. Cosine: 1 - cos(u, v), in [0, 2].
double dist(Metric metric, std::span<const double> u, std::span<const double> v);

/// A set of object ids tagged with where it came from. Members are sorted and unique.
struct NeighborSet {
    std::vector<ObjectId> members;
    Space space = Space::oracle;
    std::string method;
    std::optional<double> threshold;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    bool contains(ObjectId id) const;

    static NeighborSet from_ids(std::vector<ObjectId> ids, Space space, std::string method);
};

/// An object with its distance to the query target in one space.
struct ScoredObject {
    ObjectId id = 0;
    double distance = 0.0;
};

/// Row-major embeddings of a set of objects in one space.
struct EmbeddedObjects {
    std::vector<ObjectId> ids;
    std::vector<double> data;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return ids.size(); }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    void push_back(ObjectId id, std::span<const double> embedding);
};

std::vector<ScoredObject> distances_to(const EmbeddedObjects& objects,
                                       std::span<const double> q, Metric metric);

/// Ids with distance <= radius (boundary included).
NeighborSet within_radius(std::span<const ScoredObject> scored, double radius, Space space,
                          std::string method = "exact_frnn");

NeighborSet exact_frnn(const EmbeddedObjects& universe, std::span<const double> q,
                       double radius, Metric metric, Space space = Space::oracle);

/// Exact search over dataset members using their stored embeddings in `space`
/// (oracle or proxy). Throws DataError when the embeddings are not stored.
NeighborSet exact_frnn(const Dataset& ds, std::span<const ObjectId> ids, Space space,
                       std::span<const double> q, double radius, Metric metric);

struct PrecisionRecall {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;

    double gap() const noexcept;
};

/// Precision is 1 for an empty selection, recall is 1 for an empty truth,
/// F1 is 0 when precision + recall is 0.
PrecisionRecall prf1(const NeighborSet& selected, const NeighborSet& truth);
PrecisionRecall prf1_from_counts(std::size_t selected, std::size_t truth,
                                 std::size_t overlap);

/// The K ids with smallest distance; ties at equal distance go to the smaller id.
NeighborSet top_k_baseline(std::span<const ScoredObject> proxy_scored, std::size_t k);

// ---------------------------------------------------------------------------------------
// Calibrated precision-target selection
// ---------------------------------------------------------------------------------------

struct PrecisionTargetConfig {
    double target = 0.95;  // t in [0, 1]
    double delta = 0.05;   // failure probability in (0, 1)

    void validate() const;
};

/// An oracle-labeled candidate: its proxy distance and whether the oracle puts it within r.
struct LabeledCandidate {
    ObjectId id = 0;
    double proxy_distance = 0.0;
    bool true_neighbor = false;
};

/// One-sided Hoeffding lower confidence bound on precision, clamped to [0, 1]:
/// max(0, tp/selected - sqrt(ln(1/delta) / (2 selected))).
double precision_lower_bound(std::size_t true_positives, std::size_t selected, double delta);

struct ThresholdChoice {
    double threshold = 0.0;
    double lower_bound = 0.0;
    /// False when no candidate threshold certifies the target and the best-certified
    /// threshold was used instead.
    bool certified = false;
};

/// Proxy-distance thresholds calibrated against oracle labels.
///
/// Candidate thresholds are the distinct labeled proxy distances plus the query radius.
/// For a target t the largest candidate whose precision lower bound is >= t is chosen;
/// if none qualifies, the candidate with the highest lower bound, then the highest empirical
/// precision, then the largest threshold.
/// Construction is O(n log n); each choice is O(n).
class PrecisionCalibration {
public:
    PrecisionCalibration(std::span<const LabeledCandidate> labeled, double radius, double delta);

    ThresholdChoice choose(double target) const;

    std::size_t labeled_size() const noexcept { return labeled_size_; }
    std::size_t candidate_count() const noexcept { return thresholds_.size(); }
    double delta() const noexcept { return delta_; }

private:
    std::vector<double> thresholds_;  // ascending, only those with >= 1 labeled member
    std::vector<double> lower_bounds_;
    std::vector<double> precisions_;
    std::size_t best_index_ = 0;
    std::size_t labeled_size_ = 0;
    double delta_ = 0.05;
};

/// Ids in `candidates` with distance <= threshold (ties included).
NeighborSet select_within_threshold(std::span<const ScoredObject> candidates, double threshold,
                                    std::string method);

/// Calibrated precision-target selection: threshold chosen from `labeled`, applied to
/// `sample` by proxy distance. Throws InvalidArgument for an empty sample or labeled set.
NeighborSet pqe_pt(std::span<const ScoredObject> sample,
                   std::span<const LabeledCandidate> labeled, PrecisionTargetConfig cfg,
                   double radius);

}  // namespace aqnn
