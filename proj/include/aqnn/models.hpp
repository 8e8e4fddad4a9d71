#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_set>
#include <variant>
#include <vector>

#include "aqnn/dataset.hpp"
#include "aqnn/types.hpp"

namespace aqnn {

enum class ModelRole { oracle, proxy };

enum class EmbeddingSource {
    stored,     // read the embedding stored on the object
    simulated,  // oracle: features as-is; proxy: features + seeded Gaussian noise
};

struct EmbeddingModel {
    ModelRole role = ModelRole::oracle;
    EmbeddingSource source = EmbeddingSource::stored;
    double cost_weight = 2.0;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;

    static EmbeddingModel stored_oracle(double cost_weight = 2.0);
    static EmbeddingModel stored_proxy(double cost_weight = 1.0);
    static EmbeddingModel simulated_oracle(double cost_weight = 2.0);
    static EmbeddingModel simulated_proxy(double noise_sigma, std::uint64_t noise_seed,
                                          double cost_weight = 1.0);
};

struct CallCounts {
    std::uint64_t oracle_calls = 0;
    std::uint64_t proxy_calls = 0;
    friend bool operator==(const CallCounts&, const CallCounts&) = default;
};

/// Counts embedding-model calls. Each (role, key) pair is charged at most once per ledger.
/// Thread-safe.
class CallLedger {
public:
    /// Memo key for the query target, distinct from every object id.
    static constexpr std::int64_t kQueryTargetKey = -1;

    /// Charges one call unless (role, key) was already charged; returns true when charged.
    bool charge(ModelRole role, std::int64_t key);

    std::uint64_t oracle_calls() const noexcept { return oracle_calls_.load(); }
    std::uint64_t proxy_calls() const noexcept { return proxy_calls_.load(); }
    CallCounts counts() const noexcept { return {oracle_calls(), proxy_calls()}; }

private:
    std::mutex mutex_;
    std::unordered_set<std::int64_t> oracle_seen_;
    std::unordered_set<std::int64_t> proxy_seen_;
    std::atomic<std::uint64_t> oracle_calls_{0};
    std::atomic<std::uint64_t> proxy_calls_{0};
};

/// Embeds object `id` of `ds`, charging `ledger` on first use of the pair.
std::vector<double> embed(const EmbeddingModel& model, const Dataset& ds, ObjectId id,
                          CallLedger& ledger);

/// A query target is either a dataset member or an external feature vector.
using QueryTarget = std::variant<ObjectId, std::vector<double>>;

/// Embeds the query target. Charged under kQueryTargetKey, so a target that is also a
/// sample member is still counted as its own call.
std::vector<double> embed_query(const EmbeddingModel& model, const Dataset& ds,
                                const QueryTarget& target, CallLedger& ledger);

/// Embedding-cost speedup of a sampled run over embedding all of D with the oracle:
/// (ratio * brute_oracle) / (ratio * sprint_oracle + sprint_proxy).
double speedup(std::uint64_t brute_oracle_calls, std::uint64_t sprint_oracle_calls,
               std::uint64_t sprint_proxy_calls, double cost_ratio = 2.0);

}  // namespace aqnn
