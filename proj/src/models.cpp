#include "aqnn/models.hpp"

#include <string>

#include "aqnn/error.hpp"
#include "aqnn/rng.hpp"

namespace aqnn {

EmbeddingModel EmbeddingModel::stored_oracle(double cost_weight) {
    return {ModelRole::oracle, EmbeddingSource::stored, cost_weight, 0.0, 0};
}

EmbeddingModel EmbeddingModel::stored_proxy(double cost_weight) {
    return {ModelRole::proxy, EmbeddingSource::stored, cost_weight, 0.0, 0};
}

EmbeddingModel EmbeddingModel::simulated_oracle(double cost_weight) {
    return {ModelRole::oracle, EmbeddingSource::simulated, cost_weight, 0.0, 0};
}

EmbeddingModel EmbeddingModel::simulated_proxy(double noise_sigma, std::uint64_t noise_seed,
                                               double cost_weight) {
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("proxy noise sigma must be nonnegative");
    return {ModelRole::proxy, EmbeddingSource::simulated, cost_weight, noise_sigma, noise_seed};
}

bool CallLedger::charge(ModelRole role, std::int64_t key) {
    std::lock_guard lock(mutex_);
    auto& seen = role == ModelRole::oracle ? oracle_seen_ : proxy_seen_;
    if (!seen.insert(key).second) return false;
    (role == ModelRole::oracle ? oracle_calls_ : proxy_calls_).fetch_add(1);
    return true;
}

namespace {

std::vector<double> simulate(const EmbeddingModel& model, std::span<const double> features,
                             std::uint64_t noise_stream) {
    std::vector<double> v(features.begin(), features.end());
    if (model.role == ModelRole::proxy) add_isotropic_noise(v, model.noise_sigma, noise_stream);
    return v;
}

}  // namespace

std::vector<double> embed(const EmbeddingModel& model, const Dataset& ds, ObjectId id,
                          CallLedger& ledger) {
    std::vector<double> v;
    if (model.source == EmbeddingSource::stored) {
        const auto e = model.role == ModelRole::oracle ? ds.oracle_embedding(id) : ds.proxy_embedding(id);
        v.assign(e.begin(), e.end());
    } else {
        v = simulate(model, ds.features(id),
                     derive_seed(model.noise_seed, "object", static_cast<std::uint64_t>(id)));
    }
    ledger.charge(model.role, id);
    return v;
}

std::vector<double> embed_query(const EmbeddingModel& model, const Dataset& ds,
                                const QueryTarget& target, CallLedger& ledger) {
    std::vector<double> v;
    if (const auto* id = std::get_if<ObjectId>(&target)) {
        if (model.source == EmbeddingSource::stored) {
            const auto e = model.role == ModelRole::oracle ? ds.oracle_embedding(*id) : ds.proxy_embedding(*id);
            v.assign(e.begin(), e.end());
        } else {
            v = simulate(model, ds.features(*id),
                         derive_seed(model.noise_seed, "object", static_cast<std::uint64_t>(*id)));
        }
    } else {
        const auto& features = std::get<std::vector<double>>(target);
        if (model.source == EmbeddingSource::stored)
            throw InvalidArgument("an external query vector needs a simulated embedding model");
        if (features.size() != ds.feature_dim())
            throw DataError("query vector has dimension " + std::to_string(features.size()) +
                            ", expected " + std::to_string(ds.feature_dim()));
        v = simulate(model, features, derive_seed(model.noise_seed, "query"));
    }
    ledger.charge(model.role, CallLedger::kQueryTargetKey);
    return v;
}

double speedup(std::uint64_t brute_oracle_calls, std::uint64_t sprint_oracle_calls,
               std::uint64_t sprint_proxy_calls, double cost_ratio) {
    const double denom = cost_ratio * static_cast<double>(sprint_oracle_calls) +
                         static_cast<double>(sprint_proxy_calls);
    if (!(denom > 0.0)) throw InvalidArgument("speedup needs a positive sampled embedding cost");
    return cost_ratio * static_cast<double>(brute_oracle_calls) / denom;
}

}  // namespace aqnn
