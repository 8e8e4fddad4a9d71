#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aqnn/types.hpp"

namespace aqnn {

/// Lower and upper bounds of the target attribute.
struct AttrBounds {
    double lo = 0.0;
    double hi = 0.0;
    /// True when the bounds were computed from the observed values rather than declared.
    bool data_derived = false;

    double range() const noexcept { return hi - lo; }
    friend bool operator==(const AttrBounds&, const AttrBounds&) = default;
};

/// One population member, used for construction and I/O.
struct DataObject {
    ObjectId id = 0;
    double attr = 0.0;
    std::vector<double> features;
    std::optional<std::vector<double>> oracle_embedding;
    std::optional<std::vector<double>> proxy_embedding;

    friend bool operator==(const DataObject&, const DataObject&) = default;
};

/// The population D, stored column-wise. Ids are dense in [0, size()).
///
/// Embeddings are stored per space for all objects or for none. When no embedding is stored,
/// embedding_dim() equals feature_dim() and models compute embeddings from the features.
class Dataset {
public:
    Dataset() = default;

    /// Builds a dataset from objects; ids are re-indexed to their position.
    /// When `bounds` is empty they are taken from the observed attribute range.
    static Dataset from_objects(std::span<const DataObject> objects,
                                std::optional<AttrBounds> bounds = std::nullopt);

    /// Column-wise constructor. `features` is row-major size()*feature_dim;
    /// `oracle`/`proxy` are either empty or row-major size()*embedding_dim.
    Dataset(std::size_t feature_dim, std::size_t embedding_dim, AttrBounds bounds,
            std::vector<double> attrs, std::vector<double> features,
            std::vector<double> oracle = {}, std::vector<double> proxy = {});

    std::size_t size() const noexcept { return attrs_.size(); }
    bool empty() const noexcept { return attrs_.empty(); }
    std::size_t feature_dim() const noexcept { return feature_dim_; }
    std::size_t embedding_dim() const noexcept { return embedding_dim_; }
    const AttrBounds& bounds() const noexcept { return bounds_; }

    double attr(ObjectId id) const;
    std::span<const double> attrs() const noexcept { return attrs_; }
    std::span<const double> features(ObjectId id) const;

    bool has_oracle_embeddings() const noexcept { return !oracle_.empty(); }
    bool has_proxy_embeddings() const noexcept { return !proxy_.empty(); }
    /// Throws DataError naming the object when the embedding is not stored.
    std::span<const double> oracle_embedding(ObjectId id) const;
    std::span<const double> proxy_embedding(ObjectId id) const;

    DataObject object(ObjectId id) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    void check_id(ObjectId id) const;

    std::size_t feature_dim_ = 0;
    std::size_t embedding_dim_ = 0;
    AttrBounds bounds_{};
    std::vector<double> attrs_;
    std::vector<double> features_;
    std::vector<double> oracle_;
    std::vector<double> proxy_;
};

/// Reads the JSON Lines dataset format (optional header line, then one record per line).
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(const Dataset& ds, std::ostream& out);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Stored attribute bounds; throws InvalidArgument for an empty dataset.
AttrBounds attribute_bounds(const Dataset& ds);

struct SyntheticGenConfig {
    std::size_t n_objects = 10000;
    std::size_t embedding_dim = 16;
    std::size_t n_clusters = 10;
    /// Standard deviation of cluster centers around the origin, per coordinate.
    double cluster_spread = 4.0;
    /// Standard deviation of points around their cluster center, per coordinate.
    double cluster_sd = 1.0;
    double proxy_noise_sigma = 0.0;
    double attr_global_mean = 80.0;
    double attr_global_sd = 10.0;
    /// Mean offset applied to the attribute values of cluster 0.
    double attr_neighborhood_shift = 0.0;
    AttrBounds attr_bounds{0.0, 200.0, false};
    std::uint64_t seed = 0;
    /// Store oracle/proxy embeddings on the objects (needed for self-contained files).
    bool materialize_embeddings = true;

    void validate() const;
};

/// Gaussian-mixture latent points become both features and oracle embeddings;
/// proxy = oracle + N(0, proxy_noise_sigma^2 I) with a per-object noise stream.
Dataset generate_synthetic(const SyntheticGenConfig& cfg);

/// Cluster index of each object as produced by generate_synthetic (same draws, no embeddings).
std::vector<std::uint32_t> synthetic_cluster_labels(const SyntheticGenConfig& cfg);

/// Seed of the proxy noise stream for a generator config; a simulated proxy model built with
/// this seed reproduces the materialized proxy embeddings exactly.
std::uint64_t synthetic_proxy_noise_seed(const SyntheticGenConfig& cfg) noexcept;

}  // namespace aqnn
