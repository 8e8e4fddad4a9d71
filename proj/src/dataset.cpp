#include "aqnn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "aqnn/error.hpp"
#include "aqnn/rng.hpp"

namespace aqnn {

using nlohmann::json;

namespace {

AttrBounds observed_bounds(std::span<const double> attrs) {
    const auto [lo, hi] = std::ranges::minmax_element(attrs);
    return {*lo, *hi, true};
}

void check_bounds(const AttrBounds& b, std::span<const double> attrs) {
    if (!(b.lo <= b.hi)) throw DataError("attribute bounds must satisfy a <= b");
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i] < b.lo || attrs[i] > b.hi) {
            throw DataError("attribute value of object " + std::to_string(i) +
                            " lies outside the declared bounds");
        }
    }
}

}  // namespace

Dataset::Dataset(std::size_t feature_dim, std::size_t embedding_dim, AttrBounds bounds,
                 std::vector<double> attrs, std::vector<double> features,
                 std::vector<double> oracle, std::vector<double> proxy)
    : feature_dim_(feature_dim),
      embedding_dim_(embedding_dim),
      bounds_(bounds),
      attrs_(std::move(attrs)),
      features_(std::move(features)),
      oracle_(std::move(oracle)),
      proxy_(std::move(proxy)) {
    const auto n = attrs_.size();
    if (feature_dim_ == 0) throw DataError("feature dimension must be positive");
    if (embedding_dim_ == 0) throw DataError("embedding dimension must be positive");
    if (features_.size() != n * feature_dim_) throw DataError("feature matrix has wrong size");
    if (!oracle_.empty() && oracle_.size() != n * embedding_dim_)
        throw DataError("oracle embedding matrix has wrong size");
    if (!proxy_.empty() && proxy_.size() != n * embedding_dim_)
        throw DataError("proxy embedding matrix has wrong size");
    if (oracle_.empty() && proxy_.empty() && embedding_dim_ != feature_dim_)
        throw DataError("without stored embeddings the embedding dimension must equal the feature dimension");
    if (n > 0) check_bounds(bounds_, attrs_);
}

Dataset Dataset::from_objects(std::span<const DataObject> objects,
                              std::optional<AttrBounds> bounds) {
    if (objects.empty()) throw DataError("empty dataset");
    const std::size_t fdim = objects.front().features.size();
    const bool with_oracle = objects.front().oracle_embedding.has_value();
    const bool with_proxy = objects.front().proxy_embedding.has_value();
    std::size_t edim = fdim;
    if (with_oracle) edim = objects.front().oracle_embedding->size();
    else if (with_proxy) edim = objects.front().proxy_embedding->size();

    std::vector<double> attrs, features, oracle, proxy;
    attrs.reserve(objects.size());
    features.reserve(objects.size() * fdim);
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& o = objects[i];
        const auto where = "object " + std::to_string(i);
        if (o.features.size() != fdim)
            throw DataError(where + ": features have dimension " + std::to_string(o.features.size()) +
                            ", expected " + std::to_string(fdim));
        if (o.oracle_embedding.has_value() != with_oracle || o.proxy_embedding.has_value() != with_proxy)
            throw DataError(where + ": embeddings must be present for all objects or none");
        if (with_oracle && o.oracle_embedding->size() != edim)
            throw DataError(where + ": oracle embedding has dimension " +
                            std::to_string(o.oracle_embedding->size()) + ", expected " + std::to_string(edim));
        if (with_proxy && o.proxy_embedding->size() != edim)
            throw DataError(where + ": proxy embedding has dimension " +
                            std::to_string(o.proxy_embedding->size()) + ", expected " + std::to_string(edim));
        attrs.push_back(o.attr);
        features.insert(features.end(), o.features.begin(), o.features.end());
        if (with_oracle) oracle.insert(oracle.end(), o.oracle_embedding->begin(), o.oracle_embedding->end());
        if (with_proxy) proxy.insert(proxy.end(), o.proxy_embedding->begin(), o.proxy_embedding->end());
    }
    const AttrBounds b = bounds ? *bounds : observed_bounds(attrs);
    return Dataset(fdim, edim, b, std::move(attrs), std::move(features), std::move(oracle),
                   std::move(proxy));
}

void Dataset::check_id(ObjectId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= size())
        throw InvalidArgument("object id " + std::to_string(id) + " out of range");
}

double Dataset::attr(ObjectId id) const {
    check_id(id);
    return attrs_[static_cast<std::size_t>(id)];
}

std::span<const double> Dataset::features(ObjectId id) const {
    check_id(id);
    return {features_.data() + static_cast<std::size_t>(id) * feature_dim_, feature_dim_};
}

std::span<const double> Dataset::oracle_embedding(ObjectId id) const {
    check_id(id);
    if (oracle_.empty())
        throw DataError("object " + std::to_string(id) + " has no stored oracle embedding");
    return {oracle_.data() + static_cast<std::size_t>(id) * embedding_dim_, embedding_dim_};
}

std::span<const double> Dataset::proxy_embedding(ObjectId id) const {
    check_id(id);
    if (proxy_.empty())
        throw DataError("object " + std::to_string(id) + " has no stored proxy embedding");
    return {proxy_.data() + static_cast<std::size_t>(id) * embedding_dim_, embedding_dim_};
}

DataObject Dataset::object(ObjectId id) const {
    DataObject o;
    o.id = id;
    o.attr = attr(id);
    const auto f = features(id);
    o.features.assign(f.begin(), f.end());
    if (has_oracle_embeddings()) {
        const auto e = oracle_embedding(id);
        o.oracle_embedding.emplace(e.begin(), e.end());
    }
    if (has_proxy_embeddings()) {
        const auto e = proxy_embedding(id);
        o.proxy_embedding.emplace(e.begin(), e.end());
    }
    return o;
}

// ---------------------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------------------

namespace {

std::vector<double> number_array(const json& j, const char* field, std::size_t line) {
    const auto it = j.find(field);
    if (it == j.end() || !it->is_array())
        throw DataError("line " + std::to_string(line) + ": field '" + field + "' must be an array");
    std::vector<double> out;
    out.reserve(it->size());
    for (const auto& v : *it) {
        if (!v.is_number())
            throw DataError("line " + std::to_string(line) + ": field '" + field + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
    std::optional<std::size_t> header_fdim, header_edim;
    std::optional<AttrBounds> header_bounds;
    std::vector<DataObject> objects;
    std::set<std::int64_t> seen_ids;
    std::optional<std::size_t> fdim, edim;

    std::string text;
    std::size_t line = 0;
    bool first_content = true;
    while (std::getline(in, text)) {
        ++line;
        if (std::ranges::all_of(text, [](unsigned char c) { return std::isspace(c); })) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw DataError("line " + std::to_string(line) + ": parse error: " + e.what());
        }
        if (!j.is_object()) throw DataError("line " + std::to_string(line) + ": expected a JSON object");

        if (first_content && j.contains("feature_dim")) {
            first_content = false;
            try {
                header_fdim = j.at("feature_dim").get<std::size_t>();
                if (j.contains("embedding_dim")) header_edim = j.at("embedding_dim").get<std::size_t>();
                if (j.contains("attr_bounds")) {
                    const auto& b = j.at("attr_bounds");
                    if (!b.is_array() || b.size() != 2)
                        throw DataError("line " + std::to_string(line) + ": attr_bounds must be [a, b]");
                    header_bounds = AttrBounds{b[0].get<double>(), b[1].get<double>(), false};
                }
            } catch (const json::exception& e) {
                throw DataError("line " + std::to_string(line) + ": bad header: " + e.what());
            }
            fdim = header_fdim;
            edim = header_edim;
            continue;
        }
        first_content = false;

        DataObject o;
        try {
            const auto id = j.at("id").get<std::int64_t>();
            if (!seen_ids.insert(id).second)
                throw DataError("line " + std::to_string(line) + ": duplicate id " + std::to_string(id));
            o.attr = j.at("attr").get<double>();
        } catch (const json::exception& e) {
            throw DataError("line " + std::to_string(line) + ": parse error: " + e.what());
        }
        o.id = static_cast<ObjectId>(objects.size());
        o.features = number_array(j, "features", line);
        if (!fdim) fdim = o.features.size();
        if (o.features.size() != *fdim)
            throw DataError("line " + std::to_string(line) + ": dimension error: features have " +
                            std::to_string(o.features.size()) + " values, expected " + std::to_string(*fdim));
        for (const char* field : {"oracle_emb", "proxy_emb"}) {
            if (!j.contains(field)) continue;
            auto e = number_array(j, field, line);
            if (!edim) edim = e.size();
            if (e.size() != *edim)
                throw DataError("line " + std::to_string(line) + ": dimension error: " + field + " has " +
                                std::to_string(e.size()) + " values, expected " + std::to_string(*edim));
            (std::string_view(field) == "oracle_emb" ? o.oracle_embedding : o.proxy_embedding) = std::move(e);
        }
        objects.push_back(std::move(o));
    }
    if (objects.empty()) throw DataError("empty dataset");
    return Dataset::from_objects(objects, header_bounds);
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");
    return read_dataset(in);
}

void write_dataset(const Dataset& ds, std::ostream& out) {
    json header{{"feature_dim", ds.feature_dim()}, {"embedding_dim", ds.embedding_dim()}};
    if (!ds.bounds().data_derived) header["attr_bounds"] = {ds.bounds().lo, ds.bounds().hi};
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto id = static_cast<ObjectId>(i);
        const auto f = ds.features(id);
        json rec{{"id", id}, {"attr", ds.attr(id)}, {"features", std::vector<double>(f.begin(), f.end())}};
        if (ds.has_oracle_embeddings()) {
            const auto e = ds.oracle_embedding(id);
            rec["oracle_emb"] = std::vector<double>(e.begin(), e.end());
        }
        if (ds.has_proxy_embeddings()) {
            const auto e = ds.proxy_embedding(id);
            rec["proxy_emb"] = std::vector<double>(e.begin(), e.end());
        }
        out << rec.dump() << '\n';
    }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file '" + path.string() + "'");
    write_dataset(ds, out);
}

AttrBounds attribute_bounds(const Dataset& ds) {
    if (ds.empty()) throw InvalidArgument("attribute bounds of an empty dataset");
    return ds.bounds();
}

// ---------------------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------------------

void SyntheticGenConfig::validate() const {
    if (n_objects == 0) throw InvalidArgument("n_objects must be positive");
    if (embedding_dim == 0) throw InvalidArgument("embedding_dim must be positive");
    if (n_clusters == 0) throw InvalidArgument("n_clusters must be positive");
    if (n_clusters > n_objects) throw InvalidArgument("n_clusters must not exceed n_objects");
    if (!(proxy_noise_sigma >= 0.0)) throw InvalidArgument("proxy_noise_sigma must be nonnegative");
    if (!(cluster_sd >= 0.0) || !(cluster_spread >= 0.0))
        throw InvalidArgument("cluster spreads must be nonnegative");
    if (!(attr_global_sd >= 0.0)) throw InvalidArgument("attr_global_sd must be nonnegative");
    if (!(attr_bounds.lo <= attr_bounds.hi)) throw InvalidArgument("attr bounds must satisfy a <= b");
}

std::uint64_t synthetic_proxy_noise_seed(const SyntheticGenConfig& cfg) noexcept {
    return derive_seed(cfg.seed, "synthetic.proxy");
}

namespace {

struct GeneratedPoints {
    std::vector<double> points;
    std::vector<double> attrs;
    std::vector<std::uint32_t> labels;
};

GeneratedPoints generate_points(const SyntheticGenConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_objects;
    const std::size_t dim = cfg.embedding_dim;

    Rng center_rng(derive_seed(cfg.seed, "synthetic.centers"));
    std::normal_distribution<double> center_dist(0.0, cfg.cluster_spread);
    std::vector<double> centers(cfg.n_clusters * dim);
    for (double& c : centers) c = center_dist(center_rng);

    Rng point_rng(derive_seed(cfg.seed, "synthetic.points"));
    Rng attr_rng(derive_seed(cfg.seed, "synthetic.attrs"));
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(cfg.n_clusters - 1));
    std::normal_distribution<double> offset(0.0, cfg.cluster_sd);
    std::normal_distribution<double> attr_dist(cfg.attr_global_mean, cfg.attr_global_sd);

    GeneratedPoints g;
    g.points.resize(n * dim);
    g.attrs.resize(n);
    g.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // The first n_clusters objects seed one cluster each so no cluster is empty.
        const std::uint32_t k = i < cfg.n_clusters ? static_cast<std::uint32_t>(i) : pick(point_rng);
        g.labels[i] = k;
        for (std::size_t d = 0; d < dim; ++d)
            g.points[i * dim + d] = centers[k * dim + d] + offset(point_rng);
        double a = attr_dist(attr_rng);
        if (k == 0) a += cfg.attr_neighborhood_shift;
        g.attrs[i] = std::clamp(a, cfg.attr_bounds.lo, cfg.attr_bounds.hi);
    }
    return g;
}

}  // namespace

Dataset generate_synthetic(const SyntheticGenConfig& cfg) {
    auto g = generate_points(cfg);
    const std::size_t dim = cfg.embedding_dim;
    std::vector<double> oracle, proxy;
    if (cfg.materialize_embeddings) {
        oracle = g.points;
        proxy = g.points;
        const auto noise_seed = synthetic_proxy_noise_seed(cfg);
        for (std::size_t i = 0; i < cfg.n_objects; ++i) {
            add_isotropic_noise(std::span<double>(proxy.data() + i * dim, dim), cfg.proxy_noise_sigma,
                                derive_seed(noise_seed, "object", i));
        }
    }
    return Dataset(dim, dim, cfg.attr_bounds, std::move(g.attrs), std::move(g.points),
                   std::move(oracle), std::move(proxy));
}

std::vector<std::uint32_t> synthetic_cluster_labels(const SyntheticGenConfig& cfg) {
    return generate_points(cfg).labels;
}

}  // namespace aqnn
