#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "aqnn/aggregate.hpp"
#include "aqnn/bounds.hpp"
#include "aqnn/error.hpp"
#include "aqnn/frnn.hpp"
#include "aqnn/harness.hpp"
#include "aqnn/models.hpp"
#include "aqnn/report.hpp"
#include "aqnn/stats.hpp"

namespace py = pybind11;

namespace {

// JSON crosses the boundary as text; the stdlib json module turns it into dicts.
py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(text);
}

py::dict decision_dict(const aqnn::TestDecision& d) {
    py::dict out;
    out["reject_null"] = d.reject_null;
    out["statistic"] = d.statistic;
    out["p_value"] = d.p_value;
    return out;
}

aqnn::Hypothesis hypothesis(const std::string& agg, const std::string& op, double c, double alpha) {
    return {aqnn::parse_aggregation(agg), aqnn::parse_comparison(op), c, alpha};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Aggregation queries over nearest neighbors: sampling, selection and bounds";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<aqnn::Error>(m, "AqnnError");
    py::register_exception<aqnn::InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<aqnn::DataError>(m, "DataError", base.ptr());
    py::register_exception<aqnn::DegenerateQuery>(m, "DegenerateQuery", base.ptr());

    m.def("dist", [](const std::vector<double>& u, const std::vector<double>& v, const std::string& metric) {
        return aqnn::dist(aqnn::parse_metric(metric), u, v);
    }, py::arg("u"), py::arg("v"), py::arg("metric") = "euclidean");

    m.def("prf1", [](std::vector<aqnn::ObjectId> selected, std::vector<aqnn::ObjectId> truth) {
        const auto pr = aqnn::prf1(aqnn::NeighborSet::from_ids(std::move(selected), aqnn::Space::proxy, "input"),
                                   aqnn::NeighborSet::from_ids(std::move(truth), aqnn::Space::oracle, "input"));
        return py::make_tuple(pr.precision, pr.recall, pr.f1);
    }, py::arg("selected"), py::arg("truth"), "Precision, recall and F1 of an id selection.");

    m.def("speedup", &aqnn::speedup, py::arg("brute_oracle_calls"), py::arg("oracle_calls"),
          py::arg("proxy_calls"), py::arg("cost_ratio") = 2.0);

    m.def("aggregate", [](const std::string& agg, const std::vector<double>& values, std::size_t sample_size,
                          std::size_t population_size, bool estimate) {
        return aqnn::aggregate(aqnn::parse_aggregation(agg), values,
                               {sample_size, population_size,
                                estimate ? aqnn::AggregationScope::sample_estimate
                                         : aqnn::AggregationScope::population_truth});
    }, py::arg("agg"), py::arg("values"), py::arg("sample_size") = 1, py::arg("population_size") = 1,
       py::arg("estimate") = true);

    m.def("min_sizes", [](const std::string& agg, const py::kwargs& kw) {
        aqnn::BoundsInput in;
        for (const auto& [key, value] : kw) {
            const auto k = key.cast<std::string>();
            if (k == "alpha") in.alpha = value.cast<double>();
            else if (k == "rho") in.rho = value.cast<double>();
            else if (k == "a") in.a = value.cast<double>();
            else if (k == "b") in.b = value.cast<double>();
            else if (k == "omega_s") in.omega_s = value.cast<double>();
            else if (k == "omega_nn") in.omega_nn = value.cast<double>();
            else if (k == "omega_c") in.omega_c = value.cast<double>();
            else if (k == "lambda_") in.lambda = value.cast<double>();
            else if (k == "population_size") in.population_size = value.cast<std::uint64_t>();
            else if (k == "on_s_size") in.on_s_size = value.cast<std::uint64_t>();
            else if (k == "avg_s_abs") in.avg_s_abs = value.cast<double>();
            else if (k == "on_d_size") in.on_d_size = value.cast<std::uint64_t>();
            else if (k == "sample_size") in.sample_size = value.cast<std::uint64_t>();
            else throw aqnn::InvalidArgument("unknown bounds input '" + k + "'");
        }
        return to_python(aqnn::to_json(aqnn::reconcile_sizes(aqnn::min_sizes(aqnn::parse_aggregation(agg), in))));
    }, py::arg("agg"), "Minimum sample and pilot sizes; keyword names follow the bounds inputs.");

    m.def("t_test", [](const std::vector<double>& values, const std::string& op, double c, double alpha) {
        return decision_dict(aqnn::t_test_one_sample(values, hypothesis("AVG", op, c, alpha)));
    }, py::arg("values"), py::arg("op"), py::arg("c"), py::arg("alpha") = 0.05);

    m.def("z_test", [](double p_hat, std::size_t n, const std::string& op, double c, double alpha) {
        return decision_dict(aqnn::z_test_proportion(p_hat, n, hypothesis("PCT", op, c, alpha)));
    }, py::arg("p_hat"), py::arg("n"), py::arg("op"), py::arg("c"), py::arg("alpha") = 0.05);

    m.def("ht_accuracy", &aqnn::ht_accuracy, py::arg("decisions_est"), py::arg("decisions_true"));

    m.def("generate", [](std::size_t n, std::size_t dim, std::size_t clusters, double proxy_noise,
                         std::uint64_t seed, const std::string& path) {
        aqnn::SyntheticGenConfig cfg;
        cfg.n_objects = n;
        cfg.embedding_dim = dim;
        cfg.n_clusters = clusters;
        cfg.proxy_noise_sigma = proxy_noise;
        cfg.seed = seed;
        aqnn::save_dataset(aqnn::generate_synthetic(cfg), path);
    }, py::arg("n"), py::arg("dim") = 16, py::arg("clusters") = 10, py::arg("proxy_noise") = 0.0,
       py::arg("seed") = 0, py::arg("path"), "Writes a synthetic JSONL dataset.");

    m.def("query", [](const std::string& agg, aqnn::ObjectId target, double radius, std::size_t s,
                      std::size_t s_p, std::optional<std::string> data, std::size_t n, double proxy_noise,
                      std::uint64_t seed) {
        aqnn::DatasetSource src;
        if (data) src.path = *data;
        src.synthetic.n_objects = n;
        src.synthetic.seed = seed;
        src.proxy_noise = proxy_noise;
        const auto pop = aqnn::materialize(src);
        aqnn::SprintConfig sc;
        sc.sample_size = s;
        sc.pilot_size = s_p;
        sc.seed = seed;
        const aqnn::QuerySpec q{target, radius, aqnn::Metric::euclidean, aqnn::parse_aggregation(agg)};
        aqnn::CallLedger ledger;
        const auto out = aqnn::select_neighbors(q, sc, pop.dataset, pop.oracle, pop.proxy, ledger);
        std::vector<double> values;
        for (const auto id : out.result.neighbors.members) values.push_back(pop.dataset.attr(id));
        py::dict d;
        d["estimate"] = aqnn::aggregate(q.agg, values, {s, pop.dataset.size(), aqnn::AggregationScope::sample_estimate});
        d["t_star"] = out.result.t_star;
        d["selected"] = out.result.neighbors.members;
        d["oracle_calls"] = out.calls.oracle_calls;
        d["proxy_calls"] = out.calls.proxy_calls;
        return d;
    }, py::arg("agg"), py::arg("target"), py::arg("radius"), py::arg("s") = 1000, py::arg("s_p") = 600,
       py::arg("data") = py::none(), py::arg("n") = 10000, py::arg("proxy_noise") = 0.0, py::arg("seed") = 0);

    m.def("run_experiment", [](const py::object& config) {
        const auto cfg = aqnn::experiment_config_from_json(from_python(config));
        nlohmann::json report;
        {
            py::gil_scoped_release release;
            report = aqnn::to_json(aqnn::run_experiment(cfg));
        }
        return to_python(report);
    }, py::arg("config"), "Runs an experiment from a config dict and returns the report dict.");
}
