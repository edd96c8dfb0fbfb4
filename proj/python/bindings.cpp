#include "msgest/aggregation.hpp"
#include "msgest/dataset.hpp"
#include "msgest/diagnostics.hpp"
#include "msgest/errors.hpp"
#include "msgest/pipeline.hpp"
#include "msgest/report.hpp"
#include "msgest/solvers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace msgest;

namespace {

Dataset make_dataset(const Matrix& x, const Vector& y, const std::string& task) {
    Dataset d;
    d.x = x;
    d.y = y;
    d.task = task == "classification" ? Task::classification : Task::regression;
    if (task != "classification" && task != "regression") throw ConfigError("task must be regression or classification");
    for (Index j = 0; j < x.cols(); ++j) d.column_names.push_back("x" + std::to_string(j));
    d.validate();
    return d;
}

InclusionVector gamma_from(const std::vector<Index>& support, Index p) {
    for (Index j : support)
        if (j < 0 || j >= p) throw ConfigError("support index out of range");
    return InclusionVector::from_indices(static_cast<std::size_t>(p), support);
}

py::dict fit_dict(const FitResult& f) {
    py::dict out;
    out["beta"] = f.beta.values;
    out["intercept"] = f.beta.intercept;
    out["support"] = f.gamma.indices();
    out["lambda"] = f.lambda;
    out["objective"] = f.objective;
    out["iterations"] = f.iterations;
    out["converged"] = f.converged;
    return out;
}

LassoConfig lasso_config(bool standardize, double tol, int max_iter) {
    LassoConfig c;
    c.standardize = standardize;
    c.tol = tol;
    c.max_iter = max_iter;
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Median selection subset aggregation estimator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "generate_synthetic",
        [](Index n, Index p, Index s, double rho, int kind, std::uint64_t seed) {
            SyntheticConfig cfg;
            cfg.n = n;
            cfg.p = p;
            cfg.s = s;
            cfg.rho = rho;
            if (kind < 1 || kind > 3) throw ConfigError("case must be 1, 2 or 3");
            cfg.kind = static_cast<SyntheticCase>(kind - 1);
            cfg.seed = seed;
            auto [d, truth] = generate_synthetic(cfg);
            py::dict out;
            out["x"] = d.x;
            out["y"] = d.y;
            out["beta"] = truth.beta;
            out["support"] = truth.support;
            return out;
        },
        py::arg("n"), py::arg("p"), py::arg("s") = 3, py::arg("rho") = 0.0, py::arg("case") = 1,
        py::arg("seed") = 1, "Synthetic sparse data; returns x, y, beta and support.");

    m.def(
        "random_partition",
        [](Index n, int parts, std::uint64_t seed) {
            if (parts < 1 || parts > n) throw ConfigError("m must lie in [1, n]");
            return random_partition(n, parts, seed).assignment;
        },
        py::arg("n"), py::arg("m"), py::arg("seed") = 1, "Subset label of every row.");

    m.def(
        "lasso_cd",
        [](const Matrix& x, const Vector& y, double lambda, bool standardize, double tol, int max_iter) {
            return fit_dict(lasso_cd(make_dataset(x, y, "regression"), lambda, lasso_config(standardize, tol, max_iter)));
        },
        py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("standardize") = true, py::arg("tol") = 1e-7,
        py::arg("max_iter") = 10000);

    m.def(
        "lasso_path",
        [](const Matrix& x, const Vector& y, int n_lambda, double lambda_min_ratio, bool standardize) {
            LassoConfig c;
            c.n_lambda = n_lambda;
            c.lambda_min_ratio = lambda_min_ratio;
            c.standardize = standardize;
            py::list out;
            for (const auto& f : lasso_path(make_dataset(x, y, "regression"), c)) out.append(fit_dict(f));
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("n_lambda") = 100, py::arg("lambda_min_ratio") = 1e-3,
        py::arg("standardize") = true);

    m.def(
        "lasso_lambda_max",
        [](const Matrix& x, const Vector& y, bool standardize) {
            return lasso_lambda_max(make_dataset(x, y, "regression"), lasso_config(standardize, 1e-7, 10000));
        },
        py::arg("x"), py::arg("y"), py::arg("standardize") = true);

    m.def(
        "ols_fit",
        [](const Matrix& x, const Vector& y, const std::vector<Index>& support, bool intercept) {
            auto b = ols_fit(make_dataset(x, y, "regression"), gamma_from(support, x.cols()), intercept);
            return py::make_tuple(b.values, b.intercept);
        },
        py::arg("x"), py::arg("y"), py::arg("support"), py::arg("intercept") = true,
        "Least squares on the support; returns (beta, intercept).");

    m.def(
        "logistic_irls",
        [](const Matrix& x, const Vector& y, const std::vector<Index>& support) {
            auto f = logistic_irls(make_dataset(x, y, "classification"), gamma_from(support, x.cols()));
            py::dict out;
            out["beta"] = f.beta.values;
            out["intercept"] = f.beta.intercept;
            out["converged"] = f.converged;
            out["separated"] = f.separated;
            out["iterations"] = f.iterations;
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("support"));

    m.def(
        "median_model",
        [](const std::vector<std::vector<std::uint8_t>>& gammas) {
            std::vector<InclusionVector> g;
            for (const auto& v : gammas) g.emplace_back(v);
            return median_model(g).bits();
        },
        py::arg("gammas"), "Coordinatewise majority vote over 0/1 inclusion vectors.");

    m.def(
        "geometric_median",
        [](const Matrix& points, double tol, int max_iter) {
            return geometric_median(points, GeometricMedianOptions{tol, max_iter});
        },
        py::arg("points"), py::arg("tol") = 1e-9, py::arg("max_iter") = 10000, "Geometric median of the rows.");

    m.def(
        "run_method",
        [](const Matrix& x, const Vector& y, const std::string& method, int parts, std::uint64_t seed,
           const std::string& task, unsigned threads, const std::string& config_json) {
            Json cj = config_json.empty() ? Json::object() : Json::parse(config_json);
            cj["method"] = method;
            cj["m"] = parts;
            cj["seed"] = seed;
            MethodConfig cfg = method_config_from_json(cj);
            cfg.validate();
            Dataset d = make_dataset(x, y, task);
            if (parts > d.rows()) throw ConfigError("m exceeds the number of rows");
            PartitionPlan plan = random_partition(d.rows(), cfg.m, mix_seed(cfg.seed, 0x9a87));
            MethodResult r;
            {
                py::gil_scoped_release release;
                r = run_method(d, cfg, plan, Executor{threads});
            }
            py::dict out;
            out["beta"] = r.beta.values;
            out["intercept"] = r.beta.intercept;
            out["support"] = r.gamma.indices();
            out["empty_model"] = r.empty_model;
            out["ledger"] = py::dict(py::arg("uplink_bits") = r.ledger.uplink_bits,
                                     py::arg("downlink_bits") = r.ledger.downlink_bits,
                                     py::arg("uplink_floats") = r.ledger.uplink_floats,
                                     py::arg("rounds") = r.ledger.rounds);
            out["wall_time"] = r.wall_time;
            out["elapsed_time"] = r.elapsed_time;
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("method") = "message", py::arg("m") = 1, py::arg("seed") = 1,
        py::arg("task") = "regression", py::arg("threads") = 1, py::arg("config_json") = "",
        "Runs message or a comparator. `config_json` holds extra MethodConfig fields.");

    m.def(
        "check_a1",
        [](const Matrix& x, const std::vector<Index>& support) {
            auto a = check_a1(make_dataset(x, Vector::Zero(x.rows()), "regression"), support);
            return py::make_tuple(a.v1_hat, a.v2_hat);
        },
        py::arg("x"), py::arg("support"), "(max column norm^2 / n, min support eigenvalue).");
    m.def(
        "check_a3",
        [](const Matrix& x, const std::vector<Index>& support, const std::vector<double>& signs) {
            return check_a3(make_dataset(x, Vector::Zero(x.rows()), "regression"), support, signs);
        },
        py::arg("x"), py::arg("support"), py::arg("signs"), "Irrepresentable statistic.");
    m.def(
        "check_a4",
        [](const Matrix& x, Index s) { return check_a4(make_dataset(x, Vector::Zero(x.rows()), "regression"), s); },
        py::arg("x"), py::arg("s"), "Minimum eigenvalue over all column subsets of size <= s.");
    m.def(
        "precondition_elliptical",
        [](const Matrix& x, const Vector& y) {
            Dataset d = precondition_elliptical(make_dataset(x, y, "regression"));
            return py::make_tuple(d.x, d.y);
        },
        py::arg("x"), py::arg("y"));
}
