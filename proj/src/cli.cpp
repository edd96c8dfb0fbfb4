#include "msgest/cli.hpp"

#include "msgest/dataset.hpp"
#include "msgest/diagnostics.hpp"
#include "msgest/errors.hpp"
#include "msgest/executor.hpp"
#include "msgest/metrics.hpp"
#include "msgest/pipeline.hpp"
#include "msgest/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace msgest {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string config;
    std::string out = ".";
    std::vector<std::string> overrides;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

struct DataOptions {
    std::string data;
    std::string response = "y";
    std::vector<std::string> categorical;
    std::string task = "regression";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--set", o.overrides, "Override a config entry, key.path=value");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = MSGEST_THREADS or all cores)");
    cmd->add_option("--seed", o.seed, "Random seed");
}

void add_data(CLI::App* cmd, DataOptions& o, bool required) {
    auto* d = cmd->add_option("--data", o.data, "Input CSV with a header row");
    if (required) d->required();
    cmd->add_option("--response", o.response, "Response column name");
    cmd->add_option("--categorical", o.categorical, "Columns to dummy code")->delimiter(',');
    cmd->add_option("--task", o.task, "regression or classification")
        ->check(CLI::IsMember({"regression", "classification"}));
}

Task parse_task(const std::string& s) {
    return s == "classification" ? Task::classification : Task::regression;
}

/// `a.b.c=value`; the value is read as JSON when it parses, else as a string.
void apply_overrides(Json& j, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + o + "'");
        std::string key = o.substr(0, eq);
        const std::string raw = o.substr(eq + 1);
        std::string pointer = "/";
        for (char c : key) pointer += c == '.' ? '/' : c;
        Json value;
        try {
            value = Json::parse(raw);
        } catch (const nlohmann::json::exception&) {
            value = raw;
        }
        try {
            j[Json::json_pointer(pointer)] = value;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("cannot apply --set " + o + ": " + e.what());
        }
    }
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    Json j = read_json_file(path);
    if (!j.is_object()) throw ConfigError("config '" + path + "' must hold a JSON object");
    return j;
}

template <class F>
auto parse_config(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

fs::path prepare_out(const std::string& dir) {
    fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + dir + "'");
    return out;
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---- fit ----

struct FitArgs {
    CommonOptions common;
    DataOptions data;
    std::optional<std::string> method;
    std::optional<int> m;
};

std::string fit_summary(const MethodResult& r, const Dataset& d) {
    std::ostringstream s;
    s << "method: " << to_string(r.method) << "\n";
    s << "task: " << to_string(d.task) << "\n";
    s << "rows: " << d.rows() << ", features: " << d.cols() << ", subsets: " << r.m << "\n";
    s << "selected features: " << r.gamma.count() << (r.empty_model ? " (empty model)" : "") << "\n";
    s << "  intercept " << fixed(r.beta.intercept, 10) << "\n";
    for (Index j : r.gamma.indices())
        s << "  " << d.column_names[static_cast<std::size_t>(j)] << " " << fixed(r.beta.values[j], 10) << "\n";
    s << "communication: uplink_bits " << r.ledger.uplink_bits << ", downlink_bits " << r.ledger.downlink_bits
      << ", uplink_floats " << r.ledger.uplink_floats << ", rounds " << r.ledger.rounds << "\n";
    s << "simulated wall time (s): " << fixed(r.wall_time) << "\n";
    s << "elapsed time (s): " << fixed(r.elapsed_time) << "\n";
    return s.str();
}

int cmd_fit(const FitArgs& a) {
    Json cfg_json = load_config(a.common.config);
    if (a.method) cfg_json["method"] = *a.method;
    if (a.m) cfg_json["m"] = *a.m;
    if (a.common.seed) cfg_json["seed"] = *a.common.seed;
    apply_overrides(cfg_json, a.common.overrides);
    MethodConfig cfg = parse_config([&] { return method_config_from_json(cfg_json); });
    cfg.validate();

    Dataset d = load_csv(a.data.data, a.data.response, a.data.categorical, parse_task(a.data.task));
    d.validate();
    if (static_cast<Index>(cfg.m) > d.rows()) throw ConfigError("m exceeds the number of rows");
    const fs::path out = prepare_out(a.common.out);

    Executor exec(a.common.threads);
    PartitionPlan plan = random_partition(d.rows(), cfg.m, mix_seed(cfg.seed, 0x9a87));
    MethodResult r = run_method(d, cfg, plan, exec);

    Json j;
    j["config"] = to_json(cfg);
    j["data"] = {{"path", a.data.data},
                 {"response", a.data.response},
                 {"task", to_string(d.task)},
                 {"rows", d.rows()},
                 {"columns", d.column_names}};
    j["result"] = to_json(r, &d.column_names, true);
    write_json_file(j, out / "result.json");
    std::ofstream summary(out / "summary.txt");
    summary << fit_summary(r, d);
    if (!summary) throw ConfigError("failed writing summary.txt");
    return 0;
}

// ---- simulate / bench ----

struct SimArgs {
    CommonOptions common;
    std::optional<std::string> kind;
    std::optional<double> rho;
    std::optional<int> reps;
    std::string scale = "desk";
    std::vector<std::string> methods;
    std::optional<int> m;
};

Json preset(const std::string& scale) {
    if (scale == "paper")
        return Json{{"case", "case1"}, {"rho", 0.0},          {"p", 1000},   {"s", 3},
                    {"n", {2000, 4000, 6000, 8000, 10000}},   {"reps", 200}, {"subset_size", 400},
                    {"n_test", 2000}, {"base_seed", 1}};
    return Json{{"case", "case1"}, {"rho", 0.0},         {"p", 100},    {"s", 3},
                {"n", {1000, 2000, 4000}},                {"reps", 20},  {"subset_size", 200},
                {"n_test", 2000}, {"base_seed", 1}};
}

/// Accepts "1", "case1".
std::string normalize_case(const std::string& s) { return s.rfind("case", 0) == 0 ? s : "case" + s; }

MonteCarloSpec spec_from_json(const Json& j) {
    return parse_config([&] {
        MonteCarloSpec spec;
        SyntheticConfig base;
        base.kind = synthetic_case_from_string(normalize_case(j.value("case", std::string("case1"))));
        base.rho = j.value("rho", 0.0);
        base.p = j.value("p", Index{100});
        base.s = j.value("s", Index{3});
        const Json& ns = j.at("n");
        if (ns.is_number()) {
            base.n = ns.get<Index>();
            spec.grid.push_back(base);
        } else {
            for (const auto& n : ns) {
                base.n = n.get<Index>();
                spec.grid.push_back(base);
            }
        }
        spec.reps = j.value("reps", 1);
        spec.base_seed = j.value("base_seed", std::uint64_t{1});
        if (j.contains("subset_size") && !j.at("subset_size").is_null())
            spec.subset_size = j.at("subset_size").get<Index>();
        spec.n_test = j.value("n_test", Index{0});
        const Json methods = j.contains("methods")
                                 ? j.at("methods")
                                 : Json::array({"message", "full_data", "averaging", "geometric_median"});
        for (const auto& mj : methods) {
            MethodConfig mc;
            if (mj.is_string()) {
                mc.method = method_from_string(mj.get<std::string>());
            } else {
                mc = method_config_from_json(mj);
            }
            if (j.contains("m")) mc.m = j.at("m").get<int>();
            spec.methods.push_back(mc);
        }
        return spec;
    });
}

int run_benchmark(const Json& spec_json, const CommonOptions& common) {
    MonteCarloSpec spec = spec_from_json(spec_json);
    spec.validate();
    const fs::path out = prepare_out(common.out);
    Executor exec(common.threads);
    BenchmarkReport report = monte_carlo(spec, exec);

    write_json_file(report_json(report), out / "report.json");
    write_json_file(timing_json(report), out / "timing.json");
    write_report_csv(report, out / "report.csv");
    write_metric_svg(report, "coef_mse", "Coefficient MSE", out / "coef_mse.svg");
    write_metric_svg(report, "exact_recovery", "Exact recovery rate", out / "recovery.svg");
    write_metric_svg(report, "wall_time", "Simulated wall time (s)", out / "wall_time.svg");
    if (report.partial) std::cerr << "warning: some replicates failed; see the error fields in report.json\n";
    return 0;
}

int cmd_simulate(const SimArgs& a, bool bench) {
    if (bench && a.common.config.empty()) throw ConfigError("bench needs --config");
    Json j = preset(a.scale);
    j.merge_patch(load_config(a.common.config));
    if (a.kind) j["case"] = normalize_case(*a.kind);
    if (a.rho) j["rho"] = *a.rho;
    if (a.reps) j["reps"] = *a.reps;
    if (a.common.seed) j["base_seed"] = *a.common.seed;
    if (!a.methods.empty()) j["methods"] = a.methods;
    if (a.m) {
        j["m"] = *a.m;
        j["subset_size"] = nullptr;
    }
    apply_overrides(j, a.common.overrides);
    return run_benchmark(j, a.common);
}

// ---- diagnose ----

struct DiagArgs {
    CommonOptions common;
    DataOptions data;
    std::string support;
    bool precondition = false;
    int m = 1;
};

std::vector<Index> parse_support(const std::string& text, const Dataset& d) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        Index j = -1;
        auto it = std::find(d.column_names.begin(), d.column_names.end(), item);
        if (it != d.column_names.end()) {
            j = static_cast<Index>(it - d.column_names.begin());
        } else {
            try {
                std::size_t used = 0;
                j = static_cast<Index>(std::stoll(item, &used));
                if (used != item.size()) j = -1;
            } catch (const std::exception&) {
                j = -1;
            }
        }
        if (j < 0 || j >= d.cols()) throw ConfigError("unknown support column '" + item + "'");
        out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int cmd_diagnose(const DiagArgs& a) {
    Dataset d = load_csv(a.data.data, a.data.response, a.data.categorical, parse_task(a.data.task));
    d.validate();
    if (a.m < 1 || static_cast<Index>(a.m) > d.rows()) throw ConfigError("m must lie in [1, rows]");
    const fs::path out = prepare_out(a.common.out);

    std::vector<Index> support;
    std::string source = "given";
    if (!a.support.empty()) {
        support = parse_support(a.support, d);
    } else {
        MethodConfig cfg;
        cfg.method = Method::full_data;
        support = run_full_data(d, cfg).gamma.indices();
        source = "selected";
    }

    // Signs come from the full-data refit on the support.
    std::vector<double> signs;
    if (!support.empty()) {
        InclusionVector g = InclusionVector::from_indices(static_cast<std::size_t>(d.cols()), support);
        std::vector<double> coef(support.size(), 1.0);
        try {
            CoefficientVector b = refit(d, g);
            for (std::size_t k = 0; k < support.size(); ++k) coef[k] = b.values[support[k]] < 0.0 ? -1.0 : 1.0;
        } catch (const Error& e) {
            std::cerr << "warning: refit on the support failed (" << e.what() << "); using positive signs\n";
        }
        signs = coef;
    }

    auto prepare = [&](const Dataset& part) { return a.precondition ? precondition_elliptical(part) : part; };

    Json j;
    j["data"] = a.data.data;
    j["preconditioned"] = a.precondition;
    j["support_source"] = source;
    Json names = Json::array();
    for (Index k : support) names.push_back(d.column_names[static_cast<std::size_t>(k)]);
    j["support_names"] = names;

    std::vector<std::string> warnings;
    ConditionReport full = diagnose(prepare(d), support, signs, false, std::nullopt);
    for (const auto& w : full.warnings) warnings.push_back("full data: " + w);
    j["full"] = to_json(full);

    Json subsets = Json::array();
    if (a.m > 1) {
        PartitionPlan plan = random_partition(d.rows(), a.m, mix_seed(a.common.seed.value_or(1), 0x9a87));
        std::vector<ConditionReport> reports(static_cast<std::size_t>(a.m));
        Executor exec(a.common.threads);
        exec.parallel_for(reports.size(), [&](std::size_t i) {
            const auto rows = plan.subset(static_cast<int>(i));
            Dataset part = d.select_rows(rows);
            try {
                reports[i] = diagnose(prepare(part), support, signs, true, static_cast<int>(i));
            } catch (const Error& e) {
                reports[i] = ConditionReport{};
                reports[i].per_subset = true;
                reports[i].subset_id = static_cast<int>(i);
                reports[i].support = support;
                reports[i].warnings.push_back(std::string("diagnostics failed: ") + e.what());
            }
        });
        for (const auto& r : reports) {
            for (const auto& w : r.warnings) warnings.push_back("subset " + std::to_string(*r.subset_id) + ": " + w);
            subsets.push_back(to_json(r));
        }
    }
    j["subsets"] = subsets;
    write_json_file(j, out / "conditions.json");
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

// ---- report ----

struct ReportArgs {
    CommonOptions common;
    std::string input;
};

int cmd_report(const ReportArgs& a) {
    fs::path in(a.input);
    fs::path report_path = fs::is_directory(in) ? in / "report.json" : in;
    Json rj = read_json_file(report_path);
    fs::path timing_path = report_path.parent_path() / "timing.json";
    std::optional<Json> tj;
    if (fs::exists(timing_path)) tj = read_json_file(timing_path);
    BenchmarkReport report = report_from_json(rj, tj ? &*tj : nullptr);
    const fs::path out = prepare_out(a.common.out);
    write_report_csv(report, out / "report.csv");
    write_metric_svg(report, "coef_mse", "Coefficient MSE", out / "coef_mse.svg");
    write_metric_svg(report, "exact_recovery", "Exact recovery rate", out / "recovery.svg");
    if (tj) write_metric_svg(report, "wall_time", "Simulated wall time (s)", out / "wall_time.svg");

    std::ostringstream s;
    for (const auto& cell : report.cells) {
        s << to_string(cell.config.kind) << " n=" << cell.config.n << " p=" << cell.config.p
          << " rho=" << cell.config.rho << " m=" << cell.m << "\n";
        for (const auto& mc : cell.methods) {
            s << "  " << mc.label;
            for (const auto& name : metric_names()) {
                auto it = mc.summary.find(name);
                if (it == mc.summary.end()) continue;
                s << "  " << name << "=" << fixed(it->second.mean, 4) << "(" << fixed(it->second.std_error, 2) << ")";
            }
            s << "\n";
        }
    }
    std::ofstream summary(out / "summary.txt");
    summary << s.str();
    std::cout << s.str();
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Median selection subset aggregation estimator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "msgest 0.1.0");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one method on a CSV file");
    add_common(fit_cmd, fit.common);
    add_data(fit_cmd, fit.data, true);
    fit_cmd->add_option("--method", fit.method, "message, full_data, averaging, geometric_median or bolasso");
    fit_cmd->add_option("--m", fit.m, "Number of subsets");

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study on synthetic data");
    add_common(sim_cmd, sim.common);
    sim_cmd->add_option("--case", sim.kind, "1, 2 or 3");
    sim_cmd->add_option("--rho", sim.rho, "Compound-symmetry correlation");
    sim_cmd->add_option("--reps", sim.reps, "Replicates per grid point");
    sim_cmd->add_option("--scale", sim.scale, "desk or paper preset")->check(CLI::IsMember({"desk", "paper"}));
    sim_cmd->add_option("--method", sim.methods, "Methods to compare")->delimiter(',');
    sim_cmd->add_option("--m", sim.m, "Fixed number of subsets (default keeps the subset size fixed)");

    SimArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo study fully described by a config file");
    add_common(bench_cmd, bench.common);
    bench_cmd->add_option("--reps", bench.reps, "Replicates per grid point");
    bench_cmd->add_option("--method", bench.methods, "Methods to compare")->delimiter(',');
    bench_cmd->add_option("--m", bench.m, "Fixed number of subsets");

    DiagArgs diag;
    auto* diag_cmd = app.add_subcommand("diagnose", "Design-condition diagnostics per subset and on the full data");
    add_common(diag_cmd, diag.common);
    add_data(diag_cmd, diag.data, true);
    diag_cmd->add_option("--support", diag.support, "Comma-separated column names or indices");
    diag_cmd->add_flag("--precondition", diag.precondition, "Apply (XX'/p)^{-1/2} first (needs p > n)");
    diag_cmd->add_option("--m", diag.m, "Number of subsets");

    ReportArgs rep;
    auto* rep_cmd = app.add_subcommand("report", "Regenerate CSV, plots and a text summary from report.json");
    add_common(rep_cmd, rep.common);
    rep_cmd->add_option("--input", rep.input, "report.json or the directory holding it")->required();

    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit);
        if (*sim_cmd) return cmd_simulate(sim, false);
        if (*bench_cmd) return cmd_simulate(bench, true);
        if (*diag_cmd) return cmd_diagnose(diag);
        if (*rep_cmd) return cmd_report(rep);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace msgest
