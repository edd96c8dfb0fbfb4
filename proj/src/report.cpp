#include "msgest/report.hpp"

#include "msgest/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace msgest {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const Json& j) {
    const std::string s = j.get<std::string>();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("bad hex digest '" + s + "'");
    return v;
}

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json indices_json(const InclusionVector& g) {
    Json a = Json::array();
    for (Index j : g.indices()) a.push_back(j);
    return a;
}

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->template get<T>();
}

Json summary_json(const std::map<std::string, MetricSummary>& summary, bool timing) {
    Json out = Json::object();
    for (const auto& name : metric_names()) {
        const bool is_timing = name == "wall_time" || name == "elapsed_time";
        if (is_timing != timing) continue;
        auto it = summary.find(name);
        if (it == summary.end()) continue;
        out[name] = {{"mean", it->second.mean}, {"std_error", it->second.std_error}, {"count", it->second.count}};
    }
    return out;
}

Json score_json(const ReplicateScore& s) {
    Json j;
    if (s.error) {
        j["error"] = *s.error;
    } else {
        j["coef_mse"] = s.coef_mse;
        j["exact_recovery"] = s.exact_recovery;
        j["support_size"] = s.support_size;
        j["empty_model"] = s.empty_model;
        if (s.pred_mse) j["pred_mse"] = *s.pred_mse;
        if (s.accuracy) j["accuracy"] = *s.accuracy;
        j["comm"] = to_json(s.comm);
        j["partition_digest"] = hex64(s.partition_digest);
    }
    j["dataset_digest"] = hex64(s.dataset_digest);
    return j;
}

ReplicateScore score_from_json(const Json& j) {
    ReplicateScore s;
    if (j.contains("error")) s.error = j.at("error").get<std::string>();
    read_opt(j, "coef_mse", s.coef_mse);
    read_opt(j, "exact_recovery", s.exact_recovery);
    read_opt(j, "support_size", s.support_size);
    read_opt(j, "empty_model", s.empty_model);
    if (j.contains("pred_mse")) s.pred_mse = j.at("pred_mse").get<double>();
    if (j.contains("accuracy")) s.accuracy = j.at("accuracy").get<double>();
    if (j.contains("comm")) {
        const Json& c = j.at("comm");
        s.comm.uplink_bits = c.at("uplink_bits").get<std::int64_t>();
        s.comm.downlink_bits = c.at("downlink_bits").get<std::int64_t>();
        s.comm.uplink_floats = c.at("uplink_floats").get<std::int64_t>();
        s.comm.rounds = c.at("rounds").get<std::int64_t>();
    }
    if (j.contains("partition_digest")) s.partition_digest = parse_hex64(j.at("partition_digest"));
    if (j.contains("dataset_digest")) s.dataset_digest = parse_hex64(j.at("dataset_digest"));
    return s;
}

GicPenalty gic_penalty_from_string(const std::string& s) {
    if (s == "ric") return GicPenalty::ric;
    if (s == "ebic") return GicPenalty::ebic;
    if (s == "bic") return GicPenalty::bic;
    if (s == "custom") return GicPenalty::custom;
    throw ConfigError("unknown GIC penalty '" + s + "'");
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

const char* to_string(GicPenalty p) noexcept {
    switch (p) {
    case GicPenalty::ric: return "ric";
    case GicPenalty::ebic: return "ebic";
    case GicPenalty::bic: return "bic";
    case GicPenalty::custom: return "custom";
    }
    return "?";
}

Json to_json(const LassoConfig& c) {
    Json j;
    if (!c.lambda_grid.empty()) j["lambda_grid"] = c.lambda_grid;
    j["n_lambda"] = c.n_lambda;
    j["lambda_min_ratio"] = c.lambda_min_ratio;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["standardize"] = c.standardize;
    return j;
}

Json to_json(const GicConfig& c) {
    Json j;
    j["penalty"] = to_string(c.penalty);
    if (c.penalty == GicPenalty::custom) j["custom_lambda"] = c.custom_lambda;
    return j;
}

Json to_json(const SelectorConfig& c) {
    Json j;
    if (c.kind == SelectorConfig::Kind::lasso_gic) {
        j["kind"] = "lasso_gic";
        j["gic"] = to_json(c.gic);
    } else {
        j["kind"] = "lasso_fixed";
        j["lambda"] = c.lambda;
    }
    j["lasso"] = to_json(c.lasso);
    return j;
}

Json to_json(const MethodConfig& c) {
    Json j;
    j["method"] = to_string(c.method);
    j["m"] = c.m;
    j["seed"] = c.seed;
    j["bolasso_B"] = c.bolasso_B;
    j["selector"] = to_json(c.selector);
    return j;
}

Json to_json(const SyntheticConfig& c) {
    return Json{{"n", c.n}, {"p", c.p}, {"s", c.s}, {"rho", c.rho}, {"case", to_string(c.kind)}, {"seed", c.seed}};
}

Json to_json(const CommLedger& l) {
    return Json{{"uplink_bits", l.uplink_bits},
                {"downlink_bits", l.downlink_bits},
                {"uplink_floats", l.uplink_floats},
                {"rounds", l.rounds}};
}

Json to_json(const ConditionReport& r) {
    Json j;
    j["scope"] = r.per_subset ? "subset" : "full";
    if (r.subset_id) j["subset_id"] = *r.subset_id;
    j["support"] = r.support;
    j["v1_hat"] = r.v1_hat;
    j["v2_hat"] = r.v2_hat;
    j["irrepresentable_stat"] = std::isfinite(r.irrepresentable_stat) ? Json(r.irrepresentable_stat) : Json(nullptr);
    j["eta_hat"] = std::isfinite(r.eta_hat) ? Json(r.eta_hat) : Json(nullptr);
    j["sparse_riesz_rho"] = r.sparse_riesz_rho ? Json(*r.sparse_riesz_rho) : Json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const MethodResult& r, const std::vector<std::string>* column_names, bool include_timing) {
    Json j;
    j["method"] = to_string(r.method);
    j["m"] = r.m;
    j["empty_model"] = r.empty_model;
    j["intercept"] = r.beta.intercept;
    j["beta"] = vector_json(r.beta.values);
    j["selected"] = indices_json(r.gamma);
    if (column_names) {
        Json names = Json::array();
        for (Index k : r.gamma.indices()) names.push_back(column_names->at(static_cast<std::size_t>(k)));
        j["selected_names"] = names;
    }
    j["ledger"] = to_json(r.ledger);
    Json subsets = Json::array();
    for (std::size_t i = 0; i < r.per_subset.size(); ++i) {
        const auto& f = r.per_subset[i];
        subsets.push_back({{"index", i},
                           {"selected", indices_json(f.gamma)},
                           {"lambda", f.lambda},
                           {"iterations", f.iterations},
                           {"converged", f.converged}});
    }
    j["per_subset"] = subsets;
    if (include_timing) {
        j["wall_time"] = r.wall_time;
        j["elapsed_time"] = r.elapsed_time;
    }
    return j;
}

LassoConfig lasso_config_from_json(const Json& j) {
    LassoConfig c;
    read_opt(j, "lambda_grid", c.lambda_grid);
    read_opt(j, "n_lambda", c.n_lambda);
    read_opt(j, "lambda_min_ratio", c.lambda_min_ratio);
    read_opt(j, "tol", c.tol);
    read_opt(j, "max_iter", c.max_iter);
    read_opt(j, "standardize", c.standardize);
    return c;
}

GicConfig gic_config_from_json(const Json& j) {
    GicConfig c;
    if (j.contains("penalty")) c.penalty = gic_penalty_from_string(j.at("penalty").get<std::string>());
    read_opt(j, "custom_lambda", c.custom_lambda);
    return c;
}

SelectorConfig selector_config_from_json(const Json& j) {
    SelectorConfig c;
    if (j.contains("kind")) {
        const auto k = j.at("kind").get<std::string>();
        if (k == "lasso_gic")
            c.kind = SelectorConfig::Kind::lasso_gic;
        else if (k == "lasso_fixed")
            c.kind = SelectorConfig::Kind::lasso_fixed;
        else
            throw ConfigError("unknown selector kind '" + k + "'");
    }
    if (j.contains("gic")) c.gic = gic_config_from_json(j.at("gic"));
    if (j.contains("lasso")) c.lasso = lasso_config_from_json(j.at("lasso"));
    read_opt(j, "lambda", c.lambda);
    return c;
}

MethodConfig method_config_from_json(const Json& j) {
    MethodConfig c;
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    read_opt(j, "m", c.m);
    read_opt(j, "seed", c.seed);
    read_opt(j, "bolasso_B", c.bolasso_B);
    if (j.contains("selector")) c.selector = selector_config_from_json(j.at("selector"));
    return c;
}

SyntheticConfig synthetic_config_from_json(const Json& j) {
    SyntheticConfig c;
    read_opt(j, "n", c.n);
    read_opt(j, "p", c.p);
    read_opt(j, "s", c.s);
    read_opt(j, "rho", c.rho);
    read_opt(j, "seed", c.seed);
    if (j.contains("case")) c.kind = synthetic_case_from_string(j.at("case").get<std::string>());
    return c;
}

Json report_json(const BenchmarkReport& r) {
    Json spec;
    Json grid = Json::array();
    for (const auto& g : r.spec.grid) grid.push_back(to_json(g));
    Json methods = Json::array();
    for (const auto& m : r.spec.methods) methods.push_back(to_json(m));
    spec["grid"] = grid;
    spec["methods"] = methods;
    spec["reps"] = r.spec.reps;
    spec["base_seed"] = r.spec.base_seed;
    spec["subset_size"] = r.spec.subset_size ? Json(*r.spec.subset_size) : Json(nullptr);
    spec["n_test"] = r.spec.n_test;

    Json cells = Json::array();
    for (const auto& cell : r.cells) {
        Json c;
        c["config"] = to_json(cell.config);
        c["m"] = cell.m;
        Json ms = Json::array();
        for (const auto& mc : cell.methods) {
            Json scores = Json::array();
            for (const auto& s : mc.scores) scores.push_back(score_json(s));
            ms.push_back({{"label", mc.label},
                          {"config", to_json(mc.config)},
                          {"summary", summary_json(mc.summary, false)},
                          {"scores", scores}});
        }
        c["methods"] = ms;
        cells.push_back(c);
    }
    return Json{{"spec", spec}, {"partial", r.partial}, {"cells", cells}};
}

Json timing_json(const BenchmarkReport& r) {
    Json cells = Json::array();
    for (const auto& cell : r.cells) {
        Json ms = Json::array();
        for (const auto& mc : cell.methods) {
            Json wall = Json::array(), elapsed = Json::array();
            for (const auto& s : mc.scores) {
                wall.push_back(s.wall_time);
                elapsed.push_back(s.elapsed_time);
            }
            ms.push_back({{"label", mc.label},
                          {"summary", summary_json(mc.summary, true)},
                          {"wall_time", wall},
                          {"elapsed_time", elapsed}});
        }
        cells.push_back({{"n", cell.config.n}, {"m", cell.m}, {"methods", ms}});
    }
    return Json{{"cells", cells}};
}

BenchmarkReport report_from_json(const Json& report, const Json* timing) {
    try {
        BenchmarkReport r;
        const Json& spec = report.at("spec");
        for (const auto& g : spec.at("grid")) r.spec.grid.push_back(synthetic_config_from_json(g));
        for (const auto& m : spec.at("methods")) r.spec.methods.push_back(method_config_from_json(m));
        r.spec.reps = spec.at("reps").get<int>();
        r.spec.base_seed = spec.at("base_seed").get<std::uint64_t>();
        if (!spec.at("subset_size").is_null()) r.spec.subset_size = spec.at("subset_size").get<Index>();
        r.spec.n_test = spec.at("n_test").get<Index>();
        r.partial = report.at("partial").get<bool>();
        for (const auto& cj : report.at("cells")) {
            GridCell cell;
            cell.config = synthetic_config_from_json(cj.at("config"));
            cell.m = cj.at("m").get<int>();
            for (const auto& mj : cj.at("methods")) {
                MethodCell mc;
                mc.label = mj.at("label").get<std::string>();
                mc.config = method_config_from_json(mj.at("config"));
                for (const auto& sj : mj.at("scores")) mc.scores.push_back(score_from_json(sj));
                cell.methods.push_back(std::move(mc));
            }
            r.cells.push_back(std::move(cell));
        }
        if (timing) {
            const Json& tc = timing->at("cells");
            if (tc.size() != r.cells.size()) throw ConfigError("timing file does not match the report");
            for (std::size_t g = 0; g < r.cells.size(); ++g) {
                const Json& tm = tc[g].at("methods");
                if (tm.size() != r.cells[g].methods.size()) throw ConfigError("timing file does not match the report");
                for (std::size_t k = 0; k < tm.size(); ++k) {
                    auto& scores = r.cells[g].methods[k].scores;
                    const Json& wall = tm[k].at("wall_time");
                    const Json& elapsed = tm[k].at("elapsed_time");
                    if (wall.size() != scores.size() || elapsed.size() != scores.size())
                        throw ConfigError("timing file does not match the report");
                    for (std::size_t i = 0; i < scores.size(); ++i) {
                        scores[i].wall_time = wall[i].get<double>();
                        scores[i].elapsed_time = elapsed[i].get<double>();
                    }
                }
            }
        }
        summarize_report(r);
        if (timing == nullptr) {
            for (auto& cell : r.cells)
                for (auto& mc : cell.methods) {
                    mc.summary.erase("wall_time");
                    mc.summary.erase("elapsed_time");
                }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report JSON: ") + e.what());
    }
}

void write_report_csv(const BenchmarkReport& r, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "case,n,p,s,rho,m,method,replicate,coef_mse,exact_recovery,support_size,pred_mse,accuracy,"
           "wall_time,uplink_bits,downlink_bits,uplink_floats,rounds,empty_model,error\n";
    for (const auto& cell : r.cells) {
        for (const auto& mc : cell.methods) {
            for (std::size_t i = 0; i < mc.scores.size(); ++i) {
                const auto& s = mc.scores[i];
                out << to_string(cell.config.kind) << ',' << cell.config.n << ',' << cell.config.p << ','
                    << cell.config.s << ',' << format_number(cell.config.rho) << ',' << mc.config.m << ','
                    << mc.label << ',' << i << ',';
                if (s.error) {
                    std::string msg = *s.error;
                    std::replace(msg.begin(), msg.end(), '"', '\'');
                    out << ",,,,,,,,,,,\"" << msg << "\"\n";
                    continue;
                }
                out << format_number(s.coef_mse) << ',' << (s.exact_recovery ? 1 : 0) << ',' << s.support_size
                    << ',' << (s.pred_mse ? format_number(*s.pred_mse) : "") << ','
                    << (s.accuracy ? format_number(*s.accuracy) : "") << ',' << format_number(s.wall_time) << ','
                    << s.comm.uplink_bits << ',' << s.comm.downlink_bits << ',' << s.comm.uplink_floats << ','
                    << s.comm.rounds << ',' << (s.empty_model ? 1 : 0) << ",\n";
            }
        }
    }
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

void write_metric_svg(const BenchmarkReport& r, const std::string& metric, const std::string& title,
                      const std::filesystem::path& path) {
    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Series> series;
    for (const auto& cell : r.cells) {
        for (const auto& mc : cell.methods) {
            auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == mc.label; });
            if (it == series.end()) {
                series.push_back({mc.label, {}});
                it = std::prev(series.end());
            }
            auto m = mc.summary.find(metric);
            if (m != mc.summary.end() && m->second.count > 0)
                it->points.emplace_back(static_cast<double>(cell.config.n), m->second.mean);
        }
    }
    for (auto& s : series) std::sort(s.points.begin(), s.points.end());

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) {
        x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    }
    if (x1 == x0) x0 -= 1.0, x1 += 1.0;
    y0 = std::min(y0, 0.0);
    if (y1 <= y0) y1 = y0 + 1.0;
    y1 += 0.05 * (y1 - y0);

    const double W = 640, H = 420, L = 80, R = 170, T = 40, B = 50;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
        << "</text>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double yv = y0 + (y1 - y0) * k / 4.0;
        svg << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << tick_label(yv)
            << "</text>\n";
        svg << "<line x1=\"" << L << "\" y1=\"" << py(yv) << "\" x2=\"" << W - R << "\" y2=\"" << py(yv)
            << "\" stroke=\"#ddd\"/>\n";
    }
    std::set<double> xs;
    for (const auto& s : series)
        for (auto [x, y] : s.points) xs.insert(x);
    for (double xv : xs)
        svg << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << tick_label(xv)
            << "</text>\n";
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">n</text>\n";
    svg << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << xml_escape(metric) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = colors[k % std::size(colors)];
        const auto& s = series[k];
        if (!s.points.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (auto [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
            svg << "\"/>\n";
            for (auto [x, y] : s.points)
                svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = T + 16.0 * static_cast<double>(k);
        svg << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 35 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - R + 40 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";

    auto out = open_output(path);
    out << svg.str();
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
    }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

} // namespace msgest
