#include "msgest/pipeline.hpp"

#include "msgest/aggregation.hpp"
#include "msgest/errors.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace msgest {

void SelectorConfig::validate() const {
    lasso.validate();
    gic.validate();
    if (kind == Kind::lasso_fixed && !(lambda >= 0.0)) throw ConfigError("selector lambda must be >= 0");
}

void MethodConfig::validate() const {
    if (m < 1) throw ConfigError("m must be >= 1");
    if (bolasso_B < 1) throw ConfigError("bolasso_B must be >= 1");
    selector.validate();
}

const char* to_string(Method m) noexcept {
    switch (m) {
    case Method::message: return "message";
    case Method::full_data: return "full_data";
    case Method::averaging: return "averaging";
    case Method::geometric_median: return "geometric_median";
    case Method::bolasso: return "bolasso";
    }
    return "message";
}

Method method_from_string(const std::string& s) {
    if (s == "message") return Method::message;
    if (s == "full_data" || s == "full") return Method::full_data;
    if (s == "averaging" || s == "average") return Method::averaging;
    if (s == "geometric_median" || s == "median") return Method::geometric_median;
    if (s == "bolasso") return Method::bolasso;
    throw ConfigError("unknown method '" + s + "'");
}

Selection select_features(const Dataset& d, const SelectorConfig& cfg) {
    const bool logistic = d.task == Task::classification;
    if (cfg.kind == SelectorConfig::Kind::lasso_fixed) {
        FitResult fit = logistic ? logistic_lasso(d, cfg.lambda, cfg.lasso) : lasso_cd(d, cfg.lambda, cfg.lasso);
        return {fit.gamma, std::move(fit)};
    }
    auto path = logistic ? logistic_lasso_path(d, cfg.lasso) : lasso_path(d, cfg.lasso);
    std::vector<InclusionVector> candidates;
    candidates.reserve(path.size() + 1);
    candidates.emplace_back(static_cast<std::size_t>(d.cols()));
    int iterations = 0;
    for (const auto& f : path) {
        candidates.push_back(f.gamma);
        iterations += f.iterations;
    }
    InclusionVector chosen = gic_select(d, candidates, cfg.gic);
    FitResult fit;
    auto it = std::find_if(path.begin(), path.end(), [&](const FitResult& f) { return f.gamma == chosen; });
    if (it != path.end()) fit = *it;
    fit.gamma = chosen;
    fit.iterations = iterations;
    if (it == path.end()) {
        fit.beta.values = Vector::Zero(d.cols());
        fit.converged = true;
    }
    return {std::move(chosen), std::move(fit)};
}

CoefficientVector refit(const Dataset& d, const InclusionVector& gamma) {
    if (d.task == Task::classification) {
        auto fit = logistic_irls(d, gamma);
        if (fit.separated) throw NumericalError("logistic refit hit complete separation");
        if (!fit.converged) throw NumericalError("logistic refit did not converge");
        return fit.beta;
    }
    if (gamma.count() == 0) {
        CoefficientVector c;
        c.values = Vector::Zero(d.cols());
        c.intercept = d.y.mean();
        c.method = "ols";
        return c;
    }
    return ols_fit(d, gamma);
}

std::vector<Index> bootstrap_indices(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    return rows;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_plan(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan) {
    cfg.validate();
    d.validate();
    if (plan.m != cfg.m)
        throw ConfigError("partition plan has m=" + std::to_string(plan.m) + " but config has m=" +
                          std::to_string(cfg.m));
    if (static_cast<Index>(plan.assignment.size()) != d.rows())
        throw ConfigError("partition plan does not cover the dataset rows");
}

template <class Fn>
auto with_subset(int i, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError("subset " + std::to_string(i) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("subset " + std::to_string(i) + ": " + e.what());
    }
}

double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// Per-subset selection followed by a refit on the subset's own model: the
// shared first stage of the averaging and geometric-median comparators.
struct LocalFits {
    std::vector<FitResult> fits;
    double stage_time = 0.0;
};

LocalFits local_select_and_fit(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                               const Executor& exec) {
    const auto rows = plan.subsets();
    LocalFits out;
    out.fits.resize(rows.size());
    std::vector<double> cpu(rows.size(), 0.0);
    exec.parallel_for(rows.size(), [&](std::size_t i) {
        const double t0 = thread_cpu_seconds();
        const int id = static_cast<int>(i);
        with_subset(id, [&] {
            Dataset sub = d.select_rows(rows[i]);
            Selection sel = select_features(sub, cfg.selector);
            FitResult f = std::move(sel.fit);
            f.gamma = sel.gamma;
            f.beta = refit(sub, sel.gamma);
            f.beta.subset_id = id;
            out.fits[i] = std::move(f);
            return 0;
        });
        cpu[i] = thread_cpu_seconds() - t0;
    });
    out.stage_time = max_of(cpu);
    return out;
}

} // namespace

CommLedger communication_cost(const MethodResult& result) {
    CommLedger l;
    const std::int64_t m = result.m;
    const std::int64_t p = result.beta.size();
    switch (result.method) {
    case Method::message:
        l.uplink_bits = m * p;
        l.downlink_bits = m * p;
        l.uplink_floats = m * static_cast<std::int64_t>(result.gamma.count());
        l.rounds = 2;
        break;
    case Method::averaging:
    case Method::geometric_median:
        l.uplink_floats = m * p;
        l.rounds = 1;
        break;
    case Method::full_data:
    case Method::bolasso: break;
    }
    return l;
}

MethodResult run_message(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                         const Executor& exec) {
    check_plan(d, cfg, plan);
    const auto start = Clock::now();
    const auto rows = plan.subsets();
    const std::size_t m = rows.size();
    MethodResult res;
    res.method = Method::message;
    res.m = cfg.m;
    res.per_subset.resize(m);

    std::vector<Dataset> subsets(m);
    std::vector<double> cpu(m, 0.0);

    // Stage 1: local selection, gamma_i sent to the center.
    exec.parallel_for(m, [&](std::size_t i) {
        const double t0 = thread_cpu_seconds();
        with_subset(static_cast<int>(i), [&] {
            subsets[i] = d.select_rows(rows[i]);
            Selection sel = select_features(subsets[i], cfg.selector);
            res.per_subset[i] = std::move(sel.fit);
            res.per_subset[i].gamma = std::move(sel.gamma);
            return 0;
        });
        cpu[i] = thread_cpu_seconds() - t0;
    });
    double wall = max_of(cpu);

    // Center: median model, broadcast back.
    double t0 = thread_cpu_seconds();
    std::vector<InclusionVector> gammas;
    gammas.reserve(m);
    for (const auto& f : res.per_subset) gammas.push_back(f.gamma);
    res.gamma = median_model(gammas);
    res.empty_model = res.gamma.count() == 0;
    wall += thread_cpu_seconds() - t0;

    // Stage 2: local refit on the consensus model.
    std::fill(cpu.begin(), cpu.end(), 0.0);
    exec.parallel_for(m, [&](std::size_t i) {
        const double c0 = thread_cpu_seconds();
        with_subset(static_cast<int>(i), [&] {
            CoefficientVector b = refit(subsets[i], res.gamma);
            b.subset_id = static_cast<int>(i);
            res.per_subset[i].beta = std::move(b);
            return 0;
        });
        cpu[i] = thread_cpu_seconds() - c0;
    });
    wall += max_of(cpu);

    t0 = thread_cpu_seconds();
    std::vector<CoefficientVector> betas;
    betas.reserve(m);
    for (const auto& f : res.per_subset) betas.push_back(f.beta);
    res.beta = average_coefficients(betas);
    if (res.empty_model) res.beta.values.setZero();
    res.beta.method = "message";
    wall += thread_cpu_seconds() - t0;

    res.ledger = communication_cost(res);
    res.wall_time = wall;
    res.elapsed_time = seconds_since(start);
    return res;
}

MethodResult run_full_data(const Dataset& d, const MethodConfig& cfg) {
    cfg.validate();
    d.validate();
    const auto start = Clock::now();
    const double t0 = thread_cpu_seconds();
    MethodResult res;
    res.method = Method::full_data;
    res.m = 1;
    Selection sel = select_features(d, cfg.selector);
    FitResult f = std::move(sel.fit);
    f.gamma = sel.gamma;
    f.beta = refit(d, sel.gamma);
    res.gamma = sel.gamma;
    res.beta = f.beta;
    res.beta.method = "full_data";
    res.empty_model = res.gamma.count() == 0;
    res.per_subset.push_back(std::move(f));
    res.ledger = communication_cost(res);
    res.wall_time = thread_cpu_seconds() - t0;
    res.elapsed_time = seconds_since(start);
    return res;
}

MethodResult run_averaging(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                           const Executor& exec) {
    check_plan(d, cfg, plan);
    const auto start = Clock::now();
    MethodResult res;
    res.method = Method::averaging;
    res.m = cfg.m;
    auto local = local_select_and_fit(d, cfg, plan, exec);
    const double t0 = thread_cpu_seconds();
    std::vector<CoefficientVector> betas;
    for (const auto& f : local.fits) betas.push_back(f.beta);
    res.beta = average_coefficients(betas);
    res.beta.method = "averaging";
    res.gamma = res.beta.support();
    res.empty_model = res.gamma.count() == 0;
    res.per_subset = std::move(local.fits);
    res.ledger = communication_cost(res);
    res.wall_time = local.stage_time + (thread_cpu_seconds() - t0);
    res.elapsed_time = seconds_since(start);
    return res;
}

MethodResult run_geometric_median(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                                  const Executor& exec) {
    check_plan(d, cfg, plan);
    const auto start = Clock::now();
    MethodResult res;
    res.method = Method::geometric_median;
    res.m = cfg.m;
    auto local = local_select_and_fit(d, cfg, plan, exec);
    const double t0 = thread_cpu_seconds();
    std::vector<CoefficientVector> betas;
    for (const auto& f : local.fits) betas.push_back(f.beta);
    res.beta = geometric_median(betas);
    res.gamma = res.beta.support();
    res.empty_model = res.gamma.count() == 0;
    res.per_subset = std::move(local.fits);
    res.ledger = communication_cost(res);
    res.wall_time = local.stage_time + (thread_cpu_seconds() - t0);
    res.elapsed_time = seconds_since(start);
    return res;
}

MethodResult run_bolasso(const Dataset& d, const MethodConfig& cfg, const Executor& exec,
                         const ResampleFn& resample) {
    cfg.validate();
    d.validate();
    const auto start = Clock::now();
    const auto B = static_cast<std::size_t>(cfg.bolasso_B);
    MethodResult res;
    res.method = Method::bolasso;
    res.m = 1;
    res.per_subset.resize(B);
    std::vector<double> cpu(B, 0.0);
    exec.parallel_for(B, [&](std::size_t b) {
        const double t0 = thread_cpu_seconds();
        auto rows = resample(d.rows(), mix_seed(cfg.seed, b));
        Dataset boot = d.select_rows(rows);
        Selection sel = select_features(boot, cfg.selector);
        res.per_subset[b] = std::move(sel.fit);
        res.per_subset[b].gamma = std::move(sel.gamma);
        res.per_subset[b].beta.subset_id = static_cast<int>(b);
        cpu[b] = thread_cpu_seconds() - t0;
    });
    // One machine does every resample.
    double wall = 0.0;
    for (double c : cpu) wall += c;

    const double t0 = thread_cpu_seconds();
    std::vector<InclusionVector> gammas;
    for (const auto& f : res.per_subset) gammas.push_back(f.gamma);
    res.gamma = intersect_models(gammas);
    res.empty_model = res.gamma.count() == 0;
    res.beta = refit(d, res.gamma);
    res.beta.method = "bolasso";
    res.ledger = communication_cost(res);
    res.wall_time = wall + (thread_cpu_seconds() - t0);
    res.elapsed_time = seconds_since(start);
    return res;
}

MethodResult run_method(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                        const Executor& exec) {
    switch (cfg.method) {
    case Method::message: return run_message(d, cfg, plan, exec);
    case Method::full_data: return run_full_data(d, cfg);
    case Method::averaging: return run_averaging(d, cfg, plan, exec);
    case Method::geometric_median: return run_geometric_median(d, cfg, plan, exec);
    case Method::bolasso: return run_bolasso(d, cfg, exec);
    }
    throw ConfigError("unknown method");
}

} // namespace msgest
