#include "msgest/metrics.hpp"

#include "msgest/errors.hpp"

#include <algorithm>
#include <cmath>

namespace msgest {

ReplicateScore score_replicate(const MethodResult& result, const GroundTruth& truth, const Dataset* test) {
    const Index p = result.beta.size();
    if (truth.beta.size() != p || static_cast<Index>(result.gamma.size()) != p)
        throw DataError("score_replicate: dimension mismatch between result and ground truth");
    ReplicateScore s;
    s.coef_mse = (result.beta.values - truth.beta).squaredNorm();
    s.exact_recovery = result.gamma == truth.inclusion();
    s.wall_time = result.wall_time;
    s.elapsed_time = result.elapsed_time;
    s.comm = result.ledger;
    s.support_size = static_cast<Index>(result.gamma.count());
    s.empty_model = result.empty_model;
    if (test) {
        if (test->cols() != p) throw DataError("score_replicate: test set has the wrong number of columns");
        Vector eta = (test->x * result.beta.values).array() + result.beta.intercept;
        if (test->task == Task::classification) {
            Index hits = 0;
            for (Index i = 0; i < eta.size(); ++i) hits += ((eta[i] > 0.0 ? 1.0 : 0.0) == test->y[i]) ? 1 : 0;
            s.accuracy = static_cast<double>(hits) / static_cast<double>(eta.size());
        } else {
            s.pred_mse = (test->y - eta).squaredNorm() / static_cast<double>(eta.size());
        }
    }
    return s;
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary m;
    m.count = static_cast<int>(values.size());
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
    }
    return m;
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"coef_mse",  "exact_recovery", "support_size", "pred_mse",
                                                   "accuracy",  "wall_time",      "elapsed_time"};
    return names;
}

void MonteCarloSpec::validate() const {
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (grid.empty()) throw ConfigError("Monte Carlo grid is empty");
    if (methods.empty()) throw ConfigError("Monte Carlo method list is empty");
    if (subset_size && *subset_size < 1) throw ConfigError("subset_size must be >= 1");
    if (n_test < 0) throw ConfigError("n_test must be >= 0");
    for (const auto& g : grid) g.validate();
    for (const auto& m : methods) m.validate();
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t grid_index, int rep) noexcept {
    return mix_seed(mix_seed(base_seed, grid_index), static_cast<std::uint64_t>(rep));
}

std::uint64_t partition_digest(const PartitionPlan& plan) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    feed(static_cast<std::uint64_t>(plan.m));
    for (int a : plan.assignment) feed(static_cast<std::uint64_t>(a));
    return h;
}

void summarize_report(BenchmarkReport& report) {
    for (auto& cell : report.cells) {
        for (auto& mc : cell.methods) {
            std::map<std::string, std::vector<double>> cols;
            for (const auto& s : mc.scores) {
                if (s.error) continue;
                cols["coef_mse"].push_back(s.coef_mse);
                cols["exact_recovery"].push_back(s.exact_recovery ? 1.0 : 0.0);
                cols["support_size"].push_back(static_cast<double>(s.support_size));
                if (s.pred_mse) cols["pred_mse"].push_back(*s.pred_mse);
                if (s.accuracy) cols["accuracy"].push_back(*s.accuracy);
                cols["wall_time"].push_back(s.wall_time);
                cols["elapsed_time"].push_back(s.elapsed_time);
            }
            mc.summary.clear();
            for (auto& [name, values] : cols) mc.summary[name] = summarize(values);
        }
    }
}

BenchmarkReport monte_carlo(const MonteCarloSpec& spec, const Executor& exec) {
    spec.validate();
    BenchmarkReport report;
    report.spec = spec;

    std::vector<std::string> labels;
    for (const auto& mcfg : spec.methods) {
        std::string base = to_string(mcfg.method);
        std::string label = base;
        for (int k = 2; std::find(labels.begin(), labels.end(), label) != labels.end(); ++k)
            label = base + "#" + std::to_string(k);
        labels.push_back(label);
    }

    report.cells.resize(spec.grid.size());
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
        auto& cell = report.cells[g];
        cell.config = spec.grid[g];
        cell.m = spec.subset_size ? static_cast<int>(std::max<Index>(1, spec.grid[g].n / *spec.subset_size))
                                  : spec.methods.front().m;
        for (std::size_t k = 0; k < spec.methods.size(); ++k) {
            MethodCell mc;
            mc.label = labels[k];
            mc.config = spec.methods[k];
            if (spec.subset_size) mc.config.m = cell.m;
            mc.scores.resize(static_cast<std::size_t>(spec.reps));
            cell.methods.push_back(std::move(mc));
        }
    }

    const std::size_t reps = static_cast<std::size_t>(spec.reps);
    const std::size_t tasks = spec.grid.size() * reps;
    exec.parallel_for(tasks, [&](std::size_t t) {
        const std::size_t g = t / reps;
        const int r = static_cast<int>(t % reps);
        auto& cell = report.cells[g];
        const std::uint64_t seed = replicate_seed(spec.base_seed, g, r);

        SyntheticConfig cfg = spec.grid[g];
        cfg.seed = seed;
        auto [full, truth] = generate_synthetic(cfg, spec.n_test);
        Dataset train, test;
        if (spec.n_test > 0) {
            std::tie(train, test) = split_train_test(full, spec.grid[g].n);
        } else {
            train = std::move(full);
        }
        const std::uint64_t ddigest = dataset_digest(train);

        std::map<int, PartitionPlan> plans;
        for (auto& mc : cell.methods) {
            auto& score = mc.scores[static_cast<std::size_t>(r)];
            MethodConfig mcfg = mc.config;
            mcfg.seed = mix_seed(seed, mc.config.seed);
            try {
                auto it = plans.find(mcfg.m);
                if (it == plans.end())
                    it = plans.emplace(mcfg.m, random_partition(train.rows(), mcfg.m, mix_seed(seed, 0x9a87))).first;
                MethodResult res = run_method(train, mcfg, it->second, Executor{1});
                score = score_replicate(res, truth, spec.n_test > 0 ? &test : nullptr);
                score.partition_digest = partition_digest(it->second);
            } catch (const Error& e) {
                score = ReplicateScore{};
                score.error = e.what();
            }
            score.dataset_digest = ddigest;
        }
    });

    for (const auto& cell : report.cells)
        for (const auto& mc : cell.methods)
            for (const auto& s : mc.scores)
                if (s.error) report.partial = true;
    summarize_report(report);
    return report;
}

} // namespace msgest
