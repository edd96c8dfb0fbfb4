#include "msgest/solvers.hpp"

#include "design.hpp"
#include "msgest/errors.hpp"

#include <cmath>

namespace msgest {

using detail::CenteredDesign;
using detail::soft_threshold;

void LassoConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("lasso tol must be > 0");
    if (max_iter < 1) throw ConfigError("lasso max_iter must be >= 1");
    if (lambda_grid.empty()) {
        if (n_lambda < 1) throw ConfigError("lasso n_lambda must be >= 1");
        if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0))
            throw ConfigError("lasso lambda_min_ratio must lie in (0, 1]");
    }
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        if (!(lambda_grid[k] > 0.0)) throw ConfigError("lambda grid values must be positive");
        if (k > 0 && !(lambda_grid[k] < lambda_grid[k - 1]))
            throw ConfigError("lambda grid must be strictly descending");
    }
}

std::vector<double> log_grid(double lambda_max, int k, double ratio) {
    std::vector<double> grid(static_cast<std::size_t>(k));
    if (k == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double step = std::log(ratio) / static_cast<double>(k - 1);
    for (int i = 0; i < k; ++i) grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(step * i);
    grid[0] = lambda_max;
    return grid;
}

namespace {

struct CdState {
    Vector b;  // scaled coefficients
    Vector g;  // xc'(yc - xc b)/n
};

double objective(const CenteredDesign& X, const CdState& st, double lambda) {
    return X.yy() - st.b.dot(X.xty()) - st.b.dot(st.g) + lambda * st.b.lpNorm<1>();
}

void refresh_gradient(CenteredDesign& X, CdState& st) {
    st.g = X.xty();
    for (Index k = 0; k < X.p(); ++k)
        if (st.b[k] != 0.0) st.g.noalias() -= st.b[k] * X.gram_col(k);
}

// One pass over `coords`; returns the largest change in standardized units.
template <class Coords>
double sweep(CenteredDesign& X, CdState& st, double lambda, const Coords& coords) {
    double max_change = 0.0;
    const double half = 0.5 * lambda;
    for (Index j : coords) {
        if (!X.usable(j)) continue;
        const double dj = X.diag()[j];
        const double old = st.b[j];
        const double u = st.g[j] + dj * old;
        const double nb = soft_threshold(u, half) / dj;
        const double delta = nb - old;
        if (delta == 0.0) continue;
        st.g.noalias() -= delta * X.gram_col(j);
        st.b[j] = nb;
        max_change = std::max(max_change, std::abs(delta) * std::sqrt(dj));
    }
    return max_change;
}

// Active-set step: head for the exact minimizer on the current sign pattern,
// stopping where a coordinate reaches zero, dropping it and retrying. Each move
// stays inside the orthant, so the objective never increases.
bool polish(CenteredDesign& X, CdState& st, double lambda, std::vector<Index> active) {
    std::erase_if(active, [&](Index j) { return st.b[j] == 0.0; });
    bool moved = false;
    while (!active.empty() && static_cast<Index>(active.size()) < X.n()) {
        const Index k = static_cast<Index>(active.size());
        Matrix g(k, k);
        Vector rhs(k), cur(k);
        for (Index a = 0; a < k; ++a) {
            const Index j = active[static_cast<std::size_t>(a)];
            const Vector& col = X.gram_col(j);
            for (Index b = 0; b < k; ++b) g(b, a) = col[active[static_cast<std::size_t>(b)]];
            cur[a] = st.b[j];
            rhs[a] = X.xty()[j] - 0.5 * lambda * (cur[a] > 0.0 ? 1.0 : -1.0);
        }
        Eigen::LLT<Matrix> llt(g);
        if (llt.info() != Eigen::Success) break;
        const Vector x = llt.solve(rhs);
        if (!x.allFinite()) break;
        double t = 1.0;
        for (Index a = 0; a < k; ++a)
            if ((x[a] > 0.0) != (cur[a] > 0.0) || x[a] == 0.0) t = std::min(t, cur[a] / (cur[a] - x[a]));
        for (Index a = 0; a < k; ++a) st.b[active[static_cast<std::size_t>(a)]] = cur[a] + t * (x[a] - cur[a]);
        moved = true;
        if (t >= 1.0) break;
        for (Index a = 0; a < k; ++a) {
            const Index j = active[static_cast<std::size_t>(a)];
            if ((x[a] > 0.0) != (cur[a] > 0.0) || x[a] == 0.0)
                if (std::abs(st.b[j]) <= 1e-14 * std::abs(cur[a]) || cur[a] / (cur[a] - x[a]) <= t) st.b[j] = 0.0;
        }
        std::erase_if(active, [&](Index j) { return st.b[j] == 0.0; });
    }
    if (moved) refresh_gradient(X, st);
    return moved;
}

struct SolveInfo {
    int iterations = 0;
    bool converged = false;
};

SolveInfo solve(CenteredDesign& X, CdState& st, double lambda, const LassoConfig& cfg,
                std::vector<double>* trace) {
    SolveInfo info;
    std::vector<Index> all(static_cast<std::size_t>(X.p()));
    for (Index j = 0; j < X.p(); ++j) all[static_cast<std::size_t>(j)] = j;
    std::vector<Index> active;
    const double inner_tol = cfg.tol;

    auto record = [&] {
        if (trace) trace->push_back(objective(X, st, lambda));
    };
    if (trace) trace->push_back(objective(X, st, lambda));

    while (info.iterations < cfg.max_iter) {
        refresh_gradient(X, st);
        double change = sweep(X, st, lambda, all);
        ++info.iterations;
        record();
        if (change < cfg.tol) {
            info.converged = true;
            break;
        }
        active.clear();
        for (Index j = 0; j < X.p(); ++j)
            if (st.b[j] != 0.0) active.push_back(j);
        for (int inner = 0; info.iterations < cfg.max_iter; ++inner) {
            double c = sweep(X, st, lambda, active);
            ++info.iterations;
            record();
            if (c < inner_tol) break;
            if (inner == 1 && polish(X, st, lambda, active)) {
                record();
                break;
            }
        }
    }
    refresh_gradient(X, st);
    return info;
}

FitResult make_result(const CenteredDesign& X, const CdState& st, double lambda, const SolveInfo& info,
                      std::vector<double> trace) {
    FitResult r;
    r.beta = X.to_raw(st.b, X.y_mean());
    r.beta.method = "lasso";
    r.gamma = InclusionVector::support_of(r.beta.values);
    r.lambda = lambda;
    r.objective = objective(X, st, lambda);
    r.iterations = info.iterations;
    r.converged = info.converged;
    r.objective_trace = std::move(trace);
    return r;
}

double lambda_max_of(const CenteredDesign& X) {
    double lm = 0.0;
    for (Index j = 0; j < X.p(); ++j)
        if (X.usable(j)) lm = std::max(lm, 2.0 * std::abs(X.xty()[j]));
    return lm;
}

} // namespace

double lasso_lambda_max(const Dataset& d, const LassoConfig& cfg) {
    CenteredDesign X(d, cfg.standardize);
    return lambda_max_of(X);
}

FitResult lasso_cd(const Dataset& d, double lambda, const LassoConfig& cfg) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lasso lambda must be finite and >= 0");
    cfg.validate();
    CenteredDesign X(d, cfg.standardize);
    CdState st{Vector::Zero(X.p()), X.xty()};
    std::vector<double> trace;
    auto info = solve(X, st, lambda, cfg, cfg.record_trace ? &trace : nullptr);
    return make_result(X, st, lambda, info, std::move(trace));
}

std::vector<FitResult> lasso_path(const Dataset& d, const LassoConfig& cfg) {
    cfg.validate();
    CenteredDesign X(d, cfg.standardize);
    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) {
        double lm = lambda_max_of(X);
        if (lm <= 0.0) {
            CdState st{Vector::Zero(X.p()), X.xty()};
            return {make_result(X, st, 0.0, {0, true}, {})};
        }
        grid = log_grid(lm, cfg.n_lambda, cfg.lambda_min_ratio);
    }
    std::vector<FitResult> path;
    path.reserve(grid.size());
    CdState st{Vector::Zero(X.p()), X.xty()};
    for (double lambda : grid) {
        std::vector<double> trace;
        auto info = solve(X, st, lambda, cfg, cfg.record_trace ? &trace : nullptr);
        path.push_back(make_result(X, st, lambda, info, std::move(trace)));
    }
    return path;
}

} // namespace msgest
