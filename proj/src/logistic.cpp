#include "msgest/solvers.hpp"

#include "design.hpp"
#include "msgest/errors.hpp"

#include <cmath>

namespace msgest {

using detail::CenteredDesign;
using detail::soft_threshold;

namespace {

inline double softplus(double eta) noexcept {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

inline double sigmoid(double eta) noexcept {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    double e = std::exp(eta);
    return e / (1.0 + e);
}

double mean_nll(const Vector& eta, const Vector& y) {
    double s = 0.0;
    for (Index i = 0; i < eta.size(); ++i) s += softplus(eta[i]) - y[i] * eta[i];
    return s / static_cast<double>(eta.size());
}

void require_classification(const Dataset& d) {
    if (d.task != Task::classification) throw ConfigError("logistic solvers need a classification dataset");
}

// Null deviance 2n * H(ybar).
double null_deviance(const Vector& y) {
    const double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) return 0.0;
    const double n = static_cast<double>(y.size());
    return -2.0 * n * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
}

struct ProxState {
    double b0 = 0.0;
    Vector b;
};

double penalized(const CenteredDesign& X, const ProxState& st, double lambda) {
    Vector eta = (X.xc() * st.b).array() + st.b0;
    return mean_nll(eta, X.y()) + lambda * st.b.lpNorm<1>();
}

// Largest violation of the optimality conditions in standardized units.
double stationarity(const CenteredDesign& X, const ProxState& st, double lambda) {
    Vector eta = (X.xc() * st.b).array() + st.b0;
    Vector resid(eta.size());
    for (Index i = 0; i < eta.size(); ++i) resid[i] = X.y()[i] - sigmoid(eta[i]);
    const double inv_n = 1.0 / static_cast<double>(eta.size());
    double worst = std::abs(resid.sum()) * inv_n;
    Vector grad = X.xc().transpose() * resid * inv_n;
    for (Index j = 0; j < X.p(); ++j) {
        if (!X.usable(j)) continue;
        double v = st.b[j] != 0.0 ? std::abs(grad[j] - lambda * (st.b[j] > 0 ? 1.0 : -1.0))
                                  : std::max(std::abs(grad[j]) - lambda, 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

// Active-set step on the weighted quadratic model: heads for its minimizer on
// the current sign pattern (intercept free), stopping where a coefficient
// reaches zero and dropping it. `r` tracks z - eta throughout.
void weighted_polish(const CenteredDesign& X, const Vector& w, Vector& r, ProxState& nx, double lambda,
                     std::vector<Index> active) {
    const Index n = X.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::erase_if(active, [&](Index j) { return nx.b[j] == 0.0; });
    while (static_cast<Index>(active.size()) + 1 < n) {
        const Index k = static_cast<Index>(active.size());
        Matrix z(n, k + 1);
        z.col(0).setOnes();
        for (Index a = 0; a < k; ++a) z.col(a + 1) = X.xc().col(active[static_cast<std::size_t>(a)]);
        const Matrix zw = z.array().colwise() * w.array();
        const Matrix h = zw.transpose() * z * inv_n;
        Vector g = zw.transpose() * r * inv_n;
        for (Index a = 0; a < k; ++a) g[a + 1] -= lambda * (nx.b[active[static_cast<std::size_t>(a)]] > 0.0 ? 1.0 : -1.0);
        Eigen::LLT<Matrix> llt(h);
        if (llt.info() != Eigen::Success) return;
        const Vector delta = llt.solve(g);
        if (!delta.allFinite()) return;
        double t = 1.0;
        for (Index a = 0; a < k; ++a) {
            const double cur = nx.b[active[static_cast<std::size_t>(a)]], x = cur + delta[a + 1];
            if (x == 0.0 || (x > 0.0) != (cur > 0.0)) t = std::min(t, cur / (cur - x));
        }
        nx.b0 += t * delta[0];
        for (Index a = 0; a < k; ++a) nx.b[active[static_cast<std::size_t>(a)]] += t * delta[a + 1];
        r.noalias() -= t * (z * delta);
        if (t >= 1.0) return;
        for (Index a = 0; a < k; ++a) {
            const Index j = active[static_cast<std::size_t>(a)];
            const double cur = nx.b[j] - t * delta[a + 1], x = cur + delta[a + 1];
            if ((x == 0.0 || (x > 0.0) != (cur > 0.0)) && cur / (cur - x) <= t) {
                r.noalias() += nx.b[j] * X.xc().col(j);
                nx.b[j] = 0.0;
            }
        }
        std::erase_if(active, [&](Index j) { return nx.b[j] == 0.0; });
    }
}

struct ProxInfo {
    int iterations = 0;
    bool converged = false;
};

ProxInfo prox_newton(const CenteredDesign& X, ProxState& st, double lambda, const LassoConfig& cfg) {
    const Index n = X.n(), p = X.p();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inner_tol = std::min(cfg.tol, 1e-8);
    constexpr double kkt_target = 1e-7;
    constexpr int max_outer = 100;
    ProxInfo info;

    Vector w(n), r(n), xw(n);
    Vector a(p);
    std::vector<Index> active;
    double f_old = penalized(X, st, lambda);

    for (int outer = 0; outer < max_outer; ++outer) {
        if (stationarity(X, st, lambda) <= kkt_target) {
            info.converged = true;
            break;
        }
        Vector eta = (X.xc() * st.b).array() + st.b0;
        for (Index i = 0; i < n; ++i) {
            double mu = sigmoid(eta[i]);
            w[i] = std::max(mu * (1.0 - mu), 1e-5);
            r[i] = (X.y()[i] - mu) / w[i];  // z - eta
        }
        const double wsum = w.sum();
        for (Index j = 0; j < p; ++j)
            a[j] = X.usable(j) ? X.xc().col(j).cwiseAbs2().dot(w) * inv_n : 0.0;

        ProxState nx = st;
        auto coord_pass = [&](bool all) {
            double change = 0.0;
            double d0 = r.dot(w) / wsum;
            if (d0 != 0.0) {
                nx.b0 += d0;
                r.array() -= d0;
                change = std::abs(d0);
            }
            auto update = [&](Index j) {
                if (!X.usable(j) || a[j] <= 0.0) return;
                xw = X.xc().col(j).cwiseProduct(w);
                double u = xw.dot(r) * inv_n + a[j] * nx.b[j];
                double nb = soft_threshold(u, lambda) / a[j];
                double delta = nb - nx.b[j];
                if (delta == 0.0) return;
                r.noalias() -= delta * X.xc().col(j);
                nx.b[j] = nb;
                change = std::max(change, std::abs(delta) * std::sqrt(a[j]));
            };
            if (all) {
                for (Index j = 0; j < p; ++j) update(j);
            } else {
                for (Index j : active) update(j);
            }
            return change;
        };

        int sweeps = 0;
        while (sweeps < cfg.max_iter) {
            double c = coord_pass(true);
            ++sweeps;
            if (c < inner_tol) break;
            active.clear();
            for (Index j = 0; j < p; ++j)
                if (nx.b[j] != 0.0) active.push_back(j);
            for (int inner = 0; sweeps < cfg.max_iter; ++inner) {
                ++sweeps;
                if (coord_pass(false) < inner_tol) break;
                if (inner == 1) {
                    weighted_polish(X, w, r, nx, lambda, active);
                    break;
                }
            }
        }
        info.iterations += sweeps;

        // Backtrack on the true objective along the proximal Newton direction.
        ProxState trial = nx;
        double f_new = penalized(X, trial, lambda);
        double t = 1.0;
        for (int h = 0; h < 30 && f_new > f_old + 1e-13 * std::abs(f_old); ++h) {
            t *= 0.5;
            trial.b0 = st.b0 + t * (nx.b0 - st.b0);
            trial.b = st.b + t * (nx.b - st.b);
            f_new = penalized(X, trial, lambda);
        }
        if (f_new > f_old + 1e-13 * std::abs(f_old)) break;
        double step = std::max(std::abs(trial.b0 - st.b0), (trial.b - st.b).cwiseAbs().maxCoeff());
        st = std::move(trial);
        f_old = f_new;
        if (step == 0.0) {
            info.converged = stationarity(X, st, lambda) <= 1e-6;
            break;
        }
    }
    return info;
}

FitResult make_fit(const CenteredDesign& X, const ProxState& st, double lambda, const ProxInfo& info) {
    FitResult r;
    r.beta = X.to_raw(st.b, st.b0);
    r.beta.method = "logistic_lasso";
    r.gamma = InclusionVector::support_of(r.beta.values);
    r.lambda = lambda;
    r.objective = penalized(X, st, lambda);
    r.iterations = info.iterations;
    r.converged = info.converged;
    return r;
}

ProxState null_state(const CenteredDesign& X) {
    ProxState st;
    st.b = Vector::Zero(X.p());
    double ybar = X.y_mean();
    ybar = std::clamp(ybar, 1e-12, 1.0 - 1e-12);
    st.b0 = std::log(ybar / (1.0 - ybar));
    return st;
}

double lambda_max_of(const CenteredDesign& X) {
    double lm = 0.0;
    for (Index j = 0; j < X.p(); ++j)
        if (X.usable(j)) lm = std::max(lm, std::abs(X.xty()[j]));
    return lm;
}

} // namespace

double logistic_lambda_max(const Dataset& d, const LassoConfig& cfg) {
    require_classification(d);
    CenteredDesign X(d, cfg.standardize);
    return lambda_max_of(X);
}

FitResult logistic_lasso(const Dataset& d, double lambda, const LassoConfig& cfg) {
    require_classification(d);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lasso lambda must be finite and >= 0");
    cfg.validate();
    CenteredDesign X(d, cfg.standardize);
    ProxState st = null_state(X);
    auto info = prox_newton(X, st, lambda, cfg);
    return make_fit(X, st, lambda, info);
}

std::vector<FitResult> logistic_lasso_path(const Dataset& d, const LassoConfig& cfg) {
    require_classification(d);
    cfg.validate();
    CenteredDesign X(d, cfg.standardize);
    ProxState st = null_state(X);
    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) {
        double lm = lambda_max_of(X);
        if (lm <= 0.0) return {make_fit(X, st, 0.0, {0, true})};
        grid = log_grid(lm, cfg.n_lambda, cfg.lambda_min_ratio);
    }
    const double dev0 = null_deviance(X.y());
    std::vector<FitResult> path;
    for (double lambda : grid) {
        auto info = prox_newton(X, st, lambda, cfg);
        path.push_back(make_fit(X, st, lambda, info));
        if (!info.converged) break;
        Vector eta = (X.xc() * st.b).array() + st.b0;
        double dev = 2.0 * static_cast<double>(X.n()) * mean_nll(eta, X.y());
        if (dev0 > 0.0 && 1.0 - dev / dev0 >= 0.999) break;
    }
    return path;
}

LogisticFit logistic_irls(const Dataset& d, const InclusionVector& gamma, double tol, int max_iter,
                          bool intercept) {
    require_classification(d);
    d.validate();
    if (static_cast<Index>(gamma.size()) != d.cols()) throw ConfigError("inclusion vector length != p");
    if (!(tol > 0.0) || max_iter < 1) throw ConfigError("logistic_irls needs tol > 0 and max_iter >= 1");
    const auto cols = gamma.indices();
    if (cols.empty() && !intercept) throw ConfigError("logistic_irls needs at least one column");

    const Index n = d.rows();
    const Index k = static_cast<Index>(cols.size()) + (intercept ? 1 : 0);
    Matrix z(n, k);
    Index off = 0;
    if (intercept) z.col(off++).setOnes();
    for (Index c : cols) z.col(off++) = d.x.col(c);
    if (!z.allFinite() || !d.y.allFinite()) throw DataError("dataset contains non-finite values");

    const double inv_n = 1.0 / static_cast<double>(n);
    Vector beta = Vector::Zero(k);
    Vector eta = Vector::Zero(n);
    double nll = mean_nll(eta, d.y);
    Vector mu(n), w(n), score(k);

    LogisticFit fit;
    auto refresh = [&] {
        for (Index i = 0; i < n; ++i) {
            mu[i] = sigmoid(eta[i]);
            w[i] = mu[i] * (1.0 - mu[i]);
        }
        score = z.transpose() * (d.y - mu) * inv_n;
    };
    refresh();

    for (int it = 0; it < max_iter; ++it) {
        if (score.cwiseAbs().maxCoeff() < tol) {
            fit.converged = true;
            break;
        }
        Matrix h = z.transpose() * w.asDiagonal() * z * inv_n;
        Eigen::LDLT<Matrix> ldlt(h);
        if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) {
            if (beta.cwiseAbs().maxCoeff() > 10.0) {
                fit.separated = true;  // Hessian collapsed along a diverging direction
                break;
            }
            throw NumericalError("logistic_irls: singular information matrix");
        }
        Vector step = ldlt.solve(score);
        double t = 1.0;
        Vector trial = beta + step;
        Vector eta_trial = z * trial;
        double nll_trial = mean_nll(eta_trial, d.y);
        int halvings = 0;
        while (nll_trial > nll && halvings < 30) {
            t *= 0.5;
            trial = beta + t * step;
            eta_trial = z * trial;
            nll_trial = mean_nll(eta_trial, d.y);
            ++halvings;
        }
        fit.iterations = it + 1;
        if (nll_trial > nll) break;
        beta = std::move(trial);
        eta = std::move(eta_trial);
        nll = nll_trial;
        refresh();
        if (beta.cwiseAbs().maxCoeff() > 1e3 && score.cwiseAbs().maxCoeff() > 0.0) {
            fit.separated = true;
            break;
        }
    }
    if (!fit.converged && score.cwiseAbs().maxCoeff() < tol) fit.converged = true;
    // Fitted probabilities that reproduce every label mean the likelihood has no
    // finite maximizer, whatever the score says.
    if ((d.y - mu).cwiseAbs().maxCoeff() < 1e-6) fit.separated = true;
    if (fit.separated) fit.converged = false;

    fit.nll = nll;
    fit.max_score = score.cwiseAbs().maxCoeff();
    fit.beta.values = Vector::Zero(d.cols());
    fit.beta.method = "logistic_irls";
    off = 0;
    fit.beta.intercept = intercept ? beta[off++] : 0.0;
    for (Index c : cols) fit.beta.values[c] = beta[off++];
    return fit;
}

} // namespace msgest
