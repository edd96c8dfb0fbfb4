#include "msgest/aggregation.hpp"

#include "msgest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msgest {

namespace {

template <class T, class SizeFn>
void check_lengths(const std::vector<T>& items, SizeFn size_of, const char* what) {
    if (items.empty()) throw ConfigError(std::string(what) + ": empty input list");
    const auto p = size_of(items.front());
    for (const auto& it : items)
        if (size_of(it) != p) throw ConfigError(std::string(what) + ": length mismatch");
}

// Median along the line: the middle point for odd counts, the midpoint of the
// middle pair for even counts.
Vector collinear_median(const Matrix& points, const Vector& origin, const Vector& dir) {
    const Index m = points.rows();
    std::vector<std::pair<double, Index>> proj(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
        proj[static_cast<std::size_t>(i)] = {(points.row(i).transpose() - origin).dot(dir), i};
    std::sort(proj.begin(), proj.end());
    const auto mid = static_cast<std::size_t>(m / 2);
    if (m % 2 == 1) return points.row(proj[mid].second).transpose();
    const Vector a = points.row(proj[mid - 1].second).transpose();
    const Vector b = points.row(proj[mid].second).transpose();
    return 0.5 * (a + b);
}

} // namespace

InclusionVector median_model(const std::vector<InclusionVector>& gammas) {
    check_lengths(gammas, [](const InclusionVector& g) { return g.size(); }, "median_model");
    const std::size_t p = gammas.front().size();
    const std::size_t m = gammas.size();
    InclusionVector out(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t votes = 0;
        for (const auto& g : gammas) votes += g[j] ? 1 : 0;
        out.set(j, 2 * votes > m);
    }
    return out;
}

CoefficientVector average_coefficients(const std::vector<CoefficientVector>& betas) {
    check_lengths(betas, [](const CoefficientVector& b) { return b.size(); }, "average_coefficients");
    CoefficientVector out;
    out.values = Vector::Zero(betas.front().size());
    for (const auto& b : betas) {
        out.values += b.values;
        out.intercept += b.intercept;
    }
    const double m = static_cast<double>(betas.size());
    out.values /= m;
    out.intercept /= m;
    out.method = "average";
    return out;
}

double geometric_median_objective(const Matrix& points, const Vector& z) {
    double s = 0.0;
    for (Index i = 0; i < points.rows(); ++i) s += (points.row(i).transpose() - z).norm();
    return s;
}

Vector geometric_median(const Matrix& points, const GeometricMedianOptions& opts) {
    const Index m = points.rows();
    if (m < 1) throw ConfigError("geometric_median: empty input list");
    if (m == 1) return points.row(0).transpose();

    // Collinearity: every point within a tiny distance of the line through the
    // first point and the point farthest from it.
    const Vector origin = points.row(0).transpose();
    Index far = 0;
    double far_dist = 0.0;
    for (Index i = 1; i < m; ++i) {
        double dist = (points.row(i).transpose() - origin).norm();
        if (dist > far_dist) {
            far_dist = dist;
            far = i;
        }
    }
    if (far_dist == 0.0) return origin;
    const Vector dir = (points.row(far).transpose() - origin) / far_dist;
    bool collinear = true;
    const double line_tol = 1e-12 * std::max(1.0, far_dist);
    for (Index i = 0; i < m && collinear; ++i) {
        Vector v = points.row(i).transpose() - origin;
        collinear = (v - v.dot(dir) * dir).norm() <= line_tol;
    }
    if (collinear) return collinear_median(points, origin, dir);

    Vector z = points.colwise().mean().transpose();
    const double coincide = 1e-12;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vector num = Vector::Zero(z.size());
        Vector pull = Vector::Zero(z.size());
        double den = 0.0;
        double anchor_weight = 0.0;
        for (Index i = 0; i < m; ++i) {
            Vector diff = points.row(i).transpose() - z;
            double dist = diff.norm();
            if (dist < coincide) {
                anchor_weight += 1.0;
                continue;
            }
            num += points.row(i).transpose() / dist;
            pull += diff / dist;
            den += 1.0 / dist;
        }
        Vector next;
        if (anchor_weight == 0.0) {
            next = num / den;
        } else {
            // Vardi-Zhang: stay at the data point when the pull of the others
            // does not exceed its multiplicity.
            double r = pull.norm();
            if (r <= anchor_weight) break;
            Vector t = num / den;
            next = (1.0 - anchor_weight / r) * t + (anchor_weight / r) * z;
        }
        double step = (next - z).norm();
        z = std::move(next);
        if (step < opts.tol) break;
    }

    // The output is never worse than the best input point.
    double obj = geometric_median_objective(points, z);
    for (Index i = 0; i < m; ++i) {
        Vector cand = points.row(i).transpose();
        double o = geometric_median_objective(points, cand);
        if (o < obj) {
            obj = o;
            z = cand;
        }
    }
    return z;
}

CoefficientVector geometric_median(const std::vector<CoefficientVector>& betas,
                                   const GeometricMedianOptions& opts) {
    check_lengths(betas, [](const CoefficientVector& b) { return b.size(); }, "geometric_median");
    const Index p = betas.front().size();
    Matrix points(static_cast<Index>(betas.size()), p + 1);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        auto r = static_cast<Index>(i);
        points(r, 0) = betas[i].intercept;
        points.row(r).tail(p) = betas[i].values.transpose();
    }
    Vector z = geometric_median(points, opts);
    CoefficientVector out;
    out.intercept = z[0];
    out.values = z.tail(p);
    out.method = "geometric_median";
    return out;
}

InclusionVector intersect_models(const std::vector<InclusionVector>& gammas) {
    check_lengths(gammas, [](const InclusionVector& g) { return g.size(); }, "intersect_models");
    InclusionVector out = gammas.front();
    for (const auto& g : gammas)
        for (std::size_t j = 0; j < out.size(); ++j)
            if (!g[j]) out.set(j, false);
    return out;
}

} // namespace msgest
