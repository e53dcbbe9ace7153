#include "qcflow/flow.hpp"

#include <cmath>

namespace qcflow {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200, e6 = 11.0 / 84 - 187.0 / 2100,
                 e7 = -1.0 / 40;

}  // namespace

Vec flow(const FlowMap& F, const Vec& x0, double t) {
    const VectorField& f = F.field;
    if (t == 0.0) {
        (void)f(x0);  // still reject out-of-domain starts
        return x0;
    }
    const double dir = t > 0 ? 1.0 : -1.0;
    const double T = std::abs(t);

    Vec y = x0;
    double s = 0.0;  // elapsed |time|
    Vec k1 = f(y);   // throws if x0 outside the domain

    double h = std::min({F.max_step, T,
                         0.01 * (1.0 + y.norm()) / (1.0 + k1.norm())});
    double err_prev = 1.0;
    const double h_min = 1e-13 * std::max(1.0, T);

    while (s < T) {
        h = std::min(h, T - s);
        bool stage_exit = false;
        Vec y_new, err_vec;
        try {
            const Vec k2 = f(y + dir * h * (a21 * k1));
            const Vec k3 = f(y + dir * h * (a31 * k1 + a32 * k2));
            const Vec k4 = f(y + dir * h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = f(y + dir * h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 =
                f(y + dir * h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            y_new = y + dir * h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = f(y_new);  // also certifies the endpoint is in-domain
            err_vec = dir * h *
                      (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            // PI-controlled acceptance
            double err = 0.0;
            for (int i = 0; i < y.size(); ++i) {
                const double sc =
                    F.abs_tol + F.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                const double r = err_vec[i] / sc;
                err += r * r;
            }
            err = std::sqrt(err / static_cast<double>(y.size()));
            if (err <= 1.0) {
                s += h;
                y = std::move(y_new);
                k1 = k7;
                const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                                   std::pow(err_prev, 0.4 / 5.0);
                err_prev = std::max(err, 1e-10);
                h = std::min(F.max_step, h * std::clamp(fac, 0.2, 5.0));
                continue;
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        } catch (const OutOfDomainError&) {
            stage_exit = true;
            h *= 0.5;
        }
        if (h < h_min) {
            if (stage_exit) throw FlowExitError(dir * s, y);
            throw EvalSingularity("step-size underflow at t = " + std::to_string(dir * s));
        }
    }
    return y;
}

DistortionReport flow_jacobian(const FlowMap& F, const Vec& x0, double t, double h) {
    const int n = F.field.dim();
    DistortionReport rep;
    rep.point = x0;
    rep.time = t;
    rep.jacobian.resize(n, n);
    Vec xp = x0, xm = x0;
    for (int j = 0; j < n; ++j) {
        xp[j] = x0[j] + h;
        xm[j] = x0[j] - h;
        rep.jacobian.col(j) = (flow(F, xp, t) - flow(F, xm, t)) / (2.0 * h);
        xp[j] = x0[j];
        xm[j] = x0[j];
    }
    Eigen::JacobiSVD<Mat> svd(rep.jacobian);
    rep.opnorm = svd.singularValues().maxCoeff();
    rep.min_norm = svd.singularValues().minCoeff();
    rep.det = rep.jacobian.determinant();
    const double ad = std::abs(rep.det);
    rep.singular = ad < 1e-12;
    if (!rep.singular) {
        rep.K_estimate = std::max(std::pow(rep.opnorm, n) / ad,
                                  ad / std::pow(rep.min_norm, n));
    } else {
        rep.K_estimate = std::numeric_limits<double>::infinity();
    }
    return rep;
}

LiouvilleReport liouville_check(const FlowMap& F, const std::vector<Vec>& grid,
                                const std::vector<double>& t_values,
                                double div_bound, double fd_step) {
    constexpr double tol = 1e-3;
    LiouvilleReport rep;
    for (const Vec& x : grid) {
        for (double t : t_values) {
            const DistortionReport d = flow_jacobian(F, x, t, fd_step);
            const double lower = std::exp(-std::abs(t) * div_bound) * (1.0 - tol);
            const double upper = std::exp(std::abs(t) * div_bound) * (1.0 + tol);
            if (!(d.det >= lower && d.det <= upper)) {
                rep.violations.push_back({x, t, d.det, lower, upper});
                rep.pass = false;
            }
        }
    }
    return rep;
}

QcGrowthProfile qc_growth_profile(const FlowMap& F, const std::vector<Vec>& grid,
                                  const std::vector<double>& t_values,
                                  double fd_step) {
    QcGrowthProfile out;
    double num = 0.0, den = 0.0;
    for (double t : t_values) {
        double maxK = 1.0;
        for (const Vec& x : grid)
            maxK = std::max(maxK, flow_jacobian(F, x, t, fd_step).K_estimate);
        out.profile.emplace_back(t, maxK);
        num += std::abs(t) * std::log(maxK);
        den += t * t;
    }
    out.c_fit = den > 0 ? num / den : 0.0;
    double ss = 0.0;
    for (const auto& [t, K] : out.profile) {
        const double r = std::log(K) - out.c_fit * std::abs(t);
        ss += r * r;
    }
    out.fit_residual =
        out.profile.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(out.profile.size()));
    return out;
}

double commutation_defect(const FlowMap& F, const FlowMap& G,
                          const std::vector<Vec>& grid, double s, double t) {
    double defect = 0.0;
    for (const Vec& x : grid) {
        const Vec a = flow(F, flow(G, x, s), t);
        const Vec b = flow(G, flow(F, x, t), s);
        defect = std::max(defect, (a - b).norm());
    }
    return defect;
}

std::vector<std::pair<double, double>> mollification_stability(
    const VectorField& X, const std::vector<double>& eps_list,
    const std::vector<Vec>& grid, double t, double rel_tol, double abs_tol) {
    FlowMap base{X, rel_tol, abs_tol, 0.1};
    std::vector<Vec> ref;
    ref.reserve(grid.size());
    for (const Vec& x : grid) ref.push_back(flow(base, x, t));

    std::vector<std::pair<double, double>> out;
    for (double eps : eps_list) {
        FlowMap smooth{VectorField::mollified(X, eps), rel_tol, abs_tol, 0.1};
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc += (flow(smooth, grid[i], t) - ref[i]).norm();
        out.emplace_back(eps, acc / static_cast<double>(grid.size()));
    }
    return out;
}

std::vector<Vec> make_grid(const DomainBox& box, int points_per_axis, double margin) {
    const int n = box.dim();
    const DomainBox b = margin > 0 ? box.shrunk(margin) : box;
    std::vector<Vec> pts;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        Vec x(n);
        for (int d = 0; d < n; ++d) {
            const double u = points_per_axis == 1
                                 ? 0.5
                                 : static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                       (points_per_axis - 1);
            x[d] = b.lo[d] + u * (b.hi[d] - b.lo[d]);
        }
        pts.push_back(std::move(x));
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == points_per_axis)
            idx[static_cast<std::size_t>(d++)] = 0;
        if (d == n) break;
    }
    return pts;
}

}  // namespace qcflow
