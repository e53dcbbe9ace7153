#include "qcflow/plane_field.hpp"

#include <algorithm>
#include <cmath>

#include "qcflow/calculus.hpp"
#include "qcflow/flow.hpp"

namespace qcflow {

PlaneFieldDef::PlaneFieldDef(int n_, int k_, std::vector<VectorField> frame_,
                             DomainBox domain_)
    : n(n_), k(k_), frame(std::move(frame_)), domain(std::move(domain_)) {
    if (!(k >= 1 && k < n))
        throw DegenerateInputError("plane field requires 1 <= k < n");
    if (static_cast<int>(frame.size()) != k)
        throw DegenerateInputError("frame size must equal k");
    for (const VectorField& f : frame)
        if (f.dim() != n)
            throw DegenerateInputError("frame field dimension mismatch");
    if (domain.dim() != n)
        throw DegenerateInputError("plane field domain dimension mismatch");
}

Mat PlaneFieldDef::frame_matrix(const Vec& q) const {
    Mat B(n, k);
    for (int j = 0; j < k; ++j) B.col(j) = frame[static_cast<std::size_t>(j)](q);
    return B;
}

Mat PlaneFieldDef::projector(const Vec& q) const {
    Mat B = frame_matrix(q);
    Eigen::HouseholderQR<Mat> qr(B);
    Mat Q = qr.householderQ() * Mat::Identity(n, k);
    return Q * Q.transpose();
}

namespace {

void combinations(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

double projected_sigma_min(const Mat& B, const std::vector<int>& rows) {
    Mat P(rows.size(), B.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        P.row(static_cast<Eigen::Index>(i)) = B.row(rows[i]);
    Eigen::JacobiSVD<Mat> svd(P);
    return svd.singularValues().minCoeff();
}

}  // namespace

TransverseSplit select_split(const PlaneFieldDef& E, const Vec& p,
                             const ProbeGrid& probe) {
    if (!E.domain.contains(p))
        throw OutOfDomainError("split base point outside plane field domain");
    std::vector<std::vector<int>> subsets;
    combinations(E.n, E.k, subsets);

    const Mat Bp = E.frame_matrix(p);
    double best_sigma = -1.0;
    std::vector<int> best;
    for (const auto& rows : subsets) {
        const double s = projected_sigma_min(Bp, rows);
        if (s > best_sigma) {
            best_sigma = s;
            best = rows;
        }
    }
    if (best_sigma < 1e-6)
        throw DegenerateInputError(
            "no coordinate splitting is transverse (frame degenerate)");

    TransverseSplit split;
    split.tangent = best;
    for (int i = 0; i < E.n; ++i)
        if (std::find(best.begin(), best.end(), i) == best.end())
            split.normal.push_back(i);

    // Margin: min over a small probe grid around p, clipped to the domain.
    DomainBox probe_box(
        Vec((p.array() - probe.half_width).max(E.domain.lo.array())),
        Vec((p.array() + probe.half_width).min(E.domain.hi.array())));
    split.margin = best_sigma;
    for (const Vec& q : make_grid(probe_box, probe.points_per_axis))
        split.margin = std::min(split.margin, projected_sigma_min(E.frame_matrix(q), best));
    return split;
}

BumpFunction::BumpFunction(DomainBox inner, DomainBox outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
    if (inner_.dim() != outer_.dim())
        throw DegenerateInputError("bump inner/outer dimension mismatch");
    for (int i = 0; i < inner_.dim(); ++i)
        if (!(outer_.lo[i] < inner_.lo[i] && inner_.hi[i] < outer_.hi[i]))
            throw DegenerateInputError("bump inner box must be strictly inside outer");
}

namespace {

double cutoff_e(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

/// Smooth profile on the transition parameter t in [1, 2]: 1 at t = 1,
/// 0 at t = 2, C-infinity including at the endpoints.
double bump_profile(double t) {
    const double num = cutoff_e(2.0 - t);
    const double den = num + cutoff_e(t - 1.0);
    return den > 0 ? num / den : 0.0;
}

}  // namespace

double BumpFunction::operator()(const Vec& u) const {
    if (u.size() != inner_.dim())
        throw DegenerateInputError("bump argument dimension mismatch");
    double v = 1.0;
    for (int i = 0; i < u.size(); ++i) {
        const double x = u[i];
        if (x >= inner_.lo[i] && x <= inner_.hi[i]) continue;  // plateau
        if (x <= outer_.lo[i] || x >= outer_.hi[i]) return 0.0;
        const double t = x < inner_.lo[i]
                             ? 1.0 + (inner_.lo[i] - x) / (inner_.lo[i] - outer_.lo[i])
                             : 1.0 + (x - inner_.hi[i]) / (outer_.hi[i] - inner_.hi[i]);
        v *= bump_profile(t);
    }
    return v;
}

BumpFunction make_bump(DomainBox inner, DomainBox outer) {
    return BumpFunction(std::move(inner), std::move(outer));
}

VectorField lift(const PlaneFieldDef& E, const TransverseSplit& split,
                 const VectorField& V, const BumpFunction& beta) {
    if (V.dim() != E.k)
        throw DegenerateInputError("lifted field must live on the tangent coordinates");
    if (!(split.margin >= 1e-6))
        throw DegenerateInputError("transverse split margin below 1e-6");

    auto frame = E;  // copy captured by value; PlaneFieldDef is cheap to share
    auto tangent = split.tangent;
    auto eval = [frame, tangent, V, beta](const Vec& q) -> Vec {
        const int n = frame.n, k = frame.k;
        Vec tq(k);
        for (int i = 0; i < k; ++i) tq[i] = q[tangent[static_cast<std::size_t>(i)]];
        const double b = beta(tq);
        if (b == 0.0) return Vec::Zero(n);
        const Vec v = b * V(tq);
        const Mat B = frame.frame_matrix(q);
        Mat PB(k, k);
        for (int i = 0; i < k; ++i) PB.row(i) = B.row(tangent[static_cast<std::size_t>(i)]);
        Eigen::FullPivLU<Mat> lu(PB);
        if (!lu.isInvertible())
            throw EvalSingularity("projected frame singular inside bump support");
        return B * lu.solve(v);
    };
    return VectorField::callable(E.n, eval, E.domain, "lift");
}

InvolutivityReport involutivity_residual(const PlaneFieldDef& E,
                                         const std::vector<Vec>& grid, double h) {
    InvolutivityReport rep;
    std::vector<double> residuals;
    long attempted = 0, failed = 0;
    for (const Vec& q : grid) {
        try {
            const Mat P = E.projector(q);
            const Mat I = Mat::Identity(E.n, E.n);
            for (int i = 0; i < E.k; ++i) {
                for (int j = i + 1; j < E.k; ++j) {
                    ++attempted;
                    const Vec br = lie_bracket(E.frame[static_cast<std::size_t>(i)],
                                               E.frame[static_cast<std::size_t>(j)], q, h);
                    const double r = ((I - P) * br).norm() / (1.0 + br.norm());
                    residuals.push_back(r);
                    if (r > rep.max_residual) {
                        rep.max_residual = r;
                        rep.worst_point = q;
                    }
                }
            }
        } catch (const Error&) {
            failed += E.k * (E.k - 1) / 2;
            attempted += E.k * (E.k - 1) / 2;
        }
    }
    if (failed * 100 > attempted)
        throw EvalSingularity("involutivity: more than 1% singular grid points");
    if (!residuals.empty()) {
        std::sort(residuals.begin(), residuals.end());
        rep.p99 = residuals[static_cast<std::size_t>(
            0.99 * static_cast<double>(residuals.size() - 1))];
    }
    rep.involutive = rep.p99 <= rep.gate;
    return rep;
}

}  // namespace qcflow
