#include "qcflow/chart.hpp"

#include <cmath>
#include <sstream>

#include "qcflow/calculus.hpp"
#include "qcflow/flow.hpp"
#include "qcflow/sampling.hpp"

namespace qcflow {

namespace {

FlowMap lift_flow(const Chart& C, int i) {
    return FlowMap{C.lifted[static_cast<std::size_t>(i)], C.config.rel_tol,
                   C.config.abs_tol, C.config.max_step};
}

double auto_eps0(const PlaneFieldDef& E, const TransverseSplit& split, const Vec& p) {
    // The bump's outer box (side 8 eps0 around pi(p)) must fit inside the
    // domain along the tangent axes; the base offsets p + (0, x_normal)
    // must stay inside along the normal axes.
    double e = std::numeric_limits<double>::infinity();
    for (int i : split.tangent) {
        const double m = std::min(p[i] - E.domain.lo[i], E.domain.hi[i] - p[i]);
        e = std::min(e, m / 4.0);
    }
    for (int i : split.normal) {
        const double m = std::min(p[i] - E.domain.lo[i], E.domain.hi[i] - p[i]);
        e = std::min(e, m / 2.0);
    }
    return 0.999 * e;
}

}  // namespace

Chart build_chart(const PlaneFieldDef& E, const Vec& p, const ChartConfig& cfg) {
    Chart C;
    C.p = p;
    C.plane_field = E;
    C.config = cfg;
    C.split = select_split(E, p, cfg.probe);

    C.eps0 = cfg.eps0 > 0 ? cfg.eps0 : auto_eps0(E, C.split, p);
    if (!(C.eps0 > 0))
        throw DegenerateInputError("no room for a chart at this base point");

    const int k = E.k;
    Vec tp(k);
    for (int i = 0; i < k; ++i) tp[i] = p[C.split.tangent[static_cast<std::size_t>(i)]];
    DomainBox inner(Vec(tp.array() - 2.0 * C.eps0), Vec(tp.array() + 2.0 * C.eps0));
    DomainBox outer(Vec(tp.array() - 4.0 * C.eps0), Vec(tp.array() + 4.0 * C.eps0));
    C.bump = make_bump(inner, outer);

    for (int i = 0; i < k; ++i) {
        Vec ei = Vec::Zero(k);
        ei[i] = 1.0;
        VectorField V = VectorField::constant(ei, outer);
        C.lifted.push_back(lift(E, C.split, V, *C.bump));
    }

    // Involutivity gate on the lifted frame: sampled pairwise bracket norms.
    if (k >= 2) {
        DomainBox sample_box = E.domain;
        for (int i = 0; i < E.n; ++i) {
            sample_box.lo[i] = std::max(sample_box.lo[i], p[i] - 1.5 * C.eps0);
            sample_box.hi[i] = std::min(sample_box.hi[i], p[i] + 1.5 * C.eps0);
        }
        HaltonBox halton(sample_box);
        double worst = 0.0;
        for (int s = 0; s < cfg.bracket_samples; ++s) {
            const Vec q = halton.point(static_cast<std::uint64_t>(s));
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    worst = std::max(
                        worst, lie_bracket(C.lifted[static_cast<std::size_t>(i)],
                                           C.lifted[static_cast<std::size_t>(j)], q,
                                           cfg.fd_step)
                                   .norm());
        }
        if (worst > cfg.bracket_gate) throw InvolutivityGateError(worst);
    }

    C.eps = injectivity_radius(C, C.eps0);
    return C;
}

Vec chart_forward(const Chart& C, const Vec& x, const std::vector<int>* order) {
    const int n = C.plane_field.n, k = C.plane_field.k;
    if (x.size() != n) throw DegenerateInputError("chart coordinate dimension mismatch");
    Vec q = C.p;
    for (int j = 0; j < n - k; ++j)
        q[C.split.normal[static_cast<std::size_t>(j)]] += x[k + j];
    // Phi composes flow 1 last; with a permutation sigma the composition is
    // phi^{sigma(1)}_{x_{sigma(1)}} o ... applied innermost-first.
    for (int idx = k - 1; idx >= 0; --idx) {
        const int i = order ? (*order)[static_cast<std::size_t>(idx)] : idx;
        if (x[i] != 0.0) q = flow(lift_flow(C, i), q, x[i]);
    }
    return q;
}

Vec chart_inverse(const Chart& C, const Vec& q) {
    const int n = C.plane_field.n, k = C.plane_field.k;
    if (q.size() != n) throw DegenerateInputError("chart point dimension mismatch");
    Vec x = Vec::Zero(n);
    for (int i = 0; i < k; ++i)
        x[i] = q[C.split.tangent[static_cast<std::size_t>(i)]] -
               C.p[C.split.tangent[static_cast<std::size_t>(i)]];
    Vec qp = q;
    for (int i = 0; i < k; ++i)
        if (x[i] != 0.0) qp = flow(lift_flow(C, i), qp, -x[i]);
    for (int j = 0; j < n - k; ++j)
        x[k + j] = qp[C.split.normal[static_cast<std::size_t>(j)]] -
                   C.p[C.split.normal[static_cast<std::size_t>(j)]];
    const double resid = (chart_forward(C, x) - q).norm();
    if (resid > C.config.roundtrip_tol * (1.0 + q.norm()))
        throw OutOfDomainError("point not in chart image (round-trip residual " +
                               std::to_string(resid) + ")");
    return x;
}

namespace {

bool injectivity_test(const Chart& C, double eps) {
    const int n = C.plane_field.n;
    const std::vector<Vec> grid = make_grid(DomainBox::cube(n, eps),
                                            C.config.injectivity_grid);
    std::vector<Vec> images;
    images.reserve(grid.size());
    try {
        for (const Vec& x : grid) images.push_back(chart_forward(C, x));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec xi = chart_inverse(C, images[i]);
            if ((xi - grid[i]).norm() > C.config.roundtrip_tol * (1.0 + grid[i].norm()))
                return false;
        }
    } catch (const Error&) {
        return false;  // domain exit or failed round trip at this radius
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j)
            if ((images[i] - images[j]).norm() <
                C.config.bilipschitz * (grid[i] - grid[j]).norm())
                return false;
    return true;
}

}  // namespace

double injectivity_radius(const Chart& C, double eps0) {
    if (injectivity_test(C, eps0)) return eps0;
    double lo = 0.0, hi = eps0, best = 0.0;
    for (int it = 0; it < C.config.bisect_iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (injectivity_test(C, mid)) {
            best = mid;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best < 1e-4)
        throw DegenerateInputError("injectivity radius search collapsed below 1e-4");
    return best;
}

SliceMesh trace_slice(const Chart& C, const Vec& c, int resolution) {
    const int n = C.plane_field.n, k = C.plane_field.k;
    if (c.size() != n - k) throw DegenerateInputError("slice parameter dimension mismatch");
    for (int j = 0; j < c.size(); ++j)
        if (std::abs(c[j]) >= C.eps)
            throw OutOfDomainError("slice parameter outside the chart cube");
    if (resolution < 2) throw DegenerateInputError("slice resolution must be >= 2");

    SliceMesh mesh;
    mesh.c = c;
    mesh.resolution = resolution;
    const double extent = 0.999 * C.eps;
    mesh.mesh_h = 2.0 * extent / (resolution - 1);

    const std::vector<Vec> params = make_grid(DomainBox::cube(k, extent), resolution);
    mesh.params = params;
    mesh.points.reserve(params.size());
    for (const Vec& u : params) {
        Vec x = Vec::Zero(n);
        x.head(k) = u;
        x.tail(n - k) = c;
        mesh.points.push_back(chart_forward(C, x));
    }

    // make_grid iterates axis 0 fastest; stride of axis d is resolution^d.
    std::vector<long> stride(static_cast<std::size_t>(k), 1);
    for (int d = 1; d < k; ++d)
        stride[static_cast<std::size_t>(d)] =
            stride[static_cast<std::size_t>(d - 1)] * resolution;

    mesh.residuals.resize(params.size(), 0.0);
    const Mat I = Mat::Identity(n, n);
    for (std::size_t v = 0; v < params.size(); ++v) {
        const Mat P = C.plane_field.projector(mesh.points[v]);
        double worst = 0.0;
        for (int d = 0; d < k; ++d) {
            const long s = stride[static_cast<std::size_t>(d)];
            const long pos = (static_cast<long>(v) / s) % resolution;
            Vec T;
            if (pos > 0 && pos < resolution - 1) {
                T = (mesh.points[v + static_cast<std::size_t>(s)] -
                     mesh.points[v - static_cast<std::size_t>(s)]) /
                    (2.0 * mesh.mesh_h);
            } else if (resolution == 2) {
                // corners only: first-order difference along the edge
                const long nb = pos == 0 ? s : -s;
                T = (pos == 0 ? 1.0 : -1.0) *
                    (mesh.points[static_cast<std::size_t>(static_cast<long>(v) + nb)] -
                     mesh.points[v]) /
                    mesh.mesh_h;
            } else if (pos == 0) {
                T = (-3.0 * mesh.points[v] +
                     4.0 * mesh.points[v + static_cast<std::size_t>(s)] -
                     mesh.points[v + static_cast<std::size_t>(2 * s)]) /
                    (2.0 * mesh.mesh_h);
            } else {
                T = (3.0 * mesh.points[v] -
                     4.0 * mesh.points[v - static_cast<std::size_t>(s)] +
                     mesh.points[v - static_cast<std::size_t>(2 * s)]) /
                    (2.0 * mesh.mesh_h);
            }
            const double tn = T.norm();
            if (tn > 0) worst = std::max(worst, ((I - P) * T).norm() / tn);
        }
        mesh.residuals[v] = worst;
        mesh.max_residual = std::max(mesh.max_residual, worst);
    }
    return mesh;
}

std::vector<std::pair<double, double>> c1_regularity_probe(
    const Chart& C, const Vec& c, const std::vector<int>& resolutions) {
    std::vector<std::pair<double, double>> out;
    for (int res : resolutions) {
        const SliceMesh mesh = trace_slice(C, c, res);
        out.emplace_back(mesh.mesh_h, mesh.max_residual);
    }
    return out;
}

std::string slice_mesh_csv(const SliceMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    const int k = mesh.params.empty() ? 0 : static_cast<int>(mesh.params[0].size());
    const int n = mesh.points.empty() ? 0 : static_cast<int>(mesh.points[0].size());
    for (int i = 1; i <= k; ++i) out << "u" << i << ",";
    for (int i = 1; i <= n; ++i) out << "x" << i << ",";
    out << "residual\n";
    for (std::size_t v = 0; v < mesh.params.size(); ++v) {
        for (int i = 0; i < k; ++i) out << mesh.params[v][i] << ",";
        for (int i = 0; i < n; ++i) out << mesh.points[v][i] << ",";
        out << mesh.residuals[v] << "\n";
    }
    return out.str();
}

}  // namespace qcflow
