#include "qcflow/calculus.hpp"

#include <cmath>

#include "qcflow/sampling.hpp"

namespace qcflow {

JacobianEstimate jacobian(const VectorField& f, const Vec& x, double h) {
    if (!(h > 0)) throw DegenerateInputError("finite-difference step must be > 0");
    const int n = f.dim();
    for (int attempt = 0; attempt <= 4; ++attempt, h *= 0.5) {
        try {
            Mat J(n, n);
            Vec xp = x, xm = x;
            for (int j = 0; j < n; ++j) {
                xp[j] = x[j] + h;
                xm[j] = x[j] - h;
                J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
                xp[j] = x[j];
                xm[j] = x[j];
            }
            if (!J.allFinite())
                throw EvalSingularity("non-finite Jacobian entry");
            return JacobianEstimate{std::move(J), x, h};
        } catch (const EvalSingularity&) {
            if (attempt == 4) throw;
        }
    }
    throw EvalSingularity("jacobian: unreachable");
}

double divergence(const VectorField& f, const Vec& x, double h) {
    return jacobian(f, x, h).matrix.trace();
}

Mat anticonformal_part(const VectorField& f, const Vec& x, double h) {
    const Mat J = jacobian(f, x, h).matrix;
    const int n = f.dim();
    return 0.5 * (J + J.transpose()) -
           (J.trace() / static_cast<double>(n)) * Mat::Identity(n, n);
}

Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x, double h) {
    return jacobian(Y, x, h).matrix * X(x) - jacobian(X, x, h).matrix * Y(x);
}

std::vector<std::pair<double, double>> growth_ratio(const VectorField& f,
                                                    const std::vector<double>& radii,
                                                    int samples_per_radius,
                                                    std::uint64_t seed) {
    if (radii.empty()) throw DegenerateInputError("growth_ratio: empty radius list");
    const int n = f.dim();
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double R = radii[k];
        if (!(R > 1.0))
            throw DegenerateInputError("growth_ratio requires radii > 1");
        double best = 0.0;
        int skipped = 0;
        for (int s = 0; s < samples_per_radius; ++s) {
            Rng rng = Rng::substream(seed ^ (k * 0x51ED2701ULL), static_cast<std::uint64_t>(s));
            Vec x = R * rng.sphere(n);
            try {
                best = std::max(best, f(x).norm() / (R * std::log(R)));
            } catch (const Error&) {
                ++skipped;  // a.e.-defined fields: tolerate isolated singular samples
            }
        }
        if (skipped * 100 > samples_per_radius)
            throw EvalSingularity("growth_ratio: more than 1% singular samples");
        out.emplace_back(R, best);
    }
    return out;
}

}  // namespace qcflow
