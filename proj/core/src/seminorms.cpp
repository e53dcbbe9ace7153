#include "qcflow/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcflow/calculus.hpp"
#include "qcflow/sampling.hpp"

namespace qcflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_radius(const SamplingConfig& cfg) {
    if (cfg.radii.empty())
        throw DegenerateInputError("sampling config needs at least one radius");
    double r = 0.0;
    for (double v : cfg.radii) {
        if (!(v > 0)) throw DegenerateInputError("radii must be positive");
        r = std::max(r, v);
    }
    return r;
}

DomainBox sampling_box(const VectorField& f, const SamplingConfig& cfg) {
    const double r = max_radius(cfg);
    const DomainBox& d = f.domain();
    for (int i = 0; i < d.dim(); ++i)
        if (d.hi[i] - d.lo[i] <= 2.1 * r)
            throw DegenerateInputError("radius exceeds domain box margin");
    return d.shrunk(r);
}

/// Tracks raw sample values (for the percentile) and the best candidate.
struct Best {
    double value = 0.0;
    Witness witness;
    std::vector<double> samples;
    long attempted = 0;
    long failed = 0;

    void offer(double v, const Vec& x, const Vec& a, const Vec& b) {
        samples.push_back(v);
        if (v > value || witness.x.size() == 0) {
            value = std::max(v, value);
            witness = Witness{x, a, b};
        }
    }

    void check_failures() const {
        if (failed * 100 > attempted)
            throw EvalSingularity("more than 1% of seminorm samples were singular");
    }

    double p99() const {
        if (samples.empty()) return 0.0;
        std::vector<double> s = samples;
        std::sort(s.begin(), s.end());
        return s[static_cast<std::size_t>(0.99 * static_cast<double>(s.size() - 1))];
    }
};

/// Coordinate-wise multiplicative hill climbing around the best sample.
/// `objective` returns -inf on invalid inputs; `project` restores the
/// estimator's constraints (e.g. |a| = |b|) after a perturbation.
template <typename Objective, typename Project>
void refine(std::vector<Vec>& blocks, double& value, int steps,
            const Objective& objective, const Project& project) {
    double ref_scale = 0.0;
    for (const Vec& blk : blocks) ref_scale = std::max(ref_scale, blk.norm());
    if (ref_scale == 0.0) ref_scale = 1.0;
    double s = 0.3;
    for (int t = 0; t < steps; ++t, s *= 0.85) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (int c = 0; c < blocks[b].size(); ++c) {
                const double v0 = blocks[b][c];
                const double trials[4] = {v0 * (1.0 + s), v0 * (1.0 - s),
                                          v0 + s * ref_scale, v0 - s * ref_scale};
                for (double tv : trials) {
                    std::vector<Vec> cand = blocks;
                    cand[b][c] = tv;
                    project(cand);
                    double val = objective(cand);
                    if (val > value) {
                        value = val;
                        blocks = std::move(cand);
                    }
                }
            }
        }
    }
}

/// Shared core of the Zygmund estimator; also serves as the 1-dimensional Q
/// estimator (with b = -a the Q quotient and the Zygmund quotient are the
/// same expression), which makes the paired 1D estimates agree bit-for-bit.
SeminormEstimate second_difference_estimate(const VectorField& f,
                                            const SamplingConfig& cfg,
                                            SeminormKind kind) {
    const int n = f.dim();
    HaltonBox halton(sampling_box(f, cfg));
    Best best;
    for (int i = 0; i < cfg.base_points; ++i) {
        const Vec x = halton.point(static_cast<std::uint64_t>(i));
        Rng rng = Rng::substream(cfg.rng_seed, static_cast<std::uint64_t>(i));
        for (int j = 0; j < cfg.direction_pairs; ++j) {
            const double r = cfg.radii[static_cast<std::size_t>(j) % cfg.radii.size()];
            const Vec a = r * rng.sphere(n);
            const Vec b = r * rng.sphere(n);
            for (const Vec* y : {&a, &b}) {
                ++best.attempted;
                try {
                    best.offer(zygmund_quotient(f, x, *y), x, *y, Vec());
                } catch (const Error&) {
                    ++best.failed;
                }
            }
        }
    }
    best.check_failures();

    std::vector<Vec> blocks = {best.witness.x, best.witness.a};
    auto objective = [&](const std::vector<Vec>& blk) {
        try {
            return zygmund_quotient(f, blk[0], blk[1]);
        } catch (const Error&) {
            return kNegInf;
        }
    };
    double refined = best.value;
    refine(blocks, refined, cfg.refine_steps, objective, [](std::vector<Vec>&) {});

    SeminormEstimate est;
    est.kind = kind;
    est.value = std::max(best.value, refined);
    est.p99 = best.p99();
    est.witness = (refined > best.value) ? Witness{blocks[0], blocks[1], Vec()}
                                         : best.witness;
    if (kind == SeminormKind::Q) est.witness.b = -est.witness.a;
    est.config = cfg;
    return est;
}

}  // namespace

double q_quotient(const VectorField& f, const Vec& x, const Vec& a, const Vec& b) {
    const Vec fx = f(x);
    const double qa = a.dot(f(x + a) - fx) / a.squaredNorm();
    const double qb = b.dot(f(x + b) - fx) / b.squaredNorm();
    return std::abs(qa - qb);
}

double zygmund_quotient(const VectorField& f, const Vec& x, const Vec& y) {
    return (f(x + y) + f(x - y) - 2.0 * f(x)).norm() / y.norm();
}

double lipschitz_quotient(const VectorField& f, const Vec& x, const Vec& y) {
    const double d = (x - y).norm();
    if (d == 0.0) return 0.0;
    return (f(x) - f(y)).norm() / d;
}

SeminormEstimate estimate_q(const VectorField& f, const SamplingConfig& cfg) {
    const int n = f.dim();
    if (n == 1) return second_difference_estimate(f, cfg, SeminormKind::Q);

    HaltonBox halton(sampling_box(f, cfg));
    Best best;
    for (int i = 0; i < cfg.base_points; ++i) {
        const Vec x = halton.point(static_cast<std::uint64_t>(i));
        Rng rng = Rng::substream(cfg.rng_seed, static_cast<std::uint64_t>(i));
        for (int j = 0; j < cfg.direction_pairs; ++j) {
            const double r = cfg.radii[static_cast<std::size_t>(j) % cfg.radii.size()];
            const Vec a = r * rng.sphere(n);
            const Vec b = r * rng.sphere(n);
            // Independent pair plus the antipodal pairs (second-difference
            // configurations are admissible since |-a| = |a|).
            const std::pair<const Vec*, Vec> cands[3] = {
                {&a, b}, {&a, -a}, {&b, -b}};
            for (const auto& [pa, pb] : cands) {
                ++best.attempted;
                try {
                    best.offer(q_quotient(f, x, *pa, pb), x, *pa, pb);
                } catch (const Error&) {
                    ++best.failed;
                }
            }
        }
    }
    best.check_failures();

    std::vector<Vec> blocks = {best.witness.x, best.witness.a, best.witness.b};
    auto project = [](std::vector<Vec>& blk) {
        const double nb = blk[2].norm();
        if (nb > 0) blk[2] *= blk[1].norm() / nb;  // keep |a| = |b|
    };
    auto objective = [&](const std::vector<Vec>& blk) {
        try {
            return q_quotient(f, blk[0], blk[1], blk[2]);
        } catch (const Error&) {
            return kNegInf;
        }
    };
    double refined = best.value;
    refine(blocks, refined, cfg.refine_steps, objective, project);

    SeminormEstimate est;
    est.kind = SeminormKind::Q;
    est.value = std::max(best.value, refined);
    est.p99 = best.p99();
    est.witness = (refined > best.value) ? Witness{blocks[0], blocks[1], blocks[2]}
                                         : best.witness;
    est.config = cfg;
    return est;
}

SeminormEstimate estimate_zygmund(const VectorField& f, const SamplingConfig& cfg) {
    return second_difference_estimate(f, cfg, SeminormKind::Zygmund);
}

SeminormEstimate estimate_lipschitz(const VectorField& f, const SamplingConfig& cfg) {
    const int n = f.dim();
    HaltonBox halton(sampling_box(f, cfg));
    Best best;
    for (int i = 0; i < cfg.base_points; ++i) {
        const Vec x = halton.point(static_cast<std::uint64_t>(i));
        Rng rng = Rng::substream(cfg.rng_seed, static_cast<std::uint64_t>(i));
        for (int j = 0; j < cfg.direction_pairs; ++j) {
            const double r = cfg.radii[static_cast<std::size_t>(j) % cfg.radii.size()];
            const Vec a = r * rng.sphere(n);
            const Vec b = r * rng.sphere(n);
            for (const Vec* d : {&a, &b}) {
                ++best.attempted;
                try {
                    best.offer(lipschitz_quotient(f, x, x + *d), x, x + *d, Vec());
                } catch (const Error&) {
                    ++best.failed;
                }
            }
        }
    }
    best.check_failures();

    std::vector<Vec> blocks = {best.witness.x, best.witness.a};
    auto objective = [&](const std::vector<Vec>& blk) {
        try {
            return lipschitz_quotient(f, blk[0], blk[1]);
        } catch (const Error&) {
            return kNegInf;
        }
    };
    double refined = best.value;
    refine(blocks, refined, cfg.refine_steps, objective, [](std::vector<Vec>&) {});

    SeminormEstimate est;
    est.kind = SeminormKind::Lipschitz;
    est.value = std::max(best.value, refined);
    est.p99 = best.p99();
    est.witness = (refined > best.value) ? Witness{blocks[0], blocks[1], Vec()}
                                         : best.witness;
    est.config = cfg;
    return est;
}

SeminormEstimate estimate_sf_esssup(const VectorField& f, const SamplingConfig& cfg,
                                    double h) {
    const int n = f.dim();
    DomainBox box = sampling_box(f, cfg);
    HaltonBox halton(box);
    auto opnorm_sf = [&](const Vec& x) {
        Mat S = anticonformal_part(f, x, h);
        Eigen::SelfAdjointEigenSolver<Mat> eig(S);
        return eig.eigenvalues().cwiseAbs().maxCoeff();
    };
    (void)n;
    Best best;
    const long total = static_cast<long>(cfg.base_points) * cfg.direction_pairs;
    for (long i = 0; i < total; ++i) {
        const Vec x = halton.point(static_cast<std::uint64_t>(i));
        ++best.attempted;
        try {
            best.offer(opnorm_sf(x), x, Vec(), Vec());
        } catch (const Error&) {
            ++best.failed;
        }
    }
    best.check_failures();

    std::vector<Vec> blocks = {best.witness.x};
    auto objective = [&](const std::vector<Vec>& blk) {
        try {
            return opnorm_sf(blk[0]);
        } catch (const Error&) {
            return kNegInf;
        }
    };
    double refined = best.value;
    refine(blocks, refined, cfg.refine_steps, objective, [](std::vector<Vec>&) {});

    SeminormEstimate est;
    est.kind = SeminormKind::SfEssSup;
    est.value = std::max(best.value, refined);
    est.p99 = best.p99();
    est.witness = (refined > best.value) ? Witness{blocks[0], Vec(), Vec()}
                                         : best.witness;
    est.config = cfg;
    return est;
}

double q_oracle_linear(const Mat& A) {
    Mat S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(S);
    return eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff();
}

ChainVerdict chain_check(const VectorField& f, const SamplingConfig& cfg,
                         double slack) {
    SeminormEstimate z = estimate_zygmund(f, cfg);
    SeminormEstimate q = estimate_q(f, cfg);
    SeminormEstimate l = estimate_lipschitz(f, cfg);

    ChainVerdict v;
    v.slack = slack;
    v.z = z.value;
    v.q = q.value;
    v.l = l.value;

    // Cross-seed witnesses: the Zygmund witness yields an admissible Q
    // configuration (a, -a), and the Q/Z witnesses yield Lipschitz pairs.
    auto try_max = [](double& acc, auto&& fn) {
        try {
            acc = std::max(acc, fn());
        } catch (const Error&) {
        }
    };
    if (z.witness.x.size() > 0 && f.dim() > 1) {
        try_max(v.q, [&] {
            return q_quotient(f, z.witness.x, z.witness.a, Vec(-z.witness.a));
        });
    }
    if (q.witness.x.size() > 0) {
        const Vec& x = q.witness.x;
        if (q.witness.a.size() > 0)
            try_max(v.l, [&] { return lipschitz_quotient(f, x, x + q.witness.a); });
        if (q.witness.b.size() > 0)
            try_max(v.l, [&] { return lipschitz_quotient(f, x, x + q.witness.b); });
    }
    if (z.witness.x.size() > 0) {
        const Vec& x = z.witness.x;
        try_max(v.l, [&] { return lipschitz_quotient(f, x, x + z.witness.a); });
        try_max(v.l, [&] { return lipschitz_quotient(f, x, x - z.witness.a); });
    }

    const double tiny = 1e-9;
    v.pass = (v.z <= 4.0 * v.q * (1.0 + slack) + tiny) &&
             (4.0 * v.q <= 8.0 * v.l * (1.0 + slack) + tiny);
    return v;
}

}  // namespace qcflow
