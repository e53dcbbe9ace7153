#pragma once

#include <cstdint>
#include <vector>

#include "qcflow/field.hpp"

namespace qcflow {

/// Configuration of the randomized sup-sampler.  Base points come from a
/// Halton sequence in the domain box shrunk by the largest radius; direction
/// pairs are per-base-point substreams, so enlarging either count yields a
/// superset of the smaller sample set.
struct SamplingConfig {
    int base_points = 200;
    int direction_pairs = 400;
    std::vector<double> radii = {0.5,    0.25,    0.125,    0.0625,
                                 0.03125, 0.015625, 0.0078125, 0.00390625};
    std::uint64_t rng_seed = 1;
    int refine_steps = 20;
};

enum class SeminormKind { Q, Zygmund, Lipschitz, SfEssSup };

/// Argmax witness: (x, a, b) for Q; (x, y=a) for Zygmund; the pair (x, y=a)
/// of points for Lipschitz; the point x for Sf.
struct Witness {
    Vec x;
    Vec a;
    Vec b;
};

struct SeminormEstimate {
    SeminormKind kind;
    double value = 0.0;   // lower bound of the sup; max over samples + refinement
    double p99 = 0.0;     // 99th percentile of sampled quotients (a.e.-tolerant)
    Witness witness;
    SamplingConfig config;
};

/// Raw quotients, exposed so witnesses can be re-checked independently.
double q_quotient(const VectorField& f, const Vec& x, const Vec& a, const Vec& b);
double zygmund_quotient(const VectorField& f, const Vec& x, const Vec& y);
double lipschitz_quotient(const VectorField& f, const Vec& x, const Vec& y);

SeminormEstimate estimate_q(const VectorField& f, const SamplingConfig& cfg);
SeminormEstimate estimate_zygmund(const VectorField& f, const SamplingConfig& cfg);
SeminormEstimate estimate_lipschitz(const VectorField& f, const SamplingConfig& cfg);

/// Max (and 99th percentile) over sampled points of the operator norm of the
/// anticonformal part of Df, by central differences with step h.
SeminormEstimate estimate_sf_esssup(const VectorField& f, const SamplingConfig& cfg,
                                    double h);

/// Exact Q seminorm of the linear field x -> A x:
/// lambda_max(sym A) - lambda_min(sym A).
double q_oracle_linear(const Mat& A);

/// Chain-inequality verdict  Z <= 4 Q (1+slack)  and  4 Q <= 8 L (1+slack),
/// evaluated on shared sample streams with cross-seeded witnesses (each
/// estimator's witness also feeds candidate pairs to the others, so the
/// inequalities are checked on comparable lower bounds).
struct ChainVerdict {
    double q = 0.0, z = 0.0, l = 0.0;
    bool pass = false;
    double slack = 0.05;
};
ChainVerdict chain_check(const VectorField& f, const SamplingConfig& cfg,
                         double slack = 0.05);

}  // namespace qcflow
