#pragma once

#include <vector>

#include "qcflow/field.hpp"

namespace qcflow {

/// Central-difference Jacobian estimate at a point.
struct JacobianEstimate {
    Mat matrix;
    Vec point;
    double step = 0.0;  // the step actually used (may be refined on retries)
};

/// Scale-aware default finite-difference step.
inline double default_fd_step(const Vec& x) {
    return 1e-5 * std::max(1.0, x.norm());
}

/// J_ij = (f_i(x + h e_j) - f_i(x - h e_j)) / (2h).  On an evaluation
/// singularity at a stencil point, retries with h/2 up to 4 times.
JacobianEstimate jacobian(const VectorField& f, const Vec& x, double h);

double divergence(const VectorField& f, const Vec& x, double h);

/// Anticonformal part Sf = (J + J^T)/2 - trace(J)/n * I.
Mat anticonformal_part(const VectorField& f, const Vec& x, double h);

/// Lie bracket via finite-difference Jacobians, with the commutator sign
/// convention [X,Y]u = X(Yu) - Y(Xu): componentwise DY(x) X(x) - DX(x) Y(x).
/// Example: [e1, x1 e2] = e2.
Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x, double h);

/// For each radius R > 1, the max over sampled |x| = R of |f(x)| / (R log R).
/// Sampling is deterministic given the seed; singular samples are skipped,
/// failing only if more than 1% of them are.
std::vector<std::pair<double, double>> growth_ratio(const VectorField& f,
                                                    const std::vector<double>& radii,
                                                    int samples_per_radius,
                                                    std::uint64_t seed = 1);

}  // namespace qcflow
