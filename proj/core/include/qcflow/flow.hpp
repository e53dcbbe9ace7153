#pragma once

#include <vector>

#include "qcflow/field.hpp"

namespace qcflow {

/// Numerical flow of a vector field: embedded Dormand-Prince 5(4) pair with
/// PI step control.  Immutable; `flow` calls are pure and thread-safe.
struct FlowMap {
    VectorField field;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.1;
};

/// Integrates dx/dt = field(x) from x0 over [0, t] (t may be negative).
/// Throws FlowExitError if the trajectory leaves the field's domain and
/// EvalSingularity on step-size underflow.
Vec flow(const FlowMap& F, const Vec& x0, double t);

/// Quasiconformal distortion of the time-t flow map at a point.
struct DistortionReport {
    Vec point;
    double time = 0.0;
    Mat jacobian;        // D phi_t(x) by endpoint central differences
    double opnorm = 0.0;  // largest singular value
    double min_norm = 0.0;  // smallest singular value m(D phi_t)
    double det = 0.0;
    double K_estimate = 1.0;  // max(||D||^n / |det|, |det| / m^n)
    bool singular = false;    // |det| < 1e-12
};

DistortionReport flow_jacobian(const FlowMap& F, const Vec& x0, double t,
                               double h = 1e-5);

/// Checks exp(-|t| B)(1 - tol) <= det D phi_t <= exp(|t| B)(1 + tol) with
/// B = div_bound at every grid point and time; tol = 1e-3.
struct LiouvilleViolation {
    Vec point;
    double time = 0.0;
    double det = 0.0;
    double lower = 0.0, upper = 0.0;
};
struct LiouvilleReport {
    std::vector<LiouvilleViolation> violations;
    bool pass = true;
};
LiouvilleReport liouville_check(const FlowMap& F, const std::vector<Vec>& grid,
                                const std::vector<double>& t_values,
                                double div_bound, double fd_step = 1e-5);

/// Per-time max distortion over the grid, with a least-squares fit of c in
/// K(t) <= e^{c |t|} (log K regressed on |t| through the origin).
struct QcGrowthProfile {
    std::vector<std::pair<double, double>> profile;  // (t, max K)
    double c_fit = 0.0;
    double fit_residual = 0.0;
};
QcGrowthProfile qc_growth_profile(const FlowMap& F, const std::vector<Vec>& grid,
                                  const std::vector<double>& t_values,
                                  double fd_step = 1e-5);

/// max over the grid of |phi_t(psi_s(x)) - psi_s(phi_t(x))|.
double commutation_defect(const FlowMap& F, const FlowMap& G,
                          const std::vector<Vec>& grid, double s, double t);

/// For each eps: grid-average of |flow of mollified X at t - flow of X at t|.
std::vector<std::pair<double, double>> mollification_stability(
    const VectorField& X, const std::vector<double>& eps_list,
    const std::vector<Vec>& grid, double t, double rel_tol = 1e-9,
    double abs_tol = 1e-12);

/// Regular axis-aligned grid of points_per_axis^n points in the box shrunk
/// by `margin` (helper shared by the grid sweeps and the CLI).
std::vector<Vec> make_grid(const DomainBox& box, int points_per_axis,
                           double margin = 0.0);

}  // namespace qcflow
