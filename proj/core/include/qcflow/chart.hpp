#pragma once

#include <optional>
#include <vector>

#include "qcflow/plane_field.hpp"

namespace qcflow {

/// Sampled pairwise Lie brackets of the lifted frame exceeded the gate; the
/// plane field does not inherit involutivity, so no chart exists.
struct InvolutivityGateError : Error {
    double worst = 0.0;
    explicit InvolutivityGateError(double w)
        : Error("lifted-frame bracket norm " + std::to_string(w) +
                " exceeds the involutivity gate"),
          worst(w) {}
};

struct ChartConfig {
    double eps0 = 0.0;          // initial chart radius; 0 = auto from the domain
    double rel_tol = 1e-9;      // flow tolerances
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double fd_step = 1e-5;
    double bracket_gate = 1e-6; // max allowed sampled bracket norm of the lifts
    int bracket_samples = 64;
    int injectivity_grid = 5;   // per-axis test points (5^n total)
    int bisect_iters = 8;
    double bilipschitz = 1e-3;  // |Phi(x)-Phi(y)| >= bilipschitz |x-y|
    double roundtrip_tol = 1e-6;
    ProbeGrid probe;
};

/// The straightening chart: composed flows of the lifted coordinate fields.
/// Coordinates x in (-eps, eps)^n are ordered (flow times along tangent
/// axes, then normal offsets); Phi(0) = p.
struct Chart {
    Vec p;
    double eps = 0.0;
    double eps0 = 0.0;
    TransverseSplit split;
    PlaneFieldDef plane_field;
    std::vector<VectorField> lifted;  // X_1 ... X_k
    std::optional<BumpFunction> bump;
    ChartConfig config;
};

Chart build_chart(const PlaneFieldDef& E, const Vec& p, const ChartConfig& cfg = {});

/// Phi(x) = (phi^1_{x_1} o ... o phi^k_{x_k})(p + normal offsets).
/// `order` optionally permutes the composition order of the k flows
/// (identity order is the chart's definition; permutations are for the
/// commutation test).
Vec chart_forward(const Chart& C, const Vec& x,
                  const std::vector<int>* order = nullptr);

/// Psi = Phi^{-1}: tangent coordinates read off by projection, normal ones
/// by undoing the flows.  Throws OutOfDomainError when the round-trip
/// residual exceeds roundtrip_tol * (1 + |q|) (q not in the chart image).
Vec chart_inverse(const Chart& C, const Vec& q);

/// Largest radius (bisection from eps0) whose test grid passes both the
/// quantitative injectivity bound and the forward/inverse round trip.
double injectivity_radius(const Chart& C, double eps0);

struct SliceMesh {
    Vec c;                       // the n-k normal coordinates of the slice
    int resolution = 0;          // vertices per axis
    std::vector<Vec> params;     // k-dim grid parameters
    std::vector<Vec> points;     // Phi(params, c)
    std::vector<double> residuals;  // per-vertex tangency residual
    double max_residual = 0.0;
    double mesh_h = 0.0;         // parameter-space spacing
};

/// Maps a k-dim parameter grid through the chart and measures the tangency
/// residual ||(I - P_E) T|| / ||T|| over the finite-difference mesh tangents
/// (central differences inside, second-order one-sided at the edges).
SliceMesh trace_slice(const Chart& C, const Vec& c, int resolution);

/// Tangency residuals across mesh refinements; (mesh h, max residual) pairs.
std::vector<std::pair<double, double>> c1_regularity_probe(
    const Chart& C, const Vec& c, const std::vector<int>& resolutions);

/// CSV with header u1..uk, x1..xn, residual.
std::string slice_mesh_csv(const SliceMesh& mesh);

}  // namespace qcflow
