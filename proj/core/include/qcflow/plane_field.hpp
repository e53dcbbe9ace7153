#pragma once

#include <vector>

#include "qcflow/field.hpp"

namespace qcflow {

/// k-dimensional plane field on R^n given by a frame of k vector fields.
struct PlaneFieldDef {
    int n = 0;
    int k = 0;
    std::vector<VectorField> frame;
    DomainBox domain;

    PlaneFieldDef() = default;
    PlaneFieldDef(int n_, int k_, std::vector<VectorField> frame_, DomainBox domain_);

    /// n x k matrix whose columns are the frame fields at q.
    Mat frame_matrix(const Vec& q) const;

    /// Orthogonal projector onto the frame span at q (thin QR).
    Mat projector(const Vec& q) const;
};

/// Coordinate splitting transverse to the plane field: `tangent` indexes the
/// k-dimensional coordinate subspace the frame projects onto injectively,
/// `normal` the complementary n-k axes.
struct TransverseSplit {
    std::vector<int> tangent;
    std::vector<int> normal;
    double margin = 0.0;  // min singular value of the projected frame over the probe grid
};

struct ProbeGrid {
    double half_width = 0.1;
    int points_per_axis = 3;
};

/// Picks, among all C(n,k) coordinate splittings, the one maximizing the
/// smallest singular value of the projected k x k frame at p; the margin is
/// that singular value minimized over the probe grid around p.
/// Throws DegenerateInputError if no splitting reaches margin 1e-6 at p.
TransverseSplit select_split(const PlaneFieldDef& E, const Vec& p,
                             const ProbeGrid& probe = {});

/// C-infinity bump: tensor product over axes of a smooth profile that is
/// exactly 1 on the inner box and exactly 0 outside the outer box.
class BumpFunction {
public:
    BumpFunction(DomainBox inner, DomainBox outer);

    double operator()(const Vec& u) const;
    const DomainBox& inner() const { return inner_; }
    const DomainBox& outer() const { return outer_; }

private:
    DomainBox inner_, outer_;
};

BumpFunction make_bump(DomainBox inner, DomainBox outer);

/// Lift of a field V on the tangent coordinate subspace to a section of E:
///   q  |->  B(q) (pi B(q))^{-1} (beta V)(pi q)   inside the bump support,
///   0 outside,
/// where B is the frame matrix and pi the projection onto `split.tangent`.
/// The projected pushforward of the result is beta * V.
VectorField lift(const PlaneFieldDef& E, const TransverseSplit& split,
                 const VectorField& V, const BumpFunction& beta);

/// Involutivity test: for every frame pair and grid point, the normalized
/// out-of-plane component of the finite-difference Lie bracket,
///   r = ||(I - P_E) [X_i, X_j]|| / (1 + ||[X_i, X_j]||).
/// The 99th-percentile gate (<= 1e-4) honors the a.e. semantics; the max is
/// reported but does not gate.
struct InvolutivityReport {
    double max_residual = 0.0;
    double p99 = 0.0;
    Vec worst_point;
    bool involutive = true;  // p99 <= gate
    double gate = 1e-4;
};
InvolutivityReport involutivity_residual(const PlaneFieldDef& E,
                                         const std::vector<Vec>& grid, double h);

}  // namespace qcflow
