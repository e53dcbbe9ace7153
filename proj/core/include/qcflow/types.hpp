#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all qcflow errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Syntax error while parsing a field spec; `pos` is the byte offset.
struct ParseError : Error {
    std::size_t pos;
    ParseError(const std::string& msg, std::size_t p)
        : Error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

/// Point outside the domain box of a field.
struct OutOfDomainError : Error {
    using Error::Error;
};

/// Non-finite value encountered while evaluating a field (e.g. log at 0).
struct EvalSingularity : Error {
    using Error::Error;
};

/// A trajectory left the domain box during integration.
struct FlowExitError : Error {
    double exit_time;
    Vec exit_point;
    FlowExitError(double t, Vec x)
        : Error("trajectory left the domain at t = " + std::to_string(t)),
          exit_time(t), exit_point(std::move(x)) {}
};

/// Degenerate geometric input (singular frame, no transverse split, ...).
struct DegenerateInputError : Error {
    using Error::Error;
};

/// Axis-aligned box in R^n.  lo_i < hi_i for all i.
struct DomainBox {
    Vec lo;
    Vec hi;

    DomainBox() = default;
    DomainBox(Vec l, Vec h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size() || lo.size() < 1)
            throw DegenerateInputError("domain box dimensions mismatch");
        for (int i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw DegenerateInputError("domain box requires lo < hi per axis");
    }

    /// Cube [-r, r]^n.
    static DomainBox cube(int n, double r) {
        return DomainBox(Vec::Constant(n, -r), Vec::Constant(n, r));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vec& x, double margin = 0.0) const {
        if (x.size() != lo.size()) return false;
        for (int i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
        return true;
    }

    /// Smallest per-axis distance from x to the boundary (negative outside).
    double boundary_margin(const Vec& x) const {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < lo.size(); ++i)
            m = std::min(m, std::min(x[i] - lo[i], hi[i] - x[i]));
        return m;
    }

    DomainBox shrunk(double margin) const {
        return DomainBox(lo.array() + margin, hi.array() - margin);
    }

    Vec center() const { return 0.5 * (lo + hi); }
};

}  // namespace qcflow
