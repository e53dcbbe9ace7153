#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcflow/expr.hpp"
#include "qcflow/types.hpp"

namespace qcflow {

/// An evaluatable vector field R^n -> R^n restricted to a domain box.
/// Immutable and cheap to copy (shared body).  Evaluation is deterministic
/// and throws OutOfDomainError / EvalSingularity on bad points.
class VectorField {
public:
    class Body;

    VectorField() = default;

    /// Constant field v.
    static VectorField constant(Vec v, DomainBox domain);
    /// Linear field x -> A x.
    static VectorField linear(Mat A, DomainBox domain);
    /// Field from parsed component expressions "e1; e2; ...".
    static VectorField parsed(std::string_view text, int n, DomainBox domain);
    /// Field from an arbitrary evaluator (used for catalog entries and lifts).
    static VectorField callable(int n, std::function<Vec(const Vec&)> fn,
                                DomainBox domain, std::string label = "callable");
    /// Pointwise sum a*f + b*g (domains must agree in dimension; the
    /// intersection-free convention: uses f's domain).
    static VectorField axpy(double a, const VectorField& f, double b,
                            const VectorField& g);
    /// Mollification of `inner` at scale eps > 0: convolution with the
    /// compactly supported bump kernel rho(u) = C exp(-1/(1-|u|^2)) on |u|<1,
    /// by tensor-grid Gauss quadrature with 7 points per axis.  Evaluation
    /// requires per-axis distance >= eps from the domain boundary.
    static VectorField mollified(const VectorField& inner, double eps);

    int dim() const;
    const DomainBox& domain() const;
    std::string label() const;

    /// For parsed fields: the printable component expressions.
    std::optional<std::string> print() const;

    Vec operator()(const Vec& x) const;

    bool valid() const { return body_ != nullptr; }

    /// Same field on a different box (must have matching dimension).
    VectorField with_domain(DomainBox d) const;

private:
    explicit VectorField(std::shared_ptr<const Body> b) : body_(std::move(b)) {}
    std::shared_ptr<const Body> body_;
};

/// parse_field per the expression grammar; convenience wrapper that picks
/// the default cube domain [-10,10]^n unless one is given.
VectorField parse_field(std::string_view text, int n,
                        std::optional<DomainBox> domain = std::nullopt);

}  // namespace qcflow
