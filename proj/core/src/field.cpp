#include "qcflow/field.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace qcflow {

class VectorField::Body {
public:
    Body(int n, DomainBox domain, std::string label)
        : n_(n), domain_(std::move(domain)), label_(std::move(label)) {
        if (domain_.dim() != n_)
            throw DegenerateInputError("field/domain dimension mismatch");
    }
    virtual ~Body() = default;

    int dim() const { return n_; }
    const DomainBox& domain() const { return domain_; }
    const std::string& label() const { return label_; }

    /// Per-axis margin from the boundary required for evaluation.
    virtual double required_margin() const { return 0.0; }
    virtual Vec eval(const Vec& x) const = 0;
    virtual std::optional<std::string> print() const { return std::nullopt; }
    virtual std::shared_ptr<const Body> rebox(DomainBox d) const = 0;

protected:
    int n_;
    DomainBox domain_;
    std::string label_;
};

namespace {

using Body = VectorField::Body;

void check_finite(const Vec& v, const std::string& label) {
    if (!v.allFinite())
        throw EvalSingularity("non-finite value while evaluating " + label);
}

class ConstantBody final : public Body {
public:
    ConstantBody(Vec v, DomainBox d)
        : Body(static_cast<int>(v.size()), std::move(d), "constant"), v_(std::move(v)) {}
    Vec eval(const Vec&) const override { return v_; }
    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<ConstantBody>(v_, std::move(d));
    }

private:
    Vec v_;
};

class LinearBody final : public Body {
public:
    LinearBody(Mat A, DomainBox d)
        : Body(static_cast<int>(A.rows()), std::move(d), "linear"), A_(std::move(A)) {
        if (A_.rows() != A_.cols())
            throw DegenerateInputError("linear field matrix must be square");
    }
    Vec eval(const Vec& x) const override { return A_ * x; }
    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<LinearBody>(A_, std::move(d));
    }

private:
    Mat A_;
};

class ExprBody final : public Body {
public:
    ExprBody(std::vector<ScalarExpression> comps, DomainBox d)
        : Body(static_cast<int>(comps.size()), std::move(d), "expr"),
          comps_(std::move(comps)) {}
    Vec eval(const Vec& x) const override {
        Vec out(n_);
        std::span<const double> xs(x.data(), static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) out[i] = comps_[static_cast<std::size_t>(i)].eval(xs);
        return out;
    }
    std::optional<std::string> print() const override {
        std::ostringstream out;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (i) out << "; ";
            out << comps_[i].print();
        }
        return out.str();
    }
    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<ExprBody>(comps_, std::move(d));
    }

private:
    std::vector<ScalarExpression> comps_;
};

class CallableBody final : public Body {
public:
    CallableBody(int n, std::function<Vec(const Vec&)> fn, DomainBox d, std::string label)
        : Body(n, std::move(d), std::move(label)), fn_(std::move(fn)) {}
    Vec eval(const Vec& x) const override { return fn_(x); }
    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<CallableBody>(n_, fn_, std::move(d), label_);
    }

private:
    std::function<Vec(const Vec&)> fn_;
};

class AxpyBody final : public Body {
public:
    AxpyBody(double a, VectorField f, double b, VectorField g)
        : Body(f.dim(), f.domain(), "sum"),
          a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {
        if (f_.dim() != g_.dim())
            throw DegenerateInputError("summed fields must share a dimension");
    }
    Vec eval(const Vec& x) const override { return a_ * f_(x) + b_ * g_(x); }
    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<AxpyBody>(a_, f_.with_domain(d), b_,
                                          g_.with_domain(std::move(d)));
    }

private:
    double a_, b_;
    VectorField f_, g_;
};

// 7-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 7> kGauss7Nodes = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972, 0.7415311855993945, 0.9491079123427585};
constexpr std::array<double, 7> kGauss7Weights = {
    0.1294849661688697, 0.2797053914892766, 0.4179591836734694,
    0.4179591836734694, 0.4179591836734694, 0.2797053914892766,
    0.1294849661688697};

class MollifiedBody final : public Body {
public:
    MollifiedBody(VectorField inner, double eps)
        : Body(inner.dim(), inner.domain(), "mollified(" + inner.label() + ")"),
          inner_(std::move(inner)), eps_(eps) {
        if (!(eps_ > 0)) throw DegenerateInputError("mollification scale must be > 0");
        build_stencil();
    }

    double required_margin() const override { return eps_; }

    Vec eval(const Vec& x) const override {
        Vec acc = Vec::Zero(n_);
        Vec y(n_);
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            y = x - eps_ * nodes_[j];
            acc += weights_[j] * inner_(y);
        }
        return acc;
    }

    std::shared_ptr<const Body> rebox(DomainBox d) const override {
        return std::make_shared<MollifiedBody>(inner_.with_domain(std::move(d)), eps_);
    }

private:
    void build_stencil() {
        // Tensor Gauss grid on [-1,1]^n; kernel weight rho at each node,
        // normalized to unit discrete mass so constants mollify exactly.
        std::vector<int> idx(static_cast<std::size_t>(n_), 0);
        double total = 0.0;
        for (;;) {
            Vec u(n_);
            double w = 1.0;
            for (int d = 0; d < n_; ++d) {
                u[d] = kGauss7Nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
                w *= kGauss7Weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
            }
            double r2 = u.squaredNorm();
            if (r2 < 1.0) {
                w *= std::exp(-1.0 / (1.0 - r2));
                nodes_.push_back(u);
                weights_.push_back(w);
                total += w;
            }
            int d = 0;
            while (d < n_ && ++idx[static_cast<std::size_t>(d)] == 7)
                idx[static_cast<std::size_t>(d++)] = 0;
            if (d == n_) break;
        }
        for (double& w : weights_) w /= total;
    }

    VectorField inner_;
    double eps_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
};

}  // namespace

VectorField VectorField::constant(Vec v, DomainBox domain) {
    return VectorField(std::make_shared<ConstantBody>(std::move(v), std::move(domain)));
}

VectorField VectorField::linear(Mat A, DomainBox domain) {
    return VectorField(std::make_shared<LinearBody>(std::move(A), std::move(domain)));
}

VectorField VectorField::parsed(std::string_view text, int n, DomainBox domain) {
    return VectorField(std::make_shared<ExprBody>(parse_field_exprs(text, n),
                                                  std::move(domain)));
}

VectorField VectorField::callable(int n, std::function<Vec(const Vec&)> fn,
                                  DomainBox domain, std::string label) {
    return VectorField(std::make_shared<CallableBody>(n, std::move(fn),
                                                      std::move(domain),
                                                      std::move(label)));
}

VectorField VectorField::axpy(double a, const VectorField& f, double b,
                              const VectorField& g) {
    return VectorField(std::make_shared<AxpyBody>(a, f, b, g));
}

VectorField VectorField::mollified(const VectorField& inner, double eps) {
    return VectorField(std::make_shared<MollifiedBody>(inner, eps));
}

int VectorField::dim() const { return body_->dim(); }
const DomainBox& VectorField::domain() const { return body_->domain(); }
std::string VectorField::label() const { return body_->label(); }
std::optional<std::string> VectorField::print() const { return body_->print(); }

Vec VectorField::operator()(const Vec& x) const {
    const double margin = body_->required_margin();
    if (!body_->domain().contains(x, margin)) {
        if (margin > 0 && body_->domain().contains(x))
            throw OutOfDomainError("point within mollification margin of the boundary");
        throw OutOfDomainError("point outside field domain");
    }
    Vec v = body_->eval(x);
    check_finite(v, body_->label());
    return v;
}

VectorField VectorField::with_domain(DomainBox d) const {
    if (d.dim() != dim())
        throw DegenerateInputError("with_domain dimension mismatch");
    return VectorField(body_->rebox(std::move(d)));
}

VectorField parse_field(std::string_view text, int n, std::optional<DomainBox> domain) {
    DomainBox d = domain ? *domain : DomainBox::cube(n, 10.0);
    return VectorField::parsed(text, n, std::move(d));
}

}  // namespace qcflow
