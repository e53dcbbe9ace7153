#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcflow/calculus.hpp"
#include "qcflow/catalog.hpp"
#include "qcflow/field.hpp"

using namespace qcflow;

namespace {

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

Vec v3(double a, double b, double c) {
    Vec x(3);
    x << a, b, c;
    return x;
}

}  // namespace

TEST_CASE("field constructors evaluate as specified") {
    auto c = VectorField::constant(v2(1.0, -2.0), DomainBox::cube(2, 5.0));
    CHECK((c(v2(3.0, 3.0)) - v2(1.0, -2.0)).norm() == 0.0);

    Mat A(2, 2);
    A << 0.0, -1.0, 1.0, 0.0;
    auto lin = VectorField::linear(A, DomainBox::cube(2, 5.0));
    CHECK((lin(v2(2.0, 1.0)) - v2(-1.0, 2.0)).norm() == 0.0);

    auto p = parse_field("x1 + x2; x1*x2", 2);
    CHECK((p(v2(2.0, 3.0)) - v2(5.0, 6.0)).norm() == 0.0);

    auto call = VectorField::callable(
        2, [](const Vec& x) { return Vec(2.0 * x); }, DomainBox::cube(2, 5.0));
    CHECK((call(v2(1.0, 1.0)) - v2(2.0, 2.0)).norm() == 0.0);

    auto s = VectorField::axpy(2.0, c, -1.0, lin);
    CHECK((s(v2(2.0, 1.0)) - v2(2.0 * 1.0 + 1.0, 2.0 * -2.0 - 2.0)).norm() == 0.0);
}

TEST_CASE("domain and singularity enforcement") {
    auto f = parse_field("log(x1); x2", 2, DomainBox::cube(2, 2.0));
    CHECK_THROWS_AS(f(v2(3.0, 0.0)), OutOfDomainError);
    CHECK_THROWS_AS(f(v2(0.0, 0.0)), EvalSingularity);
    CHECK_THROWS_AS(f(v2(-1.0, 0.0)), EvalSingularity);
    CHECK(f(v2(1.0, 0.5))[0] == 0.0);

    auto g = f.with_domain(DomainBox::cube(2, 0.5));
    CHECK_THROWS_AS(g(v2(1.0, 0.0)), OutOfDomainError);
}

TEST_CASE("printable fields round-trip") {
    auto f = parse_field("x1*log(abs(x1)); x2", 2);
    auto text = f.print();
    REQUIRE(text.has_value());
    auto g = parse_field(*text, 2);
    Vec x = v2(1.7, -0.3);
    CHECK((f(x) - g(x)).norm() == 0.0);
    CHECK(!VectorField::constant(v2(1, 2), DomainBox::cube(2, 1)).print().has_value());
}

TEST_CASE("mollification is exact on constants and linear fields") {
    auto c = VectorField::constant(v2(3.0, -1.0), DomainBox::cube(2, 2.0));
    auto cm = VectorField::mollified(c, 0.25);
    CHECK((cm(v2(0.3, -0.4)) - v2(3.0, -1.0)).norm() <= 1e-15);

    Mat A(2, 2);
    A << 1.0, 2.0, -0.5, 0.25;
    auto lin = VectorField::linear(A, DomainBox::cube(2, 2.0));
    auto lm = VectorField::mollified(lin, 0.25);
    Vec x = v2(0.7, -0.2);
    CHECK((lm(x) - lin(x)).norm() <= 1e-12);  // symmetric stencil kills the odd term
}

TEST_CASE("mollification smooths a kink and respects the boundary margin") {
    auto kink = load_catalog_field("abskink");
    auto m = VectorField::mollified(kink, 0.5);
    // |.| averaged over a symmetric even kernel is strictly positive at 0.
    const double at0 = m(v2(0.0, 0.0))[0];
    CHECK(at0 > 0.0);
    CHECK(at0 < 0.5);
    // Away from the kink the field is linear, so mollification is exact.
    CHECK((m(v2(2.0, 2.0)) - v2(2.0, 2.0)).norm() <= 1e-12);
    // Within eps of the boundary the convolution stencil would leave the box.
    CHECK_THROWS_AS(m(v2(9.8, 0.0)), OutOfDomainError);
    CHECK_THROWS_AS(VectorField::mollified(kink, 0.0), DegenerateInputError);
}

TEST_CASE("jacobian of a linear field is exact across step sizes") {
    Mat A(3, 3);
    A << 1.0, 2.0, 0.5, -1.0, 0.0, 3.0, 0.25, -0.75, 2.0;
    auto f = VectorField::linear(A, DomainBox::cube(3, 10.0));
    // Truncation vanishes on linear fields; what is left is rounding of
    // f(x +- h e_j), amplified by 1/h as the step shrinks.
    Vec x = v3(0.06, -0.11, 0.08);
    for (double h : {1e-4, 1e-5, 1e-6}) {
        auto J = jacobian(f, x, h);
        CHECK((J.matrix - A).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(J.step == h);
    }
    CHECK((jacobian(f, x, 1e-4).matrix - A).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(divergence(f, x, 1e-4) - A.trace()) <= 1e-12);
}

TEST_CASE("jacobian retries with smaller steps near a singular locus") {
    // log(x1) blows up at x1 = 0; a stencil at x1 = h hits it and must shrink.
    auto f = parse_field("log(x1); x2", 2, DomainBox::cube(2, 2.0));
    const double h = 1e-5;
    auto J = jacobian(f, v2(h, 0.0), h);
    CHECK(J.step < h);
    CHECK(J.matrix.allFinite());
}

TEST_CASE("divergence and anticonformal part of the borderline field") {
    // f(x) = x log|x| on R^2: Df = log|x| I + x x^T/|x|^2,
    // div f = 2 log|x| + 1, Sf = x x^T/|x|^2 - I/2 with operator norm 1/2.
    auto f = load_catalog_field("xloga");
    Vec x = v2(1.3, -0.6);
    const double r = x.norm();
    CHECK(std::abs(divergence(f, x, 1e-5) - (2.0 * std::log(r) + 1.0)) <= 1e-8);

    Mat S = anticonformal_part(f, x, 1e-5);
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(S.trace()) <= 1e-10);
    Mat expected = x * x.transpose() / x.squaredNorm() - 0.5 * Mat::Identity(2, 2);
    CHECK((S - expected).cwiseAbs().maxCoeff() <= 1e-7);
    Eigen::JacobiSVD<Mat> svd(S);
    CHECK(std::abs(svd.singularValues()[0] - 0.5) <= 1e-7);
}

TEST_CASE("anticonformal part vanishes for conformal linear fields") {
    Mat A(2, 2);
    A << 2.0, -3.0, 3.0, 2.0;  // scaling + rotation: conformal
    auto f = VectorField::linear(A, DomainBox::cube(2, 5.0));
    CHECK(anticonformal_part(f, v2(0.4, 0.9), 1e-5).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("lie bracket oracles and algebraic identities") {
    const DomainBox d = DomainBox::cube(2, 5.0);
    auto e1 = VectorField::constant(v2(1.0, 0.0), d);
    auto shear = parse_field("0; x1", 2, d);
    Vec x = v2(0.7, -0.4);
    // [e1, x1 e2] = D(x1 e2) e1 = e2.
    CHECK((lie_bracket(e1, shear, x, 1e-5) - v2(0.0, 1.0)).norm() <= 1e-9);
    // Antisymmetry.
    CHECK((lie_bracket(shear, e1, x, 1e-5) + v2(0.0, 1.0)).norm() <= 1e-9);

    // Linear fields bracket to the matrix commutator (BA - AB under the
    // [X,Y]u = X(Yu) - Y(Xu) convention).
    Mat A(2, 2), B(2, 2);
    A << 1.0, 2.0, 0.0, -1.0;
    B << 0.5, 0.0, 1.0, 0.5;
    auto fa = VectorField::linear(A, d);
    auto fb = VectorField::linear(B, d);
    Vec expect = (B * A - A * B) * x;
    CHECK((lie_bracket(fa, fb, x, 1e-5) - expect).norm() <= 1e-8);

    // Bilinearity in the first slot.
    auto combo = VectorField::axpy(2.0, fa, 3.0, e1);
    Vec lhs = lie_bracket(combo, fb, x, 1e-5);
    Vec rhs = 2.0 * lie_bracket(fa, fb, x, 1e-5) + 3.0 * lie_bracket(e1, fb, x, 1e-5);
    CHECK((lhs - rhs).norm() <= 1e-7);
}

TEST_CASE("growth ratio of the identity field decays like 1/log R") {
    auto f = load_catalog_field("identity(2)");
    auto profile = growth_ratio(f, {2.0, 4.0, 8.0}, 64, 3);
    REQUIRE(profile.size() == 3);
    for (const auto& [R, ratio] : profile)
        CHECK(std::abs(ratio - 1.0 / std::log(R)) <= 1e-12);
    // Determinism under a fixed seed.
    auto again = growth_ratio(f, {2.0, 4.0, 8.0}, 64, 3);
    for (std::size_t i = 0; i < profile.size(); ++i)
        CHECK(profile[i].second == again[i].second);
}

TEST_CASE("growth ratio of x log|x| approaches 1") {
    auto f = load_catalog_field("xloga");
    auto profile = growth_ratio(f, {4.0, 8.0}, 64, 3);
    for (const auto& [R, ratio] : profile)
        CHECK(std::abs(ratio - 1.0) <= 1e-10);  // |f| = R log R exactly on |x| = R
}
