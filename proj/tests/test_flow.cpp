#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "qcflow/catalog.hpp"
#include "qcflow/flow.hpp"

using namespace qcflow;

namespace {

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("constant field flows along straight lines") {
    auto f = VectorField::constant(v2(1.0, -2.0), DomainBox::cube(2, 10.0));
    FlowMap F{f};
    Vec x0 = v2(0.5, 0.5);
    Vec x1 = flow(F, x0, 1.75);
    CHECK((x1 - (x0 + 1.75 * v2(1.0, -2.0))).norm() <= 1e-10);
}

TEST_CASE("linear flow matches the matrix exponential") {
    Mat A(2, 2);
    A << 0.3, 1.1, -0.7, -0.2;
    auto f = VectorField::linear(A, DomainBox::cube(2, 50.0));
    FlowMap F{f};
    Vec x0 = v2(1.0, -0.5);
    for (double t : {0.25, 1.0, -1.5}) {
        Mat E = (t * A).exp();
        CHECK((flow(F, x0, t) - E * x0).norm() <= 1e-7);
    }
}

TEST_CASE("rotation flow is periodic and isometric") {
    auto f = load_catalog_field("rotation2d");
    FlowMap F{f};
    Vec x0 = v2(1.0, 0.0);
    CHECK((flow(F, x0, 2.0 * kPi) - x0).norm() <= 1e-7);
    CHECK(std::abs(flow(F, x0, 1.0).norm() - x0.norm()) <= 1e-9);
}

TEST_CASE("group law and reversibility") {
    auto f = load_catalog_field("xloga");
    FlowMap F{f};
    Vec x0 = v2(0.8, -0.3);
    const double s = 0.4, t = 0.7;
    Vec a = flow(F, flow(F, x0, t), s);
    Vec b = flow(F, x0, s + t);
    CHECK((a - b).norm() <= 1e-7);

    Vec back = flow(F, flow(F, x0, t), -t);
    CHECK((back - x0).norm() <= 5.0 * F.rel_tol * (1.0 + x0.norm()) + 5.0 * F.abs_tol);
}

TEST_CASE("leaving the domain raises a flow exit error") {
    auto f = VectorField::constant(v2(1.0, 0.0), DomainBox::cube(2, 1.0));
    FlowMap F{f};
    try {
        flow(F, v2(0.0, 0.0), 5.0);
        FAIL("expected FlowExitError");
    } catch (const FlowExitError& e) {
        CHECK(e.exit_time > 0.9);
        CHECK(e.exit_time <= 1.1);
        CHECK(e.exit_point[0] >= 0.9);
    }
}

TEST_CASE("flow jacobian of the rotation is orthogonal") {
    auto f = load_catalog_field("rotation2d");
    FlowMap F{f};
    for (double t : {0.5, 1.0, 2.0}) {
        auto rep = flow_jacobian(F, v2(0.4, 0.2), t);
        CHECK(std::abs(rep.opnorm - 1.0) <= 1e-6);
        CHECK(std::abs(rep.min_norm - 1.0) <= 1e-6);
        CHECK(std::abs(rep.det - 1.0) <= 1e-6);
        CHECK(rep.K_estimate <= 1.0 + 1e-6);
        CHECK(!rep.singular);
    }
}

TEST_CASE("flow jacobian of a diagonal field has closed-form distortion") {
    Mat A(2, 2);
    A << 2.0, 0.0, 0.0, -1.0;
    auto f = VectorField::linear(A, DomainBox::cube(2, 100.0));
    FlowMap F{f};
    const double t = 0.5;
    auto rep = flow_jacobian(F, v2(1.0, 1.0), t);
    CHECK(rep.opnorm == doctest::Approx(std::exp(2.0 * t)).epsilon(1e-5));
    CHECK(rep.min_norm == doctest::Approx(std::exp(-t)).epsilon(1e-5));
    CHECK(rep.det == doctest::Approx(std::exp(t)).epsilon(1e-5));
    CHECK(rep.K_estimate == doctest::Approx(std::exp(3.0 * t)).epsilon(1e-4));
    // The distortion algebra: m <= ||D||, K >= 1, ||D||^n <= K |det|.
    CHECK(rep.min_norm <= rep.opnorm);
    CHECK(rep.K_estimate >= 1.0);
    CHECK(std::pow(rep.opnorm, 2) <= rep.K_estimate * std::abs(rep.det) * (1.0 + 1e-6));
}

TEST_CASE("liouville check accepts the true divergence bound and rejects a lie") {
    Mat A(2, 2);
    A << 2.0, 0.0, 0.0, -1.0;
    auto f = VectorField::linear(A, DomainBox::cube(2, 100.0));
    FlowMap F{f};
    auto grid = make_grid(DomainBox::cube(2, 2.0), 5);
    CHECK(grid.size() == 25);
    std::vector<double> times = {-1.0, -0.5, 0.5, 1.0};
    auto ok = liouville_check(F, grid, times, std::abs(A.trace()));
    CHECK(ok.pass);
    CHECK(ok.violations.empty());

    auto bad = liouville_check(F, grid, {1.0}, 0.1);  // det = e^t breaks e^{0.1 t}
    CHECK(!bad.pass);
    CHECK(!bad.violations.empty());
    CHECK(bad.violations[0].det > bad.violations[0].upper);
}

TEST_CASE("determinants follow exp(t trace) exactly for linear fields") {
    Mat A(2, 2);
    A << 2.0, 0.0, 0.0, -1.0;
    auto f = VectorField::linear(A, DomainBox::cube(2, 100.0));
    FlowMap F{f};
    for (double t : {-1.0, 0.5, 1.0}) {
        auto rep = flow_jacobian(F, v2(0.3, -0.8), t);
        const double expect = std::exp(t * A.trace());
        CHECK(std::abs(rep.det - expect) / expect <= 1e-6);
    }
}

TEST_CASE("qc growth profile separates conformal from distorting flows") {
    auto rot = load_catalog_field("rotation2d");
    auto grid = make_grid(DomainBox::cube(2, 2.0), 3);
    std::vector<double> times = {0.5, 1.0, 2.0};
    auto prof = qc_growth_profile(FlowMap{rot}, grid, times);
    REQUIRE(prof.profile.size() == 3);
    for (const auto& [t, K] : prof.profile) CHECK(K <= 1.0 + 1e-6);
    CHECK(std::abs(prof.c_fit) <= 1e-6);

    auto shear = load_catalog_field("shear2d");
    auto prof2 = qc_growth_profile(FlowMap{shear}, grid, times);
    CHECK(prof2.c_fit > 0.1);
    CHECK(prof2.profile.back().second > prof2.profile.front().second);
}

TEST_CASE("commutation defect oracle |s t| for the shear pair") {
    const DomainBox d = DomainBox::cube(2, 10.0);
    auto e1 = VectorField::constant(v2(1.0, 0.0), d);
    auto shear = load_catalog_field("shear2d");
    auto grid = make_grid(DomainBox::cube(2, 1.0), 3);
    const double s = 0.5, t = 0.5;
    CHECK(commutation_defect(FlowMap{e1}, FlowMap{shear}, grid, s, t) ==
          doctest::Approx(s * t).epsilon(1e-6));

    auto e2 = VectorField::constant(v2(0.0, 1.0), d);
    CHECK(commutation_defect(FlowMap{e1}, FlowMap{e2}, grid, 0.7, 0.3) <= 1e-9);
}

TEST_CASE("mollified flows converge to the rough flow") {
    auto kink = load_catalog_field("abskink");
    auto grid = make_grid(DomainBox::cube(2, 1.0), 3);
    std::vector<double> eps = {0.4, 0.2, 0.1};
    auto errs = mollification_stability(kink, eps, grid, 0.5);
    REQUIRE(errs.size() == 3);
    CHECK(errs[0].second > errs[1].second);
    CHECK(errs[1].second > errs[2].second);
    CHECK(errs[2].second < 5e-2);
}

TEST_CASE("make_grid respects bounds, count and margin") {
    Vec lo(2), hi(2);
    lo << -1.0, 0.0;
    hi << 1.0, 4.0;
    auto grid = make_grid(DomainBox(lo, hi), 4, 0.5);
    CHECK(grid.size() == 16);
    for (const Vec& p : grid) {
        CHECK(p[0] >= -0.5);
        CHECK(p[0] <= 0.5);
        CHECK(p[1] >= 0.5);
        CHECK(p[1] <= 3.5);
    }
    CHECK(grid.front()[0] == -0.5);
    CHECK(grid.back()[1] == 3.5);
}
