#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hybridpn/errors.hpp"
#include "hybridpn/hybrid.hpp"
#include "hybridpn/manufactured.hpp"

using namespace hybridpn;

namespace {

const double sqrt4pi = 2.0 * std::sqrt(std::numbers::pi);
using cplx = std::complex<double>;

std::shared_ptr<const SphereQuadrature> quadrature(int order) {
    return std::make_shared<const SphereQuadrature>(build_sphere_quadrature(order));
}

double nodal_distance(const NodalAngularField& a, const NodalAngularField& b) {
    NodalAngularField d = a;
    d.coeffs -= b.coeffs;
    return l2_norm(d);
}

double flux_distance(const NodalAngularField& a, const NodalAngularField& b) {
    ScalarField d = scalar_flux(project(a, 0));
    d.coeffs -= scalar_flux(project(b, 0)).coeffs;
    return d.l2_norm();
}

}  // namespace

TEST_CASE("sigma = 0 reduces to exact streaming") {
    ManufacturedParams p;
    p.T = 1.0;
    p.dt = 0.25;
    auto prob = manufactured("streaming", p);
    HybridOptions opts;
    opts.polar_order = 10;
    auto result = run_hybrid(prob.spec, 2, opts);
    auto exact = prob.exact_nodal(1.0, result.total.quad);
    CHECK(nodal_distance(result.total, exact) < 1e-12 * l2_norm(exact));
    for (const auto& d : result.diagnostics.intervals) CHECK(d.collided_end == 0.0);
}

TEST_CASE("remap") {
    SpatialGrid g(1, 3);
    auto quad = quadrature(4);
    NodalAngularField u(g, quad);
    const int k0 = g.mode_index({0, 0, 0}), k1 = g.mode_index({1, 0, 0});
    u.coeffs.col(k1).setConstant(cplx(0.2, 0.1));
    u.coeffs.col(g.mode_index({-1, 0, 0})).setConstant(cplx(0.2, -0.1));
    CHECK((remap(u, MomentField(g, 3)).coeffs - u.coeffs).cwiseAbs().maxCoeff() == 0.0);

    MomentField c(g, 3);
    c.coeffs(0, k0) = 0.5 * sqrt4pi;
    auto out = remap(u, c);
    for (std::size_t j = 0; j < quad->size(); ++j) CHECK(std::abs(out.coeffs(j, k0) - 0.5) < 1e-14);

    c.coeffs(SphericalIndex{2, 1}.ordinal(), k1) = cplx(0.3, -0.4);
    c.coeffs(SphericalIndex{2, 1}.ordinal(), g.mode_index({-1, 0, 0})) = cplx(0.3, 0.4);
    auto mixed = remap(u, c);
    auto moments = project(mixed, 3);
    auto base = project(u, 3);
    CHECK((moments.coeffs - base.coeffs - c.coeffs).cwiseAbs().maxCoeff() < 1e-13);

    CHECK_THROWS_AS(remap(u, MomentField(SpatialGrid(1, 5), 1)), DomainError);
    CHECK_THROWS_AS(remap(u, MomentField(g, 5)), PreconditionError);
}

TEST_CASE("uncollided average source") {
    SpatialGrid g(1, 3);
    auto quad = quadrature(16);
    NodalAngularField u(g, quad);
    const int k0 = g.mode_index({0, 0, 0}), k1 = g.mode_index({1, 0, 0});
    u.coeffs.col(k0).setConstant(0.8);
    const double eps = 0.5, sigma = 0.4;
    auto avg = uncollided_average_source(u, 1.0, {1.0, 1.5, 2.0}, eps, sigma);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(avg[i].coeffs[k0].real() - 0.8 * std::exp(-sigma * 0.5 * i / (eps * eps))) < 1e-14);

    // sphere average of e^{-i mu t/eps} is sin(t/eps)/(t/eps)
    NodalAngularField wave(g, quad);
    wave.coeffs.col(k1).setConstant(1.0);
    auto w = uncollided_average_source(wave, 0.0, {0.0, 0.7, 1.3}, eps, 0.0);
    CHECK(std::abs(w[0].coeffs[k1] - 1.0) < 1e-14);
    for (int i = 1; i < 3; ++i) {
        const double a = (i == 1 ? 0.7 : 1.3) / eps;
        CHECK(std::abs(w[i].coeffs[k1] - std::sin(a) / a) < 1e-12);
    }
    CHECK_THROWS_AS(uncollided_average_source(u, 1.0, {0.5}, eps, sigma), DomainError);
}

TEST_CASE("hybrid mass balance and convergence") {
    ManufacturedParams p;
    p.eps = 0.5;
    p.dt = 0.25;
    auto prob = manufactured("iso-smooth", p);
    prob.spec.g.coeffs(0, prob.spec.grid().mode_index({0, 0, 0})) = 1.3;
    HybridOptions opts;
    opts.polar_order = 16;
    auto result = run_hybrid(prob.spec, 4, opts);
    const int k0 = prob.spec.grid().mode_index({0, 0, 0});
    CHECK(std::abs(project(result.total, 0).coeffs(0, k0).real() - 1.3) < 1e-11);
    for (const auto& d : result.diagnostics.intervals) {
        CHECK(d.remap_residual < 1e-12);
        CHECK(d.source_residual < 1e-8);
    }

    auto ref = to_nodal(solve_pn(prob.spec, 24, {}).final_state(), result.total.quad);
    double previous = INFINITY;
    for (int N : {1, 3, 5, 7}) {
        const double err = nodal_distance(run_hybrid(prob.spec, N, opts).total, ref);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("quadrature doubling") {
    ManufacturedParams p;
    p.dt = 0.25;
    auto prob = manufactured("iso-smooth", p);
    HybridOptions a, b;
    a.polar_order = 14;
    b.polar_order = 28;
    auto ra = run_hybrid(prob.spec, 3, a), rb = run_hybrid(prob.spec, 3, b);
    CHECK(flux_distance(ra.total, rb.total) < 1e-9);
}

TEST_CASE("hybrid preconditions and diagnostics") {
    ManufacturedParams p;
    p.dt = 0.5;
    auto prob = manufactured("iso-smooth", p);
    auto quad = quadrature(3);
    HybridState state;
    state.uncollided = to_nodal(prob.spec.g, quad);
    state.collided = MomentField(prob.spec.grid(), 2);
    state.collided.coeffs(0, 0) = 1e-20;
    CHECK_THROWS_AS(hybrid_step(state, 0.5, 1.0, 1.0, {}, 2), PreconditionError);
    state.collided.coeffs(0, 0) = 0.0;
    CHECK_NOTHROW(hybrid_step(state, 0.5, 1.0, 1.0, {}, 2));
    CHECK_THROWS_AS(hybrid_step(state, 0.5, 1.0, 1.0, {}, 4), PreconditionError);

    int calls = 0;
    HybridOptions opts;
    opts.error_at = [&](double, const NodalAngularField&) { return double(++calls); };
    auto result = run_hybrid(prob.spec, 2, opts);
    CHECK(calls == 2);
    std::ostringstream out;
    result.diagnostics.write_csv(out);
    CHECK(out.str().rfind("m,t_m,uncollided_norm,collided_norm,remap_residual,source_residual,cumulative_error\n1,0.5,", 0) == 0);
    CHECK(result.diagnostics.intervals[1].cumulative_error == 2.0);
}
