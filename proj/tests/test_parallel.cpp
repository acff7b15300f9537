#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "hybridpn/hybrid.hpp"
#include "hybridpn/manufactured.hpp"
#include "hybridpn/sweep.hpp"
#include "hybridpn/transport.hpp"

// Every parallel kernel writes disjoint slots, so results must match the serial path bit for bit.

using namespace hybridpn;

namespace {

using cplx = std::complex<double>;

ProblemSpec with_source(double eps, int dimension) {
    ManufacturedParams p;
    p.eps = eps;
    p.dimension = dimension;
    p.modes = 5;
    p.dt = 0.25;
    p.band = 6;
    auto prob = manufactured("sobolev-s", p);
    ProblemSpec spec = prob.spec;
    ScalarField s(spec.grid());
    s.at({1, 0, 0}) = cplx(0.3, 0.2);
    s.at({-1, 0, 0}) = cplx(0.3, -0.2);
    spec.q.push_back({s, sobolev_profile(1, 4), TimeProfile{{1.0, -0.5}, 0.3}});
    return spec;
}

template <class M>
bool identical(const M& a, const M& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("P_N serial and parallel agree bitwise") {
    for (int d : {1, 2}) {
        const ProblemSpec spec = with_source(0.3, d);
        PnOptions serial, parallel;
        serial.exec = Execution::serial;
        parallel.exec = Execution::parallel;
        const auto a = solve_pn(spec, 5, serial).final_state();
        const auto b = solve_pn(spec, 5, parallel).final_state();
        CHECK(identical(a.coeffs, b.coeffs));
    }
}

TEST_CASE("hybrid serial and parallel agree bitwise") {
    const ProblemSpec spec = with_source(0.5, 2);
    HybridOptions serial, parallel;
    serial.exec = Execution::serial;
    parallel.exec = Execution::parallel;
    const auto a = run_hybrid(spec, 3, serial);
    const auto b = run_hybrid(spec, 3, parallel);
    CHECK(identical(a.total.coeffs, b.total.coeffs));
    std::ostringstream da, db;
    a.diagnostics.write_csv(da);
    b.diagnostics.write_csv(db);
    CHECK(da.str() == db.str());
}

TEST_CASE("uncollided serial and parallel agree bitwise") {
    const ProblemSpec spec = with_source(0.5, 2);
    auto quad = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(8));
    const auto u0 = to_nodal(spec.g, quad);
    const auto a = solve_uncollided(u0, 0.0, 1.0, spec.eps, spec.sigma(), spec.q, Execution::serial);
    const auto b = solve_uncollided(u0, 0.0, 1.0, spec.eps, spec.sigma(), spec.q, Execution::parallel);
    CHECK(identical(a.coeffs, b.coeffs));
}

TEST_CASE("sweep output does not depend on the worker count") {
    RunSpec spec;
    spec.problem = "iso-smooth";
    spec.solver = SolverKind::hybrid;
    spec.params.eps = 0.5;
    spec.sweep_dt = {1.0, 0.5, 0.25};
    spec.sweep_N = {1, 3};
    auto text = [&](int jobs) {
        spec.jobs = jobs;
        auto rows = run_sweep(spec);
        for (auto& r : rows) r.walltime_s = 0.0;
        std::ostringstream out;
        write_sweep_csv(rows, out);
        return out.str();
    };
    const std::string one = text(1);
    CHECK(text(4) == one);
    CHECK(text(6) == one);
}
