// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include <Eigen/SVD>

#include "hybridpn/bounds.hpp"
#include "hybridpn/config.hpp"
#include "hybridpn/harmonics.hpp"
#include "hybridpn/manufactured.hpp"
#include "hybridpn/quadrature.hpp"
#include "hybridpn/sweep.hpp"
#include "hybridpn/transport.hpp"

using namespace hybridpn;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0.0 && seconds > budget_s) out.require(false, "over the runtime budget");
    if (!out.pass) ++failures;
    std::printf("criterion %2d %s  %s (%.2f s)%s%s\n", id, out.pass ? "PASS" : "FAIL", name, seconds,
                out.detail.empty() ? "" : "  -- ", out.detail.c_str());
    std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int workers() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

RunSpec config(const std::string& name) {
    RunSpec spec = parse_config_file(std::string(HYBRIDPN_CONFIG_DIR) + "/" + name);
    spec.jobs = workers();
    return spec;
}

// sweeps shared by criteria 8-11
std::vector<SweepRow> sobolev_rows, diffusion_rows, diffusive_rows, streaming_rows;

double slope_along(const std::vector<SweepRow>& rows, const std::string& axis) {
    for (const auto& s : fit_and_check(rows, "slope").slopes)
        if (s.axis == axis) return s.slope;
    return NAN;
}

}  // namespace

int main() {
    criterion(1, "coupling oracle and block norms", 10, [] {
        Outcome o;
        double worst = 0.0, biggest = 0.0;
        for (int N = 1; N <= 9; ++N) {
            const auto exact = assemble_coupling(N);
            worst = std::max(worst, max_abs_difference(
                                        exact, coupling_oracle(N, build_sphere_quadrature(
                                                                      polar_order_for_exactness(2 * N + 1)))));
            for (int axis = 0; axis < 3; ++axis)
                for (int l = 1; l <= N; ++l) {
                    Eigen::JacobiSVD<Eigen::MatrixXd> svd(exact.block(axis, l));
                    biggest = std::max(biggest, svd.singularValues()(0));
                }
        }
        o.require(worst < 1e-12, "max diff " + fmt("%.3e", worst));
        o.require(biggest <= 4.0, "largest block norm " + fmt("%.3f", biggest));
        return o;
    });

    // Randomized audits use the default run seed, the same draws as `hybridpn audit`.
    criterion(2, "approximation property on random expansions", 5, [] {
        Outcome o;
        const auto c = audit_approximation(1000, RunSpec{}.seed + 1);
        o.require(c.violations == 0, std::to_string(c.violations) + " violations, first " + c.witness);
        return o;
    });

    criterion(3, "norm-equivalence sandwich on random vectors", 5, [] {
        Outcome o;
        const auto c = audit_norm_equivalence(1000, RunSpec{}.seed);
        o.require(c.violations == 0, std::to_string(c.violations) + " violations, first " + c.witness);
        return o;
    });

    criterion(4, "A^k closed forms against nested quadrature", 30, [] {
        Outcome o;
        const double epss[] = {0.1, 0.3, 0.5, 1.0, 2.0};
        const double sigmas[] = {0.1, 0.5, 1.0, 3.0, 10.0};
        const double deltas[] = {0.01, 0.1, 0.5, 1.0, 2.0};
        double worst = 0.0;
        int over = 0;
        for (int k = 1; k <= 3; ++k)
            for (double eps : epss)
                for (double sigma : sigmas)
                    for (double delta : deltas) {
                        const auto v = a_operator(k, eps, sigma, delta);
                        const double decay = a_operator_quadrature(k, eps, sigma, delta, AOperand::decay);
                        const double one = a_operator_quadrature(k, eps, sigma, delta, AOperand::one);
                        worst = std::max({worst, rel(decay, v.exact_decay), rel(one, v.exact_one)});
                        if (one > v.bound * (1.0 + 1e-12)) ++over;
                    }
        o.require(worst < 1e-9, "worst relative mismatch " + fmt("%.3e", worst));
        o.require(over == 0, std::to_string(over) + " points above the A^k[1] bound");
        return o;
    });

    criterion(5, "beta identities and asymptotics", 5, [] {
        Outcome o;
        double worst = 0.0;
        for (double sigma : {0.1, 1.0, 7.0})
            for (double len : {0.05, 0.5, 2.0}) {
                const double i1 = integrate_graded([&](double u) { return u * kernel_functions(sigma * u).beta1; },
                                                   0.0, len, 0.0, 24);
                const double i2 = integrate_graded(
                    [&](double u) { return u * u * kernel_functions(sigma * u).beta2; }, 0.0, len, 0.0, 24);
                const Kernels kk = kernel_functions(sigma * len);
                worst = std::max({worst, rel(i1, len * len * kk.beta2), rel(i2, 0.5 * len * len * len * kk.beta3)});
            }
        o.require(worst < 1e-8, "identity mismatch " + fmt("%.3e", worst));
        const Kernels small = kernel_functions(1e-4), big = kernel_functions(100.0);
        const double slopes[] = {small.beta1 / 1e-4, small.beta2 / 1e-4, small.beta3 / 1e-4};
        const double factorial[] = {2.0, 6.0, 24.0};
        for (int n = 0; n < 3; ++n)
            o.require(rel(slopes[n], 1.0 / factorial[n]) < 1e-3,
                      "beta" + std::to_string(n + 1) + "(1e-4)/1e-4 = " + fmt("%.6f", slopes[n]) + ", expected " +
                          fmt("%.6f", 1.0 / factorial[n]));
        for (double b : {big.beta1, big.beta2, big.beta3})
            o.require(b * 100.0 >= 0.9 && b * 100.0 <= 1.1, "100 beta(100) = " + fmt("%.4f", b * 100.0));
        return o;
    });

    criterion(6, "P_N energy decay, mass and aniso-decay rate", 30, [] {
        Outcome o;
        ManufacturedParams p;
        p.eps = 0.5;
        p.sigma_t = 1.0;
        p.dimension = 2;
        p.modes = 5;
        for (const char* name : {"iso-smooth", "aniso-decay"}) {
            const auto prob = manufactured(name, p);
            PnOptions opts;
            for (int i = 1; i <= 50; ++i) opts.output_times.push_back(i / 50.0);
            const auto traj = solve_pn(prob.spec, 7, opts);
            const int k0 = prob.spec.grid().mode_index({0, 0, 0});
            const double mass = traj.states[0].coeffs(0, k0).real();
            double growth = 0.0, drift = 0.0, decay = 0.0;
            for (std::size_t i = 1; i < traj.rows.size(); ++i) {
                growth = std::max(growth, traj.rows[i].norm - traj.rows[i - 1].norm);
                drift = std::max(drift, std::abs(traj.states[i].coeffs(0, k0).real() - mass));
                if (prob.exact_nodal) {
                    MomentField expected = traj.states[0];
                    expected.coeffs *= std::exp(-p.sigma_t * traj.times[i] / (p.eps * p.eps));
                    MomentField d = traj.states[i];
                    d.coeffs -= expected.coeffs;
                    decay = std::max(decay, l2_norm(d) / l2_norm(expected));
                }
            }
            o.require(growth <= 1e-10, std::string(name) + " norm grows by " + fmt("%.3e", growth));
            o.require(drift <= 1e-12, std::string(name) + " mean flux drifts by " + fmt("%.3e", drift));
            o.require(decay <= 1e-10, std::string(name) + " decay mismatch " + fmt("%.3e", decay));
        }
        return o;
    });

    criterion(7, "hybrid exact for sigma = 0", 60, [] {
        Outcome o;
        RunSpec spec;
        spec.problem = "streaming";
        spec.solver = SolverKind::hybrid;
        spec.params.dimension = 2;
        spec.params.eps = 0.5;
        spec.N = 3;
        spec.sweep_dt = {1.0, 0.25};
        spec.jobs = workers();
        for (const auto& r : run_sweep(spec))
            o.require(r.error < 1e-8, "dt " + fmt("%g", r.dt) + " error " + fmt("%.3e", r.error));
        return o;
    });

    criterion(8, "spectral rate on sobolev-s", 600, [] {
        Outcome o;
        sobolev_rows = run_sweep(config("sobolev_n_sweep.cfg"));
        const double slope = slope_along(sobolev_rows, "N");
        o.require(slope <= -1.5, "slope " + fmt("%.3f", slope));
        o.detail = o.pass ? "slope " + fmt("%.3f", slope) : o.detail;
        return o;
    });

    criterion(9, "diffusion limit recovered", 600, [] {
        Outcome o;
        const RunSpec spec = config("diffusion_pn.cfg");
        double previous = INFINITY;
        std::string trail;
        for (double eps : spec.sweep_eps) {
            ManufacturedParams p = spec.params;
            p.eps = eps;
            const auto prob = manufactured(spec.problem, p).spec;
            ScalarField d = scalar_flux(solve_pn(prob, spec.N, {}).final_state());
            d.coeffs -= solve_diffusion(prob, prob.T).coeffs;
            const double gap = d.l2_norm();
            o.require(gap < previous, "gap " + fmt("%.3e", gap) + " at eps " + fmt("%g", eps) + " not below the last");
            previous = gap;
            trail += (trail.empty() ? "" : " ") + fmt("%.2e", gap);
        }
        if (o.pass) o.detail = "gaps " + trail;
        // P_3 rows over the same sweep feed the conformance check
        diffusion_rows = run_sweep(spec);
        return o;
    });

    criterion(10, "hybrid dt behaviour in both regimes", 900, [] {
        Outcome o;
        diffusive_rows = run_sweep(config("hybrid_diffusive.cfg"));
        double lo = INFINITY, hi = 0.0;
        for (const auto& r : diffusive_rows) {
            lo = std::min(lo, r.error);
            hi = std::max(hi, r.error);
        }
        o.require(hi < 2.0 * lo, "diffusive spread " + fmt("%.3f", hi / lo));

        streaming_rows = run_sweep(config("hybrid_streaming.cfg"));  // ordered by increasing dt
        for (std::size_t i = 1; i < streaming_rows.size(); ++i)
            o.require(streaming_rows[i - 1].error <= streaming_rows[i].error,
                      "streaming error rises at dt " + fmt("%g", streaming_rows[i - 1].dt));
        const double slope = slope_along(streaming_rows, "dt");
        o.require(slope >= 1.0, "streaming dt slope " + fmt("%.3f", slope));
        if (o.pass) o.detail = "diffusive spread " + fmt("%.4f", hi / lo) + ", streaming slope " + fmt("%.3f", slope);
        return o;
    });

    criterion(11, "bound conformance over the sweeps of 8-10", 0, [] {
        Outcome o;
        std::vector<SweepRow> all;
        for (const auto* rows : {&sobolev_rows, &diffusion_rows, &diffusive_rows, &streaming_rows})
            all.insert(all.end(), rows->begin(), rows->end());
        o.require(!sobolev_rows.empty() && !diffusion_rows.empty() && !diffusive_rows.empty() &&
                      !streaming_rows.empty(),
                  "a prerequisite sweep did not run");
        std::string constants;
        for (const auto& rep : fit_families(all)) {
            o.require(rep.conformant(), rep.family + " has " + std::to_string(rep.violations) + " violations");
            o.require(rep.flagged == 0, rep.family + " has " + std::to_string(rep.flagged) + " flagged rows");
            constants += (constants.empty() ? "" : ", ") + rep.family + " C=" + fmt("%.3g", rep.C);
        }
        if (o.pass) o.detail = constants;
        return o;
    });

    criterion(12, "absorption transform", 60, [] {
        Outcome o;
        ManufacturedParams p;
        p.eps = 0.6;
        p.sigma_t = 1.0;
        p.sigma_a = 0.5;
        p.dimension = 2;
        for (const char* name : {"sobolev-s", "iso-smooth"}) {
            const auto spec = manufactured(name, p).spec;
            const auto tr = absorption_wrap(spec);
            const auto direct = solve_pn(spec, 6, {}).final_state();
            const auto wrapped = tr.restore(solve_pn(tr.scattering, 6, {}).final_state(), spec.T);
            const double d = (direct.coeffs - wrapped.coeffs).cwiseAbs().maxCoeff();
            o.require(d < 1e-10, std::string(name) + " differs by " + fmt("%.3e", d));
        }
        return o;
    });

    criterion(13, "shift inequality audit, s <= 5, l <= 64", 1, [] {
        Outcome o;
        const auto c = audit_shift_inequality(5, 64);
        o.require(c.evaluated > 0 && c.violations == 0, std::to_string(c.violations) + " violations");
        return o;
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
