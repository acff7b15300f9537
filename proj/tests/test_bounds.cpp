#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "hybridpn/bounds.hpp"
#include "hybridpn/errors.hpp"
#include "hybridpn/quadrature.hpp"

using namespace hybridpn;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

DataNorms unit_norms(int s) {
    DataNorms n;
    for (const auto& p : required_norms(s, false)) n[p] = {1.0, 1.0, 1.0};
    return n;
}

BoundInputs inputs(int s, int N, double eps, double sigma, double T, double dt) {
    BoundInputs in;
    in.s = s;
    in.N = N;
    in.eps = eps;
    in.sigma = sigma;
    in.T = T;
    in.dt = dt;
    in.norms = unit_norms(s);
    return in;
}

}  // namespace

TEST_CASE("kernel functions") {
    const Kernels z = kernel_functions(0.0);
    CHECK(z.kappa == 1.0);
    CHECK(z.gamma == 1.0);
    CHECK(z.beta1 == 0.0);
    CHECK(z.beta3 == 0.0);

    const Kernels one = kernel_functions(1.0);
    CHECK(rel(one.gamma, 0.63212055882855767) < 1e-15);
    CHECK(rel(one.beta1, 0.26424111765711533) < 1e-15);

    // branch agreement in a window around the switch point
    for (double tau = 0.9 * kKernelSwitch; tau <= 1.1 * kKernelSwitch; tau += 0.01) {
        const Kernels a = kernel_series(tau), b = kernel_closed_form(tau);
        CHECK(rel(a.kappa, b.kappa) < 1e-13);
        CHECK(rel(a.gamma, b.gamma) < 1e-13);
        CHECK(rel(a.beta1, b.beta1) < 1e-13);
        CHECK(rel(a.beta2, b.beta2) < 1e-13);
        CHECK(rel(a.beta3, b.beta3) < 1e-13);
    }

    const Kernels small = kernel_functions(1e-4);
    CHECK(rel(small.beta1 / 1e-4, 1.0 / 2.0) < 1e-3);
    CHECK(rel(small.beta2 / 1e-4, 1.0 / 6.0) < 1e-3);
    // the stated closed form of beta3 has slope 1/12 at the origin
    CHECK(rel(small.beta3 / 1e-4, 1.0 / 12.0) < 1e-3);

    const Kernels big = kernel_functions(100.0);
    for (double b : {big.beta1, big.beta2, big.beta3}) {
        CHECK(b * 100.0 >= 0.9);
        CHECK(b * 100.0 <= 1.1);
    }
    CHECK_THROWS_AS(kernel_functions(-1.0), DomainError);
}

TEST_CASE("Gamma") {
    for (double sigma : {0.0, 1e-6, 0.3, 2.0, 40.0})
        for (double t : {0.0, 0.5, 2.0}) {
            // int_0^t gamma(w) w dw by quadrature
            const double q = integrate_graded([&](double w) { return kernel_functions(sigma * w).gamma * w; }, 0.0,
                                              t, 0.0, 24);
            CHECK(std::abs(big_gamma(sigma, t) - q) <= 1e-13 * std::max(1.0, q));
        }
    CHECK(big_gamma(0.0, 3.0) == 4.5);
}

TEST_CASE("beta integral identities") {
    for (double sigma : {0.1, 1.0, 7.0})
        for (double len : {0.05, 0.5, 2.0}) {
            const double i1 = integrate_graded([&](double u) { return u * kernel_functions(sigma * u).beta1; }, 0.0,
                                               len, 0.0, 24);
            const double i2 = integrate_graded(
                [&](double u) { return u * u * kernel_functions(sigma * u).beta2; }, 0.0, len, 0.0, 24);
            const Kernels k = kernel_functions(sigma * len);
            CHECK(rel(i1, len * len * k.beta2) < 1e-8);
            CHECK(rel(i2, 0.5 * len * len * len * k.beta3) < 1e-8);
        }
}

TEST_CASE("A^k operator") {
    auto a0 = a_operator(0, 0.7, 1.3, 0.4);
    CHECK(a0.bound == 1.0);
    CHECK(rel(a0.exact_decay, std::exp(-1.3 * 0.4 / 0.49)) < 1e-15);

    auto a1 = a_operator(1, 1.0, 1.0, 1.0);
    CHECK(a1.bound == 1.0);
    CHECK(rel(a1.exact_decay, 0.36787944117144233) < 1e-15);
    auto a2 = a_operator(2, 1.0, 1.0, 1.0);
    CHECK(rel(a2.exact_decay, 0.18393972058572117) < 1e-15);
    CHECK(rel(a_operator_quadrature(2, 1.0, 1.0, 1.0, AOperand::decay), a2.exact_decay) < 1e-9);

    auto free = a_operator(2, 0.5, 0.0, 1.0);
    CHECK(std::isinf(free.diffusive));
    CHECK(free.bound == 2.0);
    CHECK(rel(free.exact_one, 2.0) < 1e-15);

    for (int k = 1; k <= 3; ++k)
        for (double eps : {0.3, 1.0})
            for (double sigma : {0.2, 3.0})
                for (double delta : {0.1, 2.0}) {
                    auto v = a_operator(k, eps, sigma, delta);
                    const double one = a_operator_quadrature(k, eps, sigma, delta, AOperand::one);
                    CHECK(rel(one, v.exact_one) < 1e-9);
                    CHECK(one <= v.bound * (1.0 + 1e-12));
                    CHECK(rel(a_operator_quadrature(k, eps, sigma, delta, AOperand::decay), v.exact_decay) < 1e-9);
                }
    CHECK_THROWS_AS(a_operator(1, 0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("P_N bound") {
    // isotropic, eps = sigma = T = 1, s = 1, N = 3
    BoundInputs in = inputs(1, 3, 1.0, 1.0, 1.0, 1.0);
    in.isotropic = true;
    in.norms = {{{2, 0}, {0.7, 0.2, 0.2}}};
    auto r = pn_error_bound(in);
    CHECK(r.regime == "diffusive");
    CHECK(r.terms.size() == 1);
    CHECK(rel(r.total, 2.0 / 4.0 * (0.7 + 0.2) * std::min(1.0, 1.0)) < 1e-15);

    in.norms = {{{2, 0}, {}}};
    CHECK(pn_error_bound(in).total == 0.0);

    // full theorem, s = 2, double-entry transcription
    BoundInputs f = inputs(2, 4, 0.5, 0.8, 1.5, 0.5);
    f.norms[{0, 2}] = {0.3, 0.4, 0.0};
    f.norms[{3, 0}] = {1.1, 0.6, 0.0};
    f.norms[{1, 2}] = {0.9, 0.5, 0.0};
    f.norms[{2, 1}] = {0.8, 0.7, 0.0};
    const double e = 0.5, s = 0.8, T = 1.5, p = 1.0 / 25.0, L = std::exp(-s * T / (e * e));
    double expected = L * p * 0.3 + p * 0.4 * std::min(e * e / s, T);
    expected += 2 * p * (1.1 + T * 0.6) * std::min(e * 2 * T / (s * s), std::pow(T / e, 3));
    expected += 2 * p * L * (0.9 * 1 * T / e + 0.8 * 2 * T * T / (e * e));
    expected += 2 * p * (0.5 * 1 * std::min(e * T / s, T * T / e) + 0.7 * 2 * std::min(e * e * T / (s * s), T * T * T / (2 * e * e)));
    auto full = pn_error_bound(f);
    CHECK(rel(full.total, expected) < 1e-14);
    double sum = 0.0;
    for (const auto& t : full.terms) {
        CHECK(t.value >= 0.0);
        sum += t.value;
    }
    CHECK(sum == full.total);

    // sigma -> 0: first summand tends to |g|_{H^{0,s}}/(N+1)^s
    f.sigma = 1e-12;
    CHECK(rel(pn_error_bound(f).terms[0].value, 0.3 * p) < 1e-10);

    BoundInputs missing = f;
    missing.norms.erase({2, 1});
    try {
        pn_error_bound(missing);
        FAIL("expected a missing-norm error");
    } catch (const PreconditionError& err) {
        CHECK(std::string(err.what()).find("(2,1)") != std::string::npos);
    }
}

TEST_CASE("hybrid bound") {
    BoundInputs in = inputs(2, 3, 1.0, 0.0, 1.0, 0.25);
    CHECK(hybrid_error_bound(in).total == 0.0);

    in.sigma = 1.0;
    in.T = 4.0;
    in.dt = 4.0;
    auto big = hybrid_error_bound(in);
    CHECK(big.regime == "diffusive");
    CHECK(rel(big.total, 2.0 / 16.0 * (1.0 + 4.0) * 8.0) < 1e-15);

    // streaming branch below the inner switch: dt -> dt/2 scales by 2^{-(s+1)}
    in.sigma = 0.1;
    in.dt = 0.5;
    auto a = hybrid_error_bound(in);
    in.dt = 0.25;
    auto b = hybrid_error_bound(in);
    CHECK(a.regime == "streaming");
    CHECK(a.terms[0].branch == "streaming; inner dt*sigma/eps^2");
    CHECK(rel(b.total / a.total, 0.125) < 1e-14);

    // monotone in dt and N
    for (double sigma : {0.1, 1.0, 10.0}) {
        in.sigma = sigma;
        double prev = 0.0;
        for (double dt : {0.01, 0.05, 0.25, 1.0, 2.0, 4.0}) {
            in.dt = dt;
            const double v = hybrid_error_bound(in).total;
            CHECK(v >= prev);
            prev = v;
        }
        prev = INFINITY;
        for (int N = 1; N < 12; ++N) {
            in.N = N;
            const double v = hybrid_error_bound(in).total;
            CHECK(v <= prev);
            prev = v;
        }
        in.N = 3;
    }

    // labels flip at the crossover
    in.sigma = 0.5;
    const double star = regime_advisor(in.eps, in.sigma, in.T, in.s).crossover_dt;
    in.dt = star * (1.0 - 1e-9);
    CHECK(hybrid_error_bound(in).regime == "streaming");
    in.dt = star * (1.0 + 1e-9);
    CHECK(hybrid_error_bound(in).regime == "diffusive");
}

TEST_CASE("absorbing bounds") {
    BoundInputs in = inputs(2, 3, 0.5, 1.0, 1.0, 0.25);
    auto plain = pn_error_bound(in);
    auto hplain = hybrid_error_bound(in);
    auto zero = absorbing_bounds(in);
    CHECK(zero.pn.total == plain.total);
    CHECK(zero.hybrid.total == hplain.total);

    // q-free data: every term carries g and picks up e^{-sigma_a T}
    for (auto& [pair, n] : in.norms) n.q_sup = n.q_l1 = 0.0;
    const double pn0 = pn_error_bound(in).total, hy0 = hybrid_error_bound(in).total;
    in.sigma_a = 1.0;
    auto damped = absorbing_bounds(in);
    CHECK(rel(damped.pn.total, pn0 * std::exp(-1.0)) < 1e-14);
    CHECK(rel(damped.hybrid.total, hy0 * std::exp(-1.0)) < 1e-14);

    // g = 0: the hybrid bound does not see sigma_a
    for (auto& [pair, n] : in.norms) {
        n.g = 0.0;
        n.q_sup = 1.0;
    }
    in.sigma_a = 0.0;
    const double h0 = absorbing_bounds(in).hybrid.total;
    in.sigma_a = 0.7;
    CHECK(absorbing_bounds(in).hybrid.total == h0);
    in.sigma_a = 1.5;
    CHECK_THROWS_AS(absorbing_bounds(in), DomainError);
}

TEST_CASE("unscaled bounds") {
    UnscaledNorms n{0.3, 0.5, 0.7, 1.1, 1.3, 1.7, 1.9, 2.3};
    const double t = 0.8;
    auto lim = unscaled_bounds(1e-14, t, 0.2, 0, n);
    // [1 - gamma] t / sigma keeps a t^2/2 limit
    CHECK(rel(lim.E1, 0.3 + (0.5 + 0.7) * t + 1.1 * t * t / 2) < 1e-10);
    UnscaledNorms no_dxq = n;
    no_dxq.dx_q = 0.0;
    CHECK(rel(unscaled_bounds(1e-14, t, 0.2, 0, no_dxq).E1, 0.3 + (0.5 + 0.7) * t) < 1e-12);

    // double entry at sigma = 2
    const double s = 2.0, e = std::exp(-s * t), g = (1 - e) / (s * t), G = t / s - (1 - e) / (s * s);
    auto v = unscaled_bounds(s, t, 0.2, 0, n);
    CHECK(rel(v.E1, 0.3 * e + 1.2 * g * t + 1.1 * (1 - g) * t / s) < 1e-14);
    CHECK(rel(v.E2, 1.3 * g * t + (1.7 + 1.9) * G + 2.3 * (t * t / 2 - G) / s) < 1e-14);
    CHECK(rel(unscaled_bounds(1e-9, t, 0.2, 0, n).E2, lim.E2) < 1e-8);

    // interval integral against quadrature of the pointwise estimate
    for (double sigma : {0.3, 4.0})
        for (int m : {0, 3}) {
            const double dt = 0.4, tm = m * dt;
            auto w = unscaled_bounds(sigma, t, dt, m, n);
            auto pointwise = [&](double u) {
                const Kernels k = kernel_functions(sigma * u);
                return u * k.beta1 * n.d2_g + (u * tm * k.beta1 + u * u * k.beta2) * n.d2_q;
            };
            CHECK(rel(integrate_graded(pointwise, 0.0, dt, 0.0, 24), w.interval_integral) < 1e-12);
            CHECK(rel(pointwise(dt), w.interval_end) < 1e-12);
        }
}

TEST_CASE("regime advisor") {
    CHECK(regime_advisor(0.05, 1.0, 1.0, 2).label.rfind("diffusive; dt unconstrained", 0) == 0);
    auto free = regime_advisor(1.0, 0.0, 1.0, 1);
    CHECK(free.label == "streaming-exact; any dt gives zero bound");
    CHECK(std::isinf(free.crossover_dt));

    for (int s : {1, 2, 3}) {
        const double eps = 1.0, sigma = 0.1, T = 1.0;
        const double dt = regime_advisor(eps, sigma, T, s).crossover_dt;
        CHECK(rel(hybrid_streaming_branch(eps, sigma, T, s, dt), hybrid_diffusive_branch(eps, sigma, T, s)) < 1e-10);
        // bisection on the branch difference lands on the same root
        double lo = 1e-6, hi = 1e6;
        for (int i = 0; i < 200; ++i) {
            const double mid = std::sqrt(lo * hi);
            (hybrid_streaming_branch(eps, sigma, T, s, mid) < hybrid_diffusive_branch(eps, sigma, T, s) ? lo : hi) = mid;
        }
        CHECK(rel(lo, dt) < 1e-10);
    }
    CHECK(regime_advisor(1.0, 0.1, 1.0, 1).label.rfind("streaming", 0) == 0);
    CHECK(regime_advisor(0.3, 1.0, 1.0, 1).label.rfind("transitional", 0) == 0);
}

TEST_CASE("inequality audits") {
    auto shift = audit_shift_inequality(5, 64);
    CHECK(shift.violations == 0);
    CHECK(shift.evaluated == 5 * 65 - 15);
    // The lower bound fails on degree-1 vectors dominated by the l = 0 block; some
    // seeds draw one. The upper bound must hold on every draw.
    int lower = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto eq = audit_norm_equivalence(1000, seed);
        if (eq.violations == 0) continue;
        ++lower;
        CHECK(eq.witness.find(" lower") != std::string::npos);
    }
    CHECK(lower > 0);
    CHECK(audit_approximation(1000, 4).violations == 0);
    auto zero = audit_equivalence_degree_zero();
    CHECK(zero.violations == 3);
    CHECK(zero.known_issue);
    auto report = audit_inequalities(5, 64, 200, 1);
    CHECK(report.passed() == (report.checks[1].violations == 0));
    std::ostringstream text;
    report.write_text(text);
    CHECK(text.str().find("known norm equivalence, degree-0 vectors") != std::string::npos);
}

TEST_CASE("report serialization") {
    BoundInputs in = inputs(1, 2, 1.0, 1.0, 1.0, 0.5);
    auto r = pn_error_bound(in);
    std::ostringstream csv;
    r.write_csv(csv);
    CHECK(csv.str().rfind("term,value,branch\ninitial_tail,", 0) == 0);
    CHECK(csv.str().find("\ntotal,") != std::string::npos);
    std::ostringstream text;
    r.write_text(text);
    CHECK(text.str().rfind("pn (C_s = 1)\n", 0) == 0);
}
