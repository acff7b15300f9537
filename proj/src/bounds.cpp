#include "hybridpn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hybridpn/errors.hpp"
#include "hybridpn/harmonics.hpp"
#include "hybridpn/quadrature.hpp"

namespace hybridpn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSeriesTerms = 30;

double factorial(int n) { return std::tgamma(n + 1.0); }

// s! / (s-i)!
double falling(int s, int i) { return factorial(s) / factorial(s - i); }

double binomial(int s, int i) { return factorial(s) / (factorial(i) * factorial(s - i)); }

// a / b with a / 0 = +inf for a > 0 and 0 / 0 = +inf (the branch is absent).
double ratio(double a, double b) { return b == 0.0 ? kInf : a / b; }

struct Min {
    double value;
    bool first;
};

Min pick(double a, double b) { return a <= b ? Min{a, true} : Min{b, false}; }

const DataNorm& norm_at(const DataNorms& norms, int r, int s) {
    auto it = norms.find({r, s});
    if (it == norms.end())
        throw PreconditionError("missing data norm (" + std::to_string(r) + "," + std::to_string(s) + ")");
    return it->second;
}

void validate(const BoundInputs& in) {
    if (in.s < 1) throw DomainError("bounds: s must be >= 1");
    if (in.N < in.s - 1) throw DomainError("bounds: N must be >= s-1");
    if (!(in.eps > 0.0) || in.sigma < 0.0 || in.T < 0.0 || !(in.dt > 0.0))
        throw DomainError("bounds: need eps > 0, sigma >= 0, T >= 0, dt > 0");
    for (const auto& [pair, n] : in.norms)
        if (!(n.g >= 0.0) || !(n.q_sup >= 0.0) || !(n.q_l1 >= 0.0))
            throw DomainError("bounds: negative or NaN data norm");
}

void finish(BoundReport& r) {
    r.total = 0.0;
    for (const auto& t : r.terms) r.total += t.value;
}

// Shared body of the P_N theorem; `g_damp` multiplies the g-terms of the leading min,
// `layer` is the initial-layer factor on the remaining g-terms.
BoundReport pn_report(const BoundInputs& in, const std::string& theorem, double g_damp, double layer) {
    const int s = in.s;
    const double eps = in.eps, sigma = in.sigma, T = in.T;
    const double pref = 1.0 / std::pow(in.N + 1.0, s);
    const double C2 = 2.0 * in.C_s * pref;
    BoundReport r;
    r.theorem = theorem;
    r.C_s = in.C_s;

    const DataNorm& top = norm_at(in.norms, s + 1, 0);
    const Min lead = pick(ratio(std::pow(eps, s - 1) * factorial(s) * T, std::pow(sigma, s)),
                          std::pow(T / eps, s + 1));
    r.regime = lead.first ? "diffusive" : "streaming";
    const double lead_value = C2 * (g_damp * top.g + T * top.q_sup) * lead.value;

    if (in.isotropic) {
        r.terms.push_back({"data_smoothness", lead_value, r.regime});
        finish(r);
        return r;
    }

    const DataNorm& angular = norm_at(in.norms, 0, s);
    r.terms.push_back({"initial_tail", layer * pref * angular.g, ""});
    const Min src = pick(eps * eps / sigma, T);
    r.terms.push_back({"source_tail", pref * angular.q_sup * src.value, src.first ? "eps^2/sigma" : "T"});
    r.terms.push_back({"data_smoothness", lead_value, r.regime});
    for (int i = 0; i < s; ++i) {
        const DataNorm& mixed = norm_at(in.norms, 1 + i, s - i);
        const std::string tag = "_" + std::to_string(i);
        r.terms.push_back({"initial_mixed" + tag,
                           C2 * layer * mixed.g * binomial(s, i) * std::pow(T / eps, i + 1), ""});
        const Min m = pick(ratio(std::pow(eps, i + 1) * T, std::pow(sigma, i + 1)),
                           std::pow(T, i + 2) / (factorial(i + 1) * std::pow(eps, i + 1)));
        r.terms.push_back({"source_mixed" + tag, C2 * mixed.q_sup * falling(s, i) * m.value,
                           m.first ? "diffusive" : "streaming"});
    }
    finish(r);
    return r;
}

BoundReport hybrid_report(const BoundInputs& in, const std::string& theorem, double g_damp) {
    const int s = in.s;
    const double C2 = 2.0 * in.C_s / std::pow(in.N + 1.0, s);
    const DataNorm& top = norm_at(in.norms, s + 1, 0);
    BoundReport r;
    r.theorem = theorem;
    r.C_s = in.C_s;
    const double diffusive = hybrid_diffusive_branch(in.eps, in.sigma, in.T, s);
    const double streaming = hybrid_streaming_branch(in.eps, in.sigma, in.T, s, in.dt);
    const Min lead = pick(diffusive, streaming);
    const bool inner_one = in.dt * in.sigma / (in.eps * in.eps) >= 1.0;
    r.regime = lead.first ? "diffusive" : "streaming";
    r.terms.push_back({"data_smoothness", C2 * (g_damp * top.g + in.T * top.q_sup) * lead.value,
                       r.regime + (lead.first ? "" : inner_one ? "; inner 1" : "; inner dt*sigma/eps^2")});
    finish(r);
    return r;
}

// sum_j c_j tau^j
double poly(const double* c, int n, double tau) {
    double v = 0.0;
    for (int j = n - 1; j >= 0; --j) v = v * tau + c[j];
    return v;
}

struct SeriesCoefficients {
    double kappa[kSeriesTerms], gamma[kSeriesTerms], beta1[kSeriesTerms], beta2[kSeriesTerms],
        beta3[kSeriesTerms], big_gamma[kSeriesTerms];
    SeriesCoefficients() {
        for (int j = 0; j < kSeriesTerms; ++j) {
            const double sign = j % 2 == 0 ? 1.0 : -1.0;  // (-1)^j
            kappa[j] = sign / factorial(j);
            // gamma: n = j+1; beta1: n = j+2; beta2: n = j+3; beta3: n = j+4
            gamma[j] = sign / factorial(j + 1);
            beta1[j] = sign * (j + 1) / factorial(j + 2);
            beta2[j] = sign * (j + 1) / factorial(j + 3);
            beta3[j] = sign * (2.0 * j + 2.0) / factorial(j + 4);
            big_gamma[j] = sign / factorial(j + 2);
        }
    }
};

const SeriesCoefficients& series() {
    static const SeriesCoefficients c;
    return c;
}

}  // namespace

Kernels kernel_closed_form(double tau) {
    const double e = std::exp(-tau);
    Kernels k;
    k.kappa = e;
    k.gamma = -std::expm1(-tau) / tau;
    k.beta1 = (1.0 - e - tau * e) / tau;
    k.beta2 = (tau * e + 2.0 * e + tau - 2.0) / (tau * tau);
    k.beta3 = (tau * tau - 4.0 * tau - 2.0 * tau * e + 6.0 - 6.0 * e) / (tau * tau * tau);
    return k;
}

Kernels kernel_series(double tau) {
    const auto& c = series();
    Kernels k;
    k.kappa = poly(c.kappa, kSeriesTerms, tau);
    k.gamma = poly(c.gamma, kSeriesTerms, tau);
    k.beta1 = tau * poly(c.beta1, kSeriesTerms, tau);
    k.beta2 = tau * poly(c.beta2, kSeriesTerms, tau);
    k.beta3 = tau * poly(c.beta3, kSeriesTerms, tau);
    return k;
}

Kernels kernel_functions(double tau) {
    if (!(tau >= 0.0)) throw DomainError("kernel_functions: tau must be non-negative");
    if (std::isinf(tau)) return {0.0, 0.0, 0.0, 0.0, 0.0};
    return tau < kKernelSwitch ? kernel_series(tau) : kernel_closed_form(tau);
}

double big_gamma(double sigma, double t) {
    if (sigma < 0.0 || t < 0.0) throw DomainError("big_gamma: sigma and t must be non-negative");
    const double tau = sigma * t;
    if (tau < kKernelSwitch) return t * t * poly(series().big_gamma, kSeriesTerms, tau);
    return t / sigma + std::expm1(-tau) / (sigma * sigma);
}

AOperatorValue a_operator(int k, double eps, double sigma, double delta) {
    if (k < 0 || !(eps > 0.0) || sigma < 0.0 || delta < 0.0)
        throw DomainError("a_operator: need k >= 0, eps > 0, sigma >= 0, Delta >= 0");
    AOperatorValue v;
    const double x = sigma * delta / (eps * eps);
    const double decay = std::exp(-x);
    v.exact_decay = std::pow(delta / eps, k) / factorial(k) * decay;
    if (k == 0) return v;
    v.diffusive = sigma == 0.0 ? kInf : std::pow(eps / sigma, k);
    v.streaming = std::pow(delta / eps, k) / factorial(k);
    v.diffusive_active = v.diffusive <= v.streaming;
    v.bound = std::min(v.diffusive, v.streaming);
    // A^k[1] = (eps/sigma)^k P(k, x), P the regularized lower incomplete gamma
    if (sigma == 0.0 || x < 1.0) {
        // P(k,x) = x^k e^{-x} sum_j x^j / (k+j)!, and (eps/sigma)^k x^k = (Delta/eps)^k
        double term = 1.0 / factorial(k), sum = 0.0;
        for (int j = 0; j < 60; ++j) {
            sum += term;
            term *= x / (k + j + 1);
        }
        v.exact_one = std::pow(delta / eps, k) * decay * sum;
    } else {
        double partial = 0.0, term = 1.0;
        for (int j = 0; j < k; ++j) {
            partial += term;
            term *= x / (j + 1);
        }
        v.exact_one = std::pow(eps / sigma, k) * (1.0 - decay * partial);
    }
    return v;
}

double a_operator_quadrature(int k, double eps, double sigma, double delta, AOperand f, int order) {
    if (k < 0 || !(eps > 0.0) || sigma < 0.0 || delta < 0.0)
        throw DomainError("a_operator_quadrature: need k >= 0, eps > 0, sigma >= 0, Delta >= 0");
    const double lambda = sigma / (eps * eps);
    const GaussRule ref = gauss_legendre(order);
    const double width = lambda > 0.0 ? 1.0 / lambda : kInf;
    auto base = [&](double t) { return f == AOperand::one ? 1.0 : std::exp(-lambda * t); };
    // A^j[f](t) = (1/eps) int_0^t e^{-lambda (t - tau)} A^{j-1}[f](tau) dtau, panels graded toward t
    std::function<double(int, double)> apply = [&](int j, double t) -> double {
        if (j == 0) return base(t);
        if (t <= 0.0) return 0.0;
        auto panel = [&](double lo, double hi) {
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            double sum = 0.0;
            for (int i = 0; i < order; ++i) {
                const double tau = mid + half * ref.nodes[i];
                sum += ref.weights[i] * std::exp(-lambda * (t - tau)) * apply(j - 1, tau);
            }
            return half * sum;
        };
        double total = 0.0, hi = t, span = width;
        while (span < hi) {
            total += panel(hi - span, hi);
            hi -= span;
            span *= 2.0;
        }
        total += panel(0.0, hi);
        return total / eps;
    };
    return apply(k, delta);
}

std::vector<NormPair> required_norms(int s, bool isotropic) {
    std::vector<NormPair> pairs{{s + 1, 0}};
    if (isotropic) return pairs;
    pairs.push_back({0, s});
    for (int i = 0; i < s; ++i) pairs.push_back({1 + i, s - i});
    return pairs;
}

void BoundReport::write_csv(std::ostream& out) const {
    out << "term,value,branch\n" << std::setprecision(17);
    for (const auto& t : terms) out << t.name << ',' << t.value << ',' << t.branch << '\n';
    out << "total," << total << ',' << regime << '\n';
}

void BoundReport::write_text(std::ostream& out) const {
    out << theorem << " (C_s = " << C_s << ")\n" << std::setprecision(6);
    for (const auto& t : terms) {
        out << "  " << std::left << std::setw(18) << t.name << std::right << std::setw(14) << t.value;
        if (!t.branch.empty()) out << "  [" << t.branch << "]";
        out << '\n';
    }
    out << "  " << std::left << std::setw(18) << "total" << std::right << std::setw(14) << total << "  regime "
        << regime << '\n';
}

BoundReport pn_error_bound(const BoundInputs& in) {
    validate(in);
    const double layer = std::exp(-in.sigma * in.T / (in.eps * in.eps));
    return pn_report(in, in.isotropic ? "pn-isotropic" : "pn", 1.0, layer);
}

BoundReport hybrid_error_bound(const BoundInputs& in) {
    validate(in);
    return hybrid_report(in, "hybrid", 1.0);
}

AbsorbingReports absorbing_bounds(const BoundInputs& in) {
    validate(in);
    if (in.sigma_a < 0.0 || in.sigma_a > in.sigma)
        throw DomainError("absorbing_bounds: need 0 <= sigma_a <= sigma_t");
    const double damp = std::exp(-in.sigma_a * in.T);
    const double layer = std::exp(-in.sigma * in.T / (in.eps * in.eps)) * damp;
    return {pn_report(in, in.isotropic ? "pn-absorbing-isotropic" : "pn-absorbing", damp, layer),
            hybrid_report(in, "hybrid-absorbing", damp)};
}

UnscaledBounds unscaled_bounds(double sigma, double t, double dt, int m, const UnscaledNorms& n) {
    if (sigma < 0.0 || t < 0.0 || dt < 0.0 || m < 0) throw DomainError("unscaled_bounds: negative argument");
    const Kernels k = kernel_functions(sigma * t);
    const double G = big_gamma(sigma, t);
    UnscaledBounds b;
    // [1 - gamma] / sigma and [t^2/2 - Gamma] / sigma, with their sigma -> 0 limits
    double one_minus_gamma_over_sigma, rest_over_sigma;
    if (sigma * t < kKernelSwitch) {
        // (1 - gamma) / sigma = t sum_{j>=0} (-1)^j (sigma t)^j / (j+2)!
        one_minus_gamma_over_sigma = t * poly(series().big_gamma, kSeriesTerms, sigma * t);
        // (t^2/2 - Gamma)/sigma = t^3 sum_{j>=0} (-1)^j (sigma t)^j / (j+3)!
        double v = 0.0, term = 1.0 / 6.0;
        for (int j = 0; j < kSeriesTerms; ++j) {
            v += term;
            term *= -sigma * t / (j + 4);
        }
        rest_over_sigma = t * t * t * v;
    } else {
        one_minus_gamma_over_sigma = (1.0 - k.gamma) / sigma;
        rest_over_sigma = (0.5 * t * t - G) / sigma;
    }
    b.E1 = n.dtheta_g * k.kappa + (n.dx_g + n.dtheta_q) * k.gamma * t + n.dx_q * one_minus_gamma_over_sigma * t;
    b.E2 = n.grad_dtheta_g * k.gamma * t + (n.d2_g + n.grad_dtheta_q) * G + n.d2_q * rest_over_sigma;
    const Kernels kd = kernel_functions(sigma * dt);
    const double tm = m * dt;
    b.interval_end = dt * kd.beta1 * n.d2_g + (m * dt * dt * kd.beta1 + dt * dt * kd.beta2) * n.d2_q;
    b.interval_integral = dt * dt * kd.beta2 * n.d2_g + (dt * dt * tm * kd.beta2 + 0.5 * dt * dt * dt * kd.beta3) * n.d2_q;
    return b;
}

double hybrid_diffusive_branch(double eps, double sigma, double T, int s) {
    return ratio(std::pow(eps, s - 1) * factorial(s) * T, std::pow(sigma, s));
}

double hybrid_streaming_branch(double eps, double sigma, double T, int s, double dt) {
    return std::pow(dt, s) * T / std::pow(eps, s + 1) * std::min(1.0, dt * sigma / (eps * eps));
}

Advice regime_advisor(double eps, double sigma, double T, int s, const AdvisorPolicy& policy) {
    if (!(eps > 0.0) || sigma < 0.0 || !(T > 0.0) || s < 1) throw DomainError("regime_advisor: bad arguments");
    Advice a;
    if (sigma == 0.0) {
        a.crossover_dt = kInf;
        a.label = "streaming-exact; any dt gives zero bound";
        return a;
    }
    // dt^s T/eps^{s+1} = eps^{s-1} s! T/sigma^s on the inner-1 side, which holds since s! >= 1
    a.crossover_dt = std::pow(factorial(s), 1.0 / s) * eps * eps / sigma;
    if (a.crossover_dt <= policy.diffusive_fraction * T)
        a.label = "diffusive; dt unconstrained";
    else if (a.crossover_dt > T)
        a.label = "streaming; bound scales as dt^(s+1)";
    else
        a.label = "transitional; dt below crossover reduces the bound";
    return a;
}

bool AuditReport::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AuditCheck& c) { return c.known_issue || c.violations == 0; });
}

void AuditReport::write_text(std::ostream& out) const {
    for (const auto& c : checks) {
        out << (c.violations == 0 ? "ok    " : c.known_issue ? "known " : "FAIL  ") << c.name << ": " << c.evaluated
            << " evaluated, " << c.violations << " violations";
        if (!c.witness.empty()) out << "; first: " << c.witness;
        out << '\n';
    }
}

AuditCheck audit_shift_inequality(int s_max, int l_max) {
    AuditCheck c;
    c.name = "shift inequality";
    for (int s = 1; s <= s_max; ++s)
        for (int l = s; l <= l_max; ++l) {
            const double up = l + 0.5, down = l - 0.5;
            const double lhs = std::pow(up, 2 * s) - (l == s ? 0.0 : std::pow(down, 2 * s));
            const double rhs = 2.0 * std::numbers::e * s * std::pow(up, s) * std::pow(down, s - 1);
            ++c.evaluated;
            if (lhs > rhs * (1.0 + 1e-14)) {
                if (c.violations++ == 0) {
                    std::ostringstream w;
                    w << "s=" << s << " l=" << l << " lhs=" << lhs << " rhs=" << rhs;
                    c.witness = w.str();
                }
            }
        }
    return c;
}

AuditCheck audit_norm_equivalence(int samples, std::uint64_t seed) {
    AuditCheck c;
    c.name = "norm equivalence";
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> degree(1, 16);
    for (int i = 0; i < samples; ++i) {
        MomentVector u(degree(rng));
        for (auto& x : u.coefficients()) x = normal(rng);
        for (int s = 0; s <= 3; ++s) {
            const double h = angular_norm(u, s), o = angular_laplace_norm(u, s);
            ++c.evaluated;
            const bool low = equivalence_c1(s) * h > o * (1.0 + 1e-13);
            const bool high = o > equivalence_c2(s) * h * (1.0 + 1e-13);
            if ((low || high) && c.violations++ == 0) {
                std::ostringstream w;
                w << "sample " << i << " s=" << s << (low ? " lower" : " upper");
                c.witness = w.str();
            }
        }
    }
    return c;
}

AuditCheck audit_equivalence_degree_zero() {
    AuditCheck c;
    c.name = "norm equivalence, degree-0 vectors";
    c.known_issue = true;
    MomentVector u(0);
    u[{0, 0}] = 1.0;
    for (int s = 0; s <= 3; ++s) {
        ++c.evaluated;
        const double h = angular_norm(u, s), o = angular_laplace_norm(u, s);
        if (equivalence_c1(s) * h > o * (1.0 + 1e-13) && c.violations++ == 0) {
            std::ostringstream w;
            w << std::setprecision(6) << "s=" << s << " c1*|u|=" << equivalence_c1(s) * h << " > |u|_o=" << o;
            c.witness = w.str();
        }
    }
    return c;
}

AuditCheck audit_approximation(int samples, std::uint64_t seed) {
    AuditCheck c;
    c.name = "approximation property";
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> degree(0, 24);
    std::uniform_real_distribution<double> decay(0.0, 3.0);
    for (int i = 0; i < samples; ++i) {
        const int L = degree(rng);
        const double p = decay(rng);
        MomentVector u(L);
        for (int l = 0; l <= L; ++l)
            for (int k = -l; k <= l; ++k) u[{l, k}] = normal(rng) * std::pow(l + 0.5, -p);
        for (int s = 1; s <= 3; ++s)
            for (int N = s - 1; N <= 15; ++N) {
                MomentVector tail = u;
                tail.coefficients().head(std::min<std::size_t>(moment_count(N), tail.size())).setZero();
                const double scale = std::pow(N + 1.0, -s);
                const double a = tail.l2_norm();
                const double b = scale * angular_seminorm(tail, s);
                const double d = scale * angular_seminorm(u, s);
                ++c.evaluated;
                if ((a > b + 1e-13 * (1.0 + b) || b > d + 1e-13 * (1.0 + d)) && c.violations++ == 0) {
                    std::ostringstream w;
                    w << "sample " << i << " s=" << s << " N=" << N;
                    c.witness = w.str();
                }
            }
    }
    return c;
}

AuditReport audit_inequalities(int s_max, int l_max, int samples, std::uint64_t seed) {
    AuditReport r;
    r.checks.push_back(audit_shift_inequality(s_max, l_max));
    r.checks.push_back(audit_norm_equivalence(samples, seed));
    r.checks.push_back(audit_approximation(samples, seed + 1));
    r.checks.push_back(audit_equivalence_degree_zero());
    return r;
}

}  // namespace hybridpn
