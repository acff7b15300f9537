#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridpn/problem.hpp"

namespace hybridpn {

// Below this tau the kernel functions are summed as Taylor series.
inline constexpr double kKernelSwitch = 1.0;

struct Kernels {
    double kappa = 1.0;  // e^{-tau}
    double gamma = 1.0;  // (1 - e^{-tau}) / tau
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
};

Kernels kernel_functions(double tau);
// Both branches, unguarded; exposed so their agreement can be audited.
Kernels kernel_closed_form(double tau);
Kernels kernel_series(double tau);

// Gamma(t) = int_0^t gamma(w) w dw = t/sigma - (1 - e^{-sigma t})/sigma^2, with gamma at rate sigma.
double big_gamma(double sigma, double t);

struct AOperatorValue {
    double bound = 1.0;         // min of the two branches
    double diffusive = 1.0;     // (eps/sigma)^k, +inf when sigma = 0 and k > 0
    double streaming = 1.0;     // (Delta/eps)^k / k!
    bool diffusive_active = true;
    double exact_one = 1.0;     // A^k[1] in closed form
    double exact_decay = 1.0;   // A^k[F_alpha] = Delta^k e^{-sigma Delta/eps^2} / (k! eps^k)
};

AOperatorValue a_operator(int k, double eps, double sigma, double delta);

enum class AOperand { one, decay };
// A^k applied by k nested Gauss quadratures of the defining integral.
double a_operator_quadrature(int k, double eps, double sigma, double delta, AOperand f, int order = 12);

struct BoundInputs {
    int s = 1;
    int N = 0;
    double eps = 1.0;
    double sigma = 1.0;    // sigma_t in the absorbing variants
    double sigma_a = 0.0;  // only read by absorbing_bounds
    double T = 1.0;
    double dt = 1.0;
    bool isotropic = false;
    double C_s = 1.0;
    DataNorms norms;
};

// (r,s) pairs a P_N report reads; the hybrid only reads (s+1, 0).
std::vector<NormPair> required_norms(int s, bool isotropic);

struct BoundTerm {
    std::string name;
    double value = 0.0;
    std::string branch;  // active side of the min(...), empty when there is none
};

struct BoundReport {
    std::string theorem;
    double total = 0.0;
    double C_s = 1.0;
    std::string regime;  // branch of the leading min
    std::vector<BoundTerm> terms;

    void write_csv(std::ostream& out) const;
    void write_text(std::ostream& out) const;
};

BoundReport pn_error_bound(const BoundInputs& in);
BoundReport hybrid_error_bound(const BoundInputs& in);

struct AbsorbingReports {
    BoundReport pn;
    BoundReport hybrid;
};
// Norms of the transformed source Q = e^{sigma_a t} q are expected in `in.norms`.
AbsorbingReports absorbing_bounds(const BoundInputs& in);

// Angular-derivative norms of the unscaled model (no eps).
struct UnscaledNorms {
    double dtheta_g = 0.0, dx_g = 0.0, dtheta_q = 0.0, dx_q = 0.0;
    double grad_dtheta_g = 0.0, d2_g = 0.0, grad_dtheta_q = 0.0, d2_q = 0.0;
};

struct UnscaledBounds {
    double E1 = 0.0, E2 = 0.0;
    double E() const { return E1 + E2; }
    // |grad d_theta psi_c| at the end of interval m (m = 0 is the first)
    double interval_end = 0.0;
    // its integral over interval m
    double interval_integral = 0.0;
};

UnscaledBounds unscaled_bounds(double sigma, double t, double dt, int m, const UnscaledNorms& norms);

struct AdvisorPolicy {
    double diffusive_fraction = 0.01;  // crossover below this fraction of T counts as diffusive
};

struct Advice {
    double crossover_dt = 0.0;  // +inf when sigma = 0
    std::string label;
};

// Delta t where the two branches of the hybrid bound meet.
Advice regime_advisor(double eps, double sigma, double T, int s, const AdvisorPolicy& policy = {});
// The two branches of the hybrid min(...), without data factors.
double hybrid_diffusive_branch(double eps, double sigma, double T, int s);
double hybrid_streaming_branch(double eps, double sigma, double T, int s, double dt);

struct AuditCheck {
    std::string name;
    long evaluated = 0;
    long violations = 0;
    std::string witness;  // first violation
    bool known_issue = false;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool passed() const;
    void write_text(std::ostream& out) const;
};

// Shift inequality for s = 1..s_max, l = s..l_max.
AuditCheck audit_shift_inequality(int s_max, int l_max);
// Norm sandwich c1 |u| <= |u|_o <= c2 |u| on random vectors, s = 0..3.
AuditCheck audit_norm_equivalence(int samples, std::uint64_t seed);
// Projection tail bound on random expansions, s = 1..3, N = s-1..15.
AuditCheck audit_approximation(int samples, std::uint64_t seed);
// Degree-0 vectors against the lower equivalence bound (a counterexample for s >= 1).
AuditCheck audit_equivalence_degree_zero();

AuditReport audit_inequalities(int s_max, int l_max, int samples, std::uint64_t seed);

}  // namespace hybridpn
