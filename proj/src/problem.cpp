#include "hybridpn/problem.hpp"

#include <cmath>
#include <string>

#include "hybridpn/errors.hpp"
#include "hybridpn/quadrature.hpp"

namespace hybridpn {

double TimeProfile::operator()(double t) const {
    double p = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * t + *it;
    return rate == 0.0 ? p : p * std::exp(rate * t);
}

int schedule_steps(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("schedule: T and dt must be positive");
    const double ratio = T / dt;
    const double M = std::round(ratio);
    if (M < 1.0 || std::abs(M * dt - T) > 1e-12 * T) throw ConfigError("M*dt != T");
    return static_cast<int>(M);
}

void ProblemSpec::validate() const {
    if (!(eps > 0.0)) throw DomainError("ProblemSpec: eps must be positive");
    if (sigma_t < 0.0 || sigma_a < 0.0) throw DomainError("ProblemSpec: negative cross-section");
    if (sigma_a > sigma_t) throw DomainError("ProblemSpec: sigma_a > sigma_t");
    if (!(T > 0.0) || M < 1) throw ConfigError("ProblemSpec: invalid schedule");
    if (g.coeffs.rows() != moment_count(g.max_degree) || g.coeffs.cols() != g.grid.mode_count())
        throw DomainError("ProblemSpec: initial field shape mismatch");
    for (const auto& term : q) {
        if (!(term.spatial.grid == g.grid)) throw DomainError("ProblemSpec: source grid differs from g");
        if (term.time.poly.empty()) throw DomainError("ProblemSpec: empty time profile");
    }
}

bool ProblemSpec::isotropic() const {
    if (g.max_degree > 0 && g.coeffs.bottomRows(g.coeffs.rows() - 1).cwiseAbs().maxCoeff() > 0.0)
        return false;
    for (const auto& term : q)
        if (term.angular.max_degree() > 0 &&
            term.angular.coefficients().tail(term.angular.size() - 1).cwiseAbs().maxCoeff() > 0.0)
            return false;
    return true;
}

int ProblemSpec::data_degree() const {
    int d = g.max_degree;
    for (const auto& term : q) d = std::max(d, term.angular.max_degree());
    return d;
}

MomentField ProblemSpec::source_moments(double t, int N) const {
    MomentField out(g.grid, N);
    for (const auto& term : q) {
        const double amp = term.time(t);
        if (amp == 0.0) continue;
        out.coeffs += amp * MomentField::separable(term.spatial, term.angular.resized(N)).coeffs;
    }
    return out;
}

double ProblemSpec::source_rate() const {
    double r = 0.0;
    for (const auto& term : q) r = std::max(r, std::abs(term.time.rate));
    return r;
}

namespace {

MomentField upper_tail(const MomentField& f, int degree) {
    MomentField tail = f;
    const int keep = std::min<int>(moment_count(degree), static_cast<int>(f.coeffs.rows()));
    tail.coeffs.topRows(keep).setZero();
    return tail;
}

std::string pair_name(const NormPair& p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

}  // namespace

DataNorms data_norms(const ProblemSpec& spec, const std::vector<NormPair>& pairs,
                     const DataNormOptions& options) {
    const int full = spec.data_degree();
    const int degree = options.max_degree < 0 ? full : options.max_degree;
    const auto stencil = chebyshev_lobatto(options.time_stencil, 0.0, spec.T);
    const auto rule = gauss_legendre(options.time_quadrature, 0.0, spec.T);

    DataNorms out;
    for (const auto& pair : pairs) {
        const auto [r, s] = pair;
        DataNorm n;
        if (degree < full) {
            double tail = hrs_seminorm(upper_tail(spec.g, degree), r, s);
            for (double t : stencil)
                tail = std::max(tail, hrs_seminorm(upper_tail(spec.source_moments(t, full), degree), r, s));
            if (tail > options.tail_tolerance)
                throw ResolutionError("data_norms: pair " + pair_name(pair) + " has an unresolved tail " +
                                      std::to_string(tail) + " above degree " + std::to_string(degree));
        }
        n.g = hrs_seminorm(spec.g.resized(degree), r, s);
        if (spec.has_source()) {
            for (double t : stencil) n.q_sup = std::max(n.q_sup, hrs_seminorm(spec.source_moments(t, degree), r, s));
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                n.q_l1 += rule.weights[i] * hrs_seminorm(spec.source_moments(rule.nodes[i], degree), r, s);
        }
        out[pair] = n;
    }
    return out;
}

}  // namespace hybridpn
