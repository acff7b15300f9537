#include "hybridpn/manufactured.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "hybridpn/errors.hpp"

namespace hybridpn {

namespace {

using cplx = std::complex<double>;

const double kSqrt4Pi = 2.0 * std::sqrt(std::numbers::pi);

ScalarField cosine(const SpatialGrid& grid) {
    ScalarField f(grid);
    f.at({1, 0, 0}) = 0.5;
    f.at({-1, 0, 0}) = 0.5;
    return f;
}

ScalarField constant(const SpatialGrid& grid, double c) {
    ScalarField f(grid);
    f.at({0, 0, 0}) = c;
    return f;
}

MomentVector isotropic(double value) {
    MomentVector v(0);
    v[{0, 0}] = value * kSqrt4Pi;
    return v;
}

// Free streaming of g along characteristics: mode k at node j picks e^{-i k.Omega_j t / eps}.
auto characteristics(const ProblemSpec& spec) {
    return [g = spec.g, eps = spec.eps](double t, std::shared_ptr<const SphereQuadrature> quad) {
        NodalAngularField u = to_nodal(g, quad);
        for (int m = 0; m < g.grid.mode_count(); ++m) {
            const auto k = g.grid.wavenumber(m);
            for (std::size_t j = 0; j < quad->size(); ++j) {
                const auto& w = quad->nodes[j];
                const double kw = k[0] * w.x() + k[1] * w.y() + k[2] * w.z();
                u.coeffs(j, m) *= std::exp(cplx(0.0, -kw * t / eps));
            }
        }
        return u;
    };
}

}  // namespace

MomentVector sobolev_profile(int s, int band) {
    MomentVector v(band);
    for (int l = 0; l <= band; ++l)
        v.block(l).setConstant(std::pow(l + 0.5, -s - 1.0) / std::sqrt(2.0 * l + 1.0));
    return v;
}

const std::vector<std::string>& manufactured_names() {
    static const std::vector<std::string> names = {"iso-smooth", "aniso-decay", "streaming", "sobolev-s",
                                                   "diffusion-check"};
    return names;
}

Manufactured manufactured(const std::string& name, const ManufacturedParams& p) {
    if (p.modes < 3) throw DomainError("manufactured: at least 3 modes per axis are needed for cos(x1)");
    const SpatialGrid grid(p.dimension, p.modes);
    Manufactured out;
    out.name = name;
    ProblemSpec& spec = out.spec;
    spec.eps = p.eps;
    spec.sigma_t = p.sigma_t;
    spec.sigma_a = p.sigma_a;
    spec.T = p.T;
    spec.M = p.dt > 0.0 ? schedule_steps(p.T, p.dt) : 1;

    if (name == "iso-smooth") {
        spec.g = MomentField::separable(cosine(grid), isotropic(1.0));
    } else if (name == "aniso-decay") {
        MomentVector v(1);
        v[{1, 0}] = 1.0;
        spec.g = MomentField::separable(constant(grid, 1.0), v);
        const double rate = spec.sigma_t / (spec.eps * spec.eps);
        out.exact_nodal = [g = spec.g, rate](double t, std::shared_ptr<const SphereQuadrature> quad) {
            NodalAngularField u = to_nodal(g, quad);
            u.coeffs *= std::exp(-rate * t);
            return u;
        };
    } else if (name == "streaming") {
        spec.sigma_t = 0.0;
        spec.sigma_a = 0.0;
        MomentVector v(1);
        v[{0, 0}] = kSqrt4Pi;
        v[{1, 1}] = 1.0;
        spec.g = MomentField::separable(cosine(grid), v);
    } else if (name == "sobolev-s") {
        if (p.s < 0 || p.band < 1) throw DomainError("manufactured: sobolev-s needs s >= 0 and band >= 1");
        spec.g = MomentField::separable(cosine(grid), sobolev_profile(p.s, p.band));
    } else if (name == "diffusion-check") {
        ScalarField f = cosine(grid);
        f.at({0, 0, 0}) = 1.0;
        spec.g = MomentField::separable(f, isotropic(1.0));
    } else {
        throw ConfigError("unknown manufactured problem '" + name + "'");
    }
    if (!out.exact_nodal && spec.sigma_t == 0.0 && spec.sigma_a == 0.0 && spec.q.empty())
        out.exact_nodal = characteristics(spec);
    spec.validate();
    return out;
}

}  // namespace hybridpn
