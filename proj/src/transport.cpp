#include "hybridpn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>

#include "hybridpn/errors.hpp"
#include "hybridpn/expm.hpp"
#include "hybridpn/quadrature.hpp"

namespace hybridpn {

namespace {

using cplx = std::complex<double>;

double wavenumber_norm(const Wavenumber& k) {
    return std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]);
}

double max_wavenumber(const SpatialGrid& g) {
    double kmax = 0.0;
    for (int m = 0; m < g.mode_count(); ++m) kmax = std::max(kmax, wavenumber_norm(g.wavenumber(m)));
    return kmax;
}

// Multiply a complex vector by a real matrix without promoting the matrix.
Eigen::VectorXcd real_times(const Eigen::MatrixXd& E, const Eigen::VectorXcd& v) {
    Eigen::VectorXd re = E * v.real();
    Eigen::VectorXd im = E * v.imag();
    Eigen::VectorXcd out(v.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

cplx i_power(int l) {
    switch (((l % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace

Eigen::MatrixXcd ModeOperator::matrix() const {
    Eigen::MatrixXcd L = gauge.cast<cplx>();
    for (int r = 0; r < L.rows(); ++r)
        for (int c = 0; c < L.cols(); ++c) {
            const int lr = SphericalIndex::from_ordinal(r).degree;
            const int lc = SphericalIndex::from_ordinal(c).degree;
            L(r, c) *= i_power(lr - lc);
        }
    return L;
}

ModeOperator assemble_mode_operator(const Wavenumber& k, int N, double eps, double sigma,
                                    const CouplingSet& coupling, double absorption) {
    if (coupling.max_degree < N) throw DomainError("assemble_mode_operator: coupling degree below N");
    if (!(eps > 0.0)) throw DomainError("assemble_mode_operator: eps must be positive");
    ModeOperator op;
    op.k = k;
    op.max_degree = N;
    const int n = moment_count(N);
    op.gauge = Eigen::MatrixXd::Zero(n, n);
    for (int axis = 0; axis < 3; ++axis) {
        if (k[axis] == 0) continue;
        const double f = k[axis] / eps;
        for (int l = 1; l <= N; ++l) {
            const auto& a = coupling.block(axis, l);
            op.gauge.block((l - 1) * (l - 1), l * l, 2 * l - 1, 2 * l + 1) += f * a;
            op.gauge.block(l * l, (l - 1) * (l - 1), 2 * l + 1, 2 * l - 1) -= f * a.transpose();
        }
    }
    const double collide = sigma / (eps * eps);
    for (int r = 1; r < n; ++r) op.gauge(r, r) -= collide;
    op.gauge(0, 0) -= absorption;
    return op;
}

void to_gauge(Eigen::Ref<Eigen::VectorXcd> v, int N) {
    for (int l = 1; l <= N; ++l) v.segment(l * l, 2 * l + 1) *= i_power(-l);
}

void from_gauge(Eigen::Ref<Eigen::VectorXcd> v, int N) {
    for (int l = 1; l <= N; ++l) v.segment(l * l, 2 * l + 1) *= i_power(l);
}

PnPropagator::PnPropagator(const SpatialGrid& grid, int N, double eps, double sigma, double absorption,
                           std::shared_ptr<const CouplingSet> coupling, double h, Execution exec)
    : grid_(grid), N_(N), eps_(eps), sigma_(sigma), absorption_(absorption), h_(h),
      coupling_(std::move(coupling)), exec_(exec), cache_(grid.representative_count()) {
    if (!(h > 0.0)) throw DomainError("PnPropagator: step must be positive");
    if (coupling_->max_degree < N) throw DomainError("PnPropagator: coupling degree below N");
    const GaussRule rule = gauss_legendre(kDuhamelOrder, 0.0, 1.0);
    tau_ = rule.nodes;
    weight_ = rule.weights;
}

const PnPropagator::Cache& PnPropagator::cache(int mode, bool need_partial) const {
    auto& slot = cache_[mode];
    if (!slot) {
        slot = std::make_unique<Cache>();
        const ModeOperator op =
            assemble_mode_operator(grid_.wavenumber(mode), N_, eps_, sigma_, *coupling_, absorption_);
        slot->full = expm(Eigen::MatrixXd(h_ * op.gauge));
    }
    if (need_partial && slot->partial.empty()) {
        const ModeOperator op =
            assemble_mode_operator(grid_.wavenumber(mode), N_, eps_, sigma_, *coupling_, absorption_);
        for (double t : tau_) slot->partial.push_back(expm(Eigen::MatrixXd((1.0 - t) * h_ * op.gauge)));
    }
    return *slot;
}

Eigen::VectorXcd PnPropagator::propagate(int mode, const Eigen::VectorXcd& u) const {
    Eigen::VectorXcd v = u;
    to_gauge(v, N_);
    v = real_times(cache(mode, false).full, v);
    from_gauge(v, N_);
    return v;
}

Eigen::VectorXcd PnPropagator::duhamel(int mode, const std::vector<Eigen::VectorXcd>& samples) const {
    const Cache& c = cache(mode, true);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(moment_count(N_));
    for (int g = 0; g < kDuhamelOrder; ++g) {
        Eigen::VectorXcd s = samples[g];
        to_gauge(s, N_);
        acc += (h_ * weight_[g]) * real_times(c.partial[g], s);
    }
    from_gauge(acc, N_);
    return acc;
}

void PnPropagator::step(MomentField& state, double t0, const MomentSampler& source) const {
    if (state.max_degree != N_ || !(state.grid == grid_))
        throw DomainError("PnPropagator::step: state shape mismatch");
    std::vector<MomentField> samples;
    if (source)
        for (double t : tau_) {
            samples.push_back(source(t0 + t * h_));
            if (samples.back().max_degree != N_) throw DomainError("PnPropagator::step: source degree mismatch");
        }

    for_each_index(exec_, grid_.representative_count(), [&](std::ptrdiff_t mi) {
        const int m = static_cast<int>(mi);
        bool active = !state.coeffs.col(m).isZero(0.0);
        for (const auto& s : samples) active = active || !s.coeffs.col(m).isZero(0.0);
        if (!active) return;
        Eigen::VectorXcd u = propagate(m, state.coeffs.col(m));
        if (!samples.empty()) {
            std::vector<Eigen::VectorXcd> cols;
            cols.reserve(samples.size());
            for (const auto& s : samples) cols.push_back(s.coeffs.col(m));
            u += duhamel(m, cols);
        }
        state.coeffs.col(m) = u;
        const int partner = grid_.conjugate_mode(m);
        if (partner != m) state.coeffs.col(partner) = u.conjugate();
    });
}

MomentField step_pn(const MomentField& state, double t0, double h, const MomentSampler& source,
                    double eps, double sigma, Execution exec) {
    auto coupling = std::make_shared<const CouplingSet>(assemble_coupling(std::max(state.max_degree, 1)));
    PnPropagator prop(state.grid, state.max_degree, eps, sigma, 0.0, coupling, h, exec);
    MomentField out = state;
    prop.step(out, t0, source);
    return out;
}

void PnTrajectory::write_csv(std::ostream& out) const {
    out << "time,norm";
    for (const auto& [r, s] : diagnostics) out << ",h_" << r << '_' << s;
    out << ",flux_min,flux_max\n" << std::setprecision(17);
    for (const auto& row : rows) {
        out << row.time << ',' << row.norm;
        for (double v : row.seminorms) out << ',' << v;
        out << ',' << row.flux_min << ',' << row.flux_max << '\n';
    }
}

PnTrajectory solve_pn(const ProblemSpec& spec, int N, const PnOptions& options) {
    spec.validate();
    if (N < 0) throw DomainError("solve_pn: N must be non-negative");
    std::vector<double> outputs = options.output_times;
    if (outputs.empty()) outputs.push_back(spec.T);
    std::sort(outputs.begin(), outputs.end());
    if (outputs.front() < 0.0 || outputs.back() > spec.T * (1.0 + 1e-12))
        throw DomainError("solve_pn: output time outside [0, T]");

    auto coupling = std::make_shared<const CouplingSet>(assemble_coupling(std::max(N, 1)));
    const double sigma = spec.sigma_t, absorption = spec.sigma_a;
    const double rate = sigma / (spec.eps * spec.eps) + absorption + max_wavenumber(spec.grid()) / spec.eps +
                        spec.source_rate();
    MomentSampler sampler;
    if (spec.has_source()) sampler = [&spec, N](double t) { return spec.source_moments(t, N); };

    std::vector<std::unique_ptr<PnPropagator>> propagators;
    auto propagator_for = [&](double h) -> const PnPropagator& {
        for (const auto& p : propagators)
            if (std::abs(p->step_size() - h) <= 1e-14 * h) return *p;
        propagators.push_back(std::make_unique<PnPropagator>(spec.grid(), N, spec.eps, sigma, absorption,
                                                             coupling, h, options.exec));
        return *propagators.back();
    };

    PnTrajectory traj;
    traj.diagnostics = options.diagnostics;
    auto record = [&](double t, const MomentField& state) {
        TrajectoryRow row;
        row.time = t;
        row.norm = l2_norm(state);
        for (const auto& [r, s] : options.diagnostics) row.seminorms.push_back(hrs_seminorm(state, r, s));
        const Eigen::VectorXd flux = scalar_flux(state).to_physical();
        row.flux_min = flux.minCoeff();
        row.flux_max = flux.maxCoeff();
        traj.times.push_back(t);
        traj.states.push_back(state);
        traj.rows.push_back(std::move(row));
    };

    MomentField state = spec.g.resized(N);
    double t = 0.0;
    if (outputs.front() > 0.0) record(0.0, state);
    for (double target : outputs) {
        const double len = target - t;
        if (len > 0.0) {
            int substeps = 1;
            if (spec.has_source()) substeps = std::max(1, int(std::ceil(len * rate / options.step_rate)));
            const double h = len / substeps;
            const PnPropagator& prop = propagator_for(h);
            for (int i = 0; i < substeps; ++i) prop.step(state, t + i * h, sampler);
            t = target;
        }
        record(target, state);
    }
    return traj;
}

NodalAngularField solve_uncollided(const NodalAngularField& u0, double a, double b, double eps, double sigma,
                                   const std::vector<SourceTerm>& q, Execution exec) {
    if (!(b > a)) throw DomainError("solve_uncollided: empty interval");
    if (!(eps > 0.0)) throw DomainError("solve_uncollided: eps must be positive");
    const SpatialGrid& grid = u0.grid;
    const SphereQuadrature& quad = *u0.quad;
    const int nodes = static_cast<int>(quad.size());
    const double len = b - a;
    const double decay = sigma / (eps * eps);

    // angular factors of the source terms at the nodes
    std::vector<Eigen::VectorXd> angular;
    double qrate = 0.0;
    for (const auto& term : q) {
        Eigen::VectorXd v(nodes);
        for (int j = 0; j < nodes; ++j) v[j] = evaluate_expansion(term.angular, quad.nodes[j]);
        angular.push_back(std::move(v));
        qrate = std::max(qrate, std::abs(term.time.rate));
    }
    int substeps = 1;
    std::vector<double> tau, wt;
    if (!q.empty()) {
        substeps = std::max(1, int(std::ceil(len * (decay + max_wavenumber(grid) / eps + qrate))));
        const GaussRule ref = gauss_legendre(kDuhamelOrder, 0.0, 1.0);
        const double h = len / substeps;
        for (int sstep = 0; sstep < substeps; ++sstep)
            for (int g = 0; g < kDuhamelOrder; ++g) {
                tau.push_back(a + (sstep + ref.nodes[g]) * h);
                wt.push_back(ref.weights[g] * h);
            }
    }

    NodalAngularField out = u0;
    for_each_index(exec, grid.representative_count(), [&](std::ptrdiff_t mi) {
        const int m = static_cast<int>(mi);
        const Wavenumber k = grid.wavenumber(m);
        bool source_here = false;
        for (const auto& term : q) source_here = source_here || term.spatial.coeffs[m] != cplx(0.0);
        if (!source_here && u0.coeffs.col(m).isZero(0.0)) return;
        for (int j = 0; j < nodes; ++j) {
            const Direction& w = quad.nodes[j];
            const double kw = k[0] * w.x() + k[1] * w.y() + k[2] * w.z();
            const cplx lambda(-decay, -kw / eps);
            cplx value = std::exp(lambda * len) * u0.coeffs(j, m);
            for (std::size_t t = 0; t < q.size(); ++t) {
                const cplx amp = q[t].spatial.coeffs[m] * angular[t][j];
                if (amp == cplx(0.0)) continue;
                cplx integral = 0.0;
                for (std::size_t g = 0; g < tau.size(); ++g)
                    integral += wt[g] * std::exp(lambda * (b - tau[g])) * q[t].time(tau[g]);
                value += amp * integral;
            }
            out.coeffs(j, m) = value;
        }
        const int partner = grid.conjugate_mode(m);
        if (partner != m) out.coeffs.col(partner) = out.coeffs.col(m).conjugate();
    });
    return out;
}

ScalarField solve_diffusion(const ProblemSpec& spec, double t_end) {
    if (!(spec.sigma_t > 0.0)) throw DomainError("solve_diffusion: sigma_t = 0 makes the diffusion coefficient singular");
    ScalarField phi = scalar_flux(spec.g);
    for (int m = 0; m < phi.grid.mode_count(); ++m) {
        const double k = wavenumber_norm(phi.grid.wavenumber(m));
        phi.coeffs[m] *= std::exp(-t_end * (k * k / (3.0 * spec.sigma_t) + spec.sigma_a));
    }
    return phi;
}

double AbsorptionTransform::scale(double t) const { return std::exp(-sigma_a * t); }

MomentField AbsorptionTransform::restore(const MomentField& f, double t) const {
    MomentField out = f;
    out.coeffs *= scale(t);
    return out;
}

NodalAngularField AbsorptionTransform::restore(const NodalAngularField& f, double t) const {
    NodalAngularField out = f;
    out.coeffs *= scale(t);
    return out;
}

AbsorptionTransform absorption_wrap(const ProblemSpec& spec) {
    if (spec.sigma_a > spec.sigma_t) throw DomainError("absorption_wrap: sigma_a > sigma_t");
    AbsorptionTransform tr;
    tr.sigma_a = spec.sigma_a;
    tr.scattering = spec;
    if (spec.sigma_a == 0.0) return tr;
    // psi = e^{sigma_a t} Psi leaves sigma_t - eps^2 sigma_a as the scattering coefficient
    const double sigma = spec.sigma_t - spec.eps * spec.eps * spec.sigma_a;
    if (sigma < 0.0) throw DomainError("absorption_wrap: sigma_t - eps^2 sigma_a < 0");
    tr.scattering.sigma_t = sigma;
    tr.scattering.sigma_a = 0.0;
    for (auto& term : tr.scattering.q) term.time.rate += spec.sigma_a;
    return tr;
}

}  // namespace hybridpn
