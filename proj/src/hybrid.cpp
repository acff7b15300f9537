#include "hybridpn/hybrid.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "hybridpn/errors.hpp"
#include "hybridpn/quadrature.hpp"

namespace hybridpn {

namespace {

using cplx = std::complex<double>;

constexpr double kFourPi = 4.0 * std::numbers::pi;

double max_wavenumber(const SpatialGrid& g) {
    double kmax = 0.0;
    for (int m = 0; m < g.mode_count(); ++m) {
        const auto k = g.wavenumber(m);
        kmax = std::max(kmax, std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]));
    }
    return kmax;
}

// lambda_{m,j} = -sigma/eps^2 - i k.Omega_j / eps for every (node, mode)
Eigen::MatrixXcd uncollided_rates(const SpatialGrid& grid, const SphereQuadrature& quad, double eps,
                                  double sigma) {
    Eigen::MatrixXcd lambda(quad.size(), grid.mode_count());
    for (int m = 0; m < grid.mode_count(); ++m) {
        const auto k = grid.wavenumber(m);
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const auto& w = quad.nodes[j];
            lambda(j, m) = cplx(-sigma / (eps * eps), -(k[0] * w.x() + k[1] * w.y() + k[2] * w.z()) / eps);
        }
    }
    return lambda;
}

void check_quadrature(const SphereQuadrature& quad, int N) {
    if (quad.exactness < 2 * N)
        throw PreconditionError("hybrid: quadrature exactness " + std::to_string(quad.exactness) +
                                " below 2N = " + std::to_string(2 * N));
}

double remap_residual(const NodalAngularField& before, const NodalAngularField& after, const MomentField& c) {
    const MomentField diff_moments = project(after, c.max_degree);
    const MomentField base = project(before, c.max_degree);
    return (diff_moments.coeffs - base.coeffs - c.coeffs).cwiseAbs().maxCoeff();
}

}  // namespace

void HybridDiagnostics::write_csv(std::ostream& out) const {
    out << "m,t_m,uncollided_norm,collided_norm,remap_residual,source_residual,cumulative_error\n"
        << std::setprecision(17);
    for (const auto& d : intervals)
        out << d.m << ',' << d.t_end << ',' << d.uncollided_end << ',' << d.collided_end << ','
            << d.remap_residual << ',' << d.source_residual << ',' << d.cumulative_error << '\n';
}

std::vector<ScalarField> uncollided_average_source(const NodalAngularField& u_start, double t_start,
                                                   const std::vector<double>& sample_times, double eps,
                                                   double sigma, const std::vector<SourceTerm>& q,
                                                   Execution exec) {
    const SpatialGrid& grid = u_start.grid;
    const SphereQuadrature& quad = *u_start.quad;
    std::vector<ScalarField> out;
    out.reserve(sample_times.size());
    if (!q.empty()) {
        for (double t : sample_times) {
            if (t < t_start) throw DomainError("uncollided_average_source: sample before interval start");
            const NodalAngularField u =
                t > t_start ? solve_uncollided(u_start, t_start, t, eps, sigma, q, exec) : u_start;
            ScalarField avg(grid);
            for (int m = 0; m < grid.mode_count(); ++m)
                for (std::size_t j = 0; j < quad.size(); ++j) avg.coeffs[m] += quad.weights[j] * u.coeffs(j, m);
            avg.coeffs /= kFourPi;
            out.push_back(std::move(avg));
        }
        return out;
    }
    const Eigen::MatrixXcd lambda = uncollided_rates(grid, quad, eps, sigma);
    for (double t : sample_times) {
        if (t < t_start) throw DomainError("uncollided_average_source: sample before interval start");
        ScalarField avg(grid);
        const double dt = t - t_start;
        for (int m = 0; m < grid.mode_count(); ++m) {
            if (u_start.coeffs.col(m).isZero(0.0)) continue;
            cplx sum = 0.0;
            for (std::size_t j = 0; j < quad.size(); ++j)
                sum += quad.weights[j] * std::exp(lambda(j, m) * dt) * u_start.coeffs(j, m);
            avg.coeffs[m] = sum / kFourPi;
        }
        out.push_back(std::move(avg));
    }
    return out;
}

NodalAngularField remap(const NodalAngularField& u, const MomentField& c) {
    if (!(u.grid == c.grid)) throw DomainError("remap: grid mismatch");
    check_quadrature(*u.quad, c.max_degree);
    NodalAngularField out = u;
    out.coeffs += to_nodal(c, u.quad).coeffs;
    return out;
}

HybridStepper::HybridStepper(const SpatialGrid& grid, std::shared_ptr<const SphereQuadrature> quad, int N,
                             double dt, double eps, double sigma, std::vector<SourceTerm> q,
                             const HybridOptions& options)
    : grid_(grid), quad_(std::move(quad)), N_(N), dt_(dt), eps_(eps), sigma_(sigma), q_(std::move(q)),
      options_(options) {
    check_quadrature(*quad_, N);
    if (!(dt > 0.0)) throw DomainError("HybridStepper: dt must be positive");
    double qrate = 0.0;
    for (const auto& term : q_) qrate = std::max(qrate, std::abs(term.time.rate));
    const double rate = sigma / (eps * eps) + max_wavenumber(grid) / eps + qrate;
    substeps_ = std::max(1, int(std::ceil(dt * rate / options.step_rate)));
    auto coupling = std::make_shared<const CouplingSet>(assemble_coupling(std::max(N, 1)));
    collided_ = std::make_unique<PnPropagator>(grid, N, eps, sigma, 0.0, coupling, dt / substeps_, options.exec);
}

HybridState HybridStepper::step(const HybridState& state, IntervalDiagnostics* diag) const {
    if (!state.collided.is_zero()) throw PreconditionError("hybrid_step: collided field must start at zero");
    const double h = dt_ / substeps_;
    const double t_begin = state.time;
    const double inject = sigma_ / (eps_ * eps_) * std::sqrt(kFourPi);  // isotropic v -> (0,0) moment v*sqrt(4pi)
    const auto& tau = collided_->gauss_times();
    const GaussRule ref = gauss_legendre(kDuhamelOrder, 0.0, 1.0);
    const Eigen::MatrixXcd lambda = uncollided_rates(grid_, *quad_, eps_, sigma_);

    NodalAngularField u = state.uncollided;
    MomentField c(grid_, N_);
    double source_residual = 0.0;

    for (int i = 0; i < substeps_; ++i) {
        const double t0 = t_begin + i * h;
        std::vector<double> times;
        for (double t : tau) times.push_back(t0 + t * h);
        std::vector<ScalarField> avg;
        if (sigma_ > 0.0) avg = uncollided_average_source(u, t0, times, eps_, sigma_, q_, options_.exec);

        for_each_index(options_.exec, grid_.representative_count(), [&](std::ptrdiff_t mi) {
            const int m = static_cast<int>(mi);
            bool active = !c.coeffs.col(m).isZero(0.0);
            for (const auto& a : avg) active = active || a.coeffs[m] != cplx(0.0);
            if (!active) return;
            Eigen::VectorXcd next = collided_->propagate(m, c.coeffs.col(m));
            if (!avg.empty()) {
                std::vector<Eigen::VectorXcd> samples(avg.size(), Eigen::VectorXcd::Zero(moment_count(N_)));
                for (std::size_t g = 0; g < avg.size(); ++g) samples[g][0] = inject * avg[g].coeffs[m];
                next += collided_->duhamel(m, samples);
            }
            c.coeffs.col(m) = next;
            const int partner = grid_.conjugate_mode(m);
            if (partner != m) c.coeffs.col(partner) = next.conjugate();
        });

        if (diag && !avg.empty()) {
            // quadrature of the homogeneous uncollided average against its closed form
            for (int m = 0; m < grid_.mode_count(); ++m) {
                if (u.coeffs.col(m).isZero(0.0)) continue;
                cplx exact = 0.0, approx = 0.0;
                for (std::size_t j = 0; j < quad_->size(); ++j) {
                    const cplx lam = lambda(j, m);
                    const cplx integral = std::abs(lam * h) < 1e-12 ? cplx(h) : (std::exp(lam * h) - 1.0) / lam;
                    exact += quad_->weights[j] * integral * u.coeffs(j, m);
                    cplx gsum = 0.0;
                    for (int g = 0; g < kDuhamelOrder; ++g) gsum += ref.weights[g] * h * std::exp(lam * tau[g] * h);
                    approx += quad_->weights[j] * gsum * u.coeffs(j, m);
                }
                source_residual = std::max(source_residual, std::abs(exact - approx) / kFourPi);
            }
        }
        u = solve_uncollided(u, t0, t0 + h, eps_, sigma_, q_, options_.exec);
    }

    HybridState next;
    next.interval = state.interval + 1;
    next.time = t_begin + dt_;
    next.uncollided = remap(u, c);
    next.collided = MomentField(grid_, N_);
    if (diag) {
        diag->m = next.interval;
        diag->t_end = next.time;
        diag->uncollided_start = l2_norm(state.uncollided);
        diag->uncollided_end = l2_norm(u);
        diag->collided_end = l2_norm(c);
        diag->remap_residual = remap_residual(u, next.uncollided, c);
        diag->source_residual = source_residual;
    }
    return next;
}

HybridState hybrid_step(const HybridState& state, double dt, double eps, double sigma,
                        const std::vector<SourceTerm>& q, int N, Execution exec) {
    HybridOptions options;
    options.exec = exec;
    HybridStepper stepper(state.uncollided.grid, state.uncollided.quad, N, dt, eps, sigma, q, options);
    return stepper.step(state);
}

HybridResult run_hybrid(const ProblemSpec& spec, int N, const HybridOptions& options) {
    spec.validate();
    const AbsorptionTransform tr = absorption_wrap(spec);
    const ProblemSpec& p = tr.scattering;
    const int order = options.polar_order > 0 ? options.polar_order : polar_order_for_exactness(2 * N);
    auto quad = std::make_shared<const SphereQuadrature>(build_sphere_quadrature(order));
    check_quadrature(*quad, N);

    HybridStepper stepper(p.grid(), quad, N, p.dt(), p.eps, p.sigma(), p.q, options);
    HybridState state;
    state.uncollided = to_nodal(p.g, quad);
    state.collided = MomentField(p.grid(), N);

    HybridResult result;
    for (int m = 0; m < p.M; ++m) {
        IntervalDiagnostics d;
        state = stepper.step(state, &d);
        state.time = p.interval_start(m + 1);  // keep the schedule exact
        if (options.error_at) d.cumulative_error = options.error_at(state.time, tr.restore(state.uncollided, state.time));
        result.diagnostics.intervals.push_back(d);
    }
    result.total = tr.restore(state.uncollided, p.T);
    return result;
}

}  // namespace hybridpn
