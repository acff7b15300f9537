#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "hybridpn/grid.hpp"
#include "hybridpn/parallel.hpp"
#include "hybridpn/problem.hpp"

namespace hybridpn {

// Per-mode generator L_k = -(i/eps) sum_i k_i A^{(i)} - (sigma/eps^2)(I - Pi_0) - absorption Pi_0.
// Stored in the real gauge G = D^{-1} L D with D = diag(i^l), which is exact because
// A^{(i)} only couples degrees l and l +- 1.
struct ModeOperator {
    Wavenumber k{0, 0, 0};
    int max_degree = 0;
    Eigen::MatrixXd gauge;

    Eigen::MatrixXcd matrix() const;
};

ModeOperator assemble_mode_operator(const Wavenumber& k, int N, double eps, double sigma,
                                    const CouplingSet& coupling, double absorption = 0.0);

// Multiply each degree block by i^{-l} (to_gauge) or i^{l} (from_gauge).
void to_gauge(Eigen::Ref<Eigen::VectorXcd> v, int N);
void from_gauge(Eigen::Ref<Eigen::VectorXcd> v, int N);

// Moments of the source at time t, at the propagator's degree.
using MomentSampler = std::function<MomentField(double t)>;

inline constexpr int kDuhamelOrder = 8;

// Exact per-mode propagation over a fixed step h plus Gauss Duhamel quadrature.
class PnPropagator {
public:
    PnPropagator(const SpatialGrid& grid, int N, double eps, double sigma, double absorption,
                 std::shared_ptr<const CouplingSet> coupling, double h, Execution exec);

    double step_size() const { return h_; }
    int max_degree() const { return N_; }

    // state(t0) -> state(t0 + h); `source` may be empty.
    void step(MomentField& state, double t0, const MomentSampler& source) const;

    // Duhamel term alone for one representative mode given source columns at the
    // Gauss times t0 + tau_g h (gauge conversion handled inside).
    Eigen::VectorXcd duhamel(int mode, const std::vector<Eigen::VectorXcd>& samples) const;
    Eigen::VectorXcd propagate(int mode, const Eigen::VectorXcd& u) const;
    const std::vector<double>& gauss_times() const { return tau_; }

private:
    struct Cache {
        Eigen::MatrixXd full;
        std::vector<Eigen::MatrixXd> partial;
    };
    const Cache& cache(int mode, bool need_partial) const;

    SpatialGrid grid_;
    int N_;
    double eps_, sigma_, absorption_, h_;
    std::shared_ptr<const CouplingSet> coupling_;
    Execution exec_;
    std::vector<double> tau_, weight_;
    mutable std::vector<std::unique_ptr<Cache>> cache_;
};

// One step of the P_N system from t0 to t0 + h.
MomentField step_pn(const MomentField& state, double t0, double h, const MomentSampler& source,
                    double eps, double sigma, Execution exec = Execution::parallel);

struct TrajectoryRow {
    double time = 0.0;
    double norm = 0.0;
    std::vector<double> seminorms;
    double flux_min = 0.0;
    double flux_max = 0.0;
};

struct PnTrajectory {
    std::vector<NormPair> diagnostics;
    std::vector<double> times;
    std::vector<MomentField> states;
    std::vector<TrajectoryRow> rows;

    const MomentField& final_state() const { return states.back(); }
    void write_csv(std::ostream& out) const;
};

struct PnOptions {
    std::vector<double> output_times;  // empty: only T
    std::vector<NormPair> diagnostics;
    double step_rate = 1.0;  // substep h * (stiffness rate) bound when q != 0
    Execution exec = Execution::parallel;
};

// Monolithic P_N run from P_N g; sigma_a > 0 uses the absorbing generator directly.
PnTrajectory solve_pn(const ProblemSpec& spec, int N, const PnOptions& options = {});

// Exact characteristics per (mode, node) with Duhamel source quadrature.
NodalAngularField solve_uncollided(const NodalAngularField& u0, double a, double b, double eps,
                                   double sigma, const std::vector<SourceTerm>& q = {},
                                   Execution exec = Execution::parallel);

ScalarField solve_diffusion(const ProblemSpec& spec, double t_end);

struct AbsorptionTransform {
    ProblemSpec scattering;
    double sigma_a = 0.0;

    double scale(double t) const;  // exp(-sigma_a t)
    MomentField restore(const MomentField& f, double t) const;
    NodalAngularField restore(const NodalAngularField& f, double t) const;
};

AbsorptionTransform absorption_wrap(const ProblemSpec& spec);

}  // namespace hybridpn
