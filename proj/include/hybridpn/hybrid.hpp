#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include "hybridpn/transport.hpp"

namespace hybridpn {

struct HybridState {
    NodalAngularField uncollided;
    MomentField collided;
    int interval = 0;
    double time = 0.0;
};

struct IntervalDiagnostics {
    int m = 0;
    double t_end = 0.0;
    double uncollided_start = 0.0;
    double uncollided_end = 0.0;  // at t_m^-, before remap
    double collided_end = 0.0;    // at t_m^-
    double remap_residual = 0.0;
    double source_residual = 0.0;
    double cumulative_error = std::numeric_limits<double>::quiet_NaN();
};

struct HybridDiagnostics {
    std::vector<IntervalDiagnostics> intervals;
    void write_csv(std::ostream& out) const;
};

// Scalar flux (1/4pi) sum_j w_j u_j of the uncollided field at each sample time,
// advancing u_start (given at t_start) exactly.
std::vector<ScalarField> uncollided_average_source(const NodalAngularField& u_start, double t_start,
                                                   const std::vector<double>& sample_times, double eps,
                                                   double sigma, const std::vector<SourceTerm>& q = {},
                                                   Execution exec = Execution::parallel);

// u + (expansion of c at the nodes of u).
NodalAngularField remap(const NodalAngularField& u, const MomentField& c);

struct HybridOptions {
    int polar_order = 0;  // 0: smallest order with exactness >= 2N
    double step_rate = 1.0;
    Execution exec = Execution::parallel;
    // Optional error of the total field at t_m (after the remap).
    std::function<double(double, const NodalAngularField&)> error_at;
};

// Advances one relabel interval; reuses the collided propagator between calls.
class HybridStepper {
public:
    HybridStepper(const SpatialGrid& grid, std::shared_ptr<const SphereQuadrature> quad, int N, double dt,
                  double eps, double sigma, std::vector<SourceTerm> q, const HybridOptions& options = {});

    HybridState step(const HybridState& state, IntervalDiagnostics* diag = nullptr) const;

private:
    SpatialGrid grid_;
    std::shared_ptr<const SphereQuadrature> quad_;
    int N_;
    double dt_, eps_, sigma_;
    std::vector<SourceTerm> q_;
    HybridOptions options_;
    int substeps_ = 1;
    std::unique_ptr<PnPropagator> collided_;
};

HybridState hybrid_step(const HybridState& state, double dt, double eps, double sigma,
                        const std::vector<SourceTerm>& q, int N, Execution exec = Execution::parallel);

struct HybridResult {
    NodalAngularField total;  // psi_u + psi_c at T^-
    HybridDiagnostics diagnostics;
};

HybridResult run_hybrid(const ProblemSpec& spec, int N, const HybridOptions& options = {});

}  // namespace hybridpn
