#pragma once

#include <map>
#include <utility>
#include <vector>

#include "hybridpn/grid.hpp"

namespace hybridpn {

// (sum_i poly[i] t^i) * exp(rate t)
struct TimeProfile {
    std::vector<double> poly{1.0};
    double rate = 0.0;

    double operator()(double t) const;
    int degree() const { return static_cast<int>(poly.size()) - 1; }
};

struct SourceTerm {
    ScalarField spatial;
    MomentVector angular;
    TimeProfile time;
};

// Number of intervals M with M * dt == T; throws ConfigError("M*dt != T") otherwise.
int schedule_steps(double T, double dt);

struct ProblemSpec {
    double eps = 1.0;
    double sigma_t = 1.0;
    double sigma_a = 0.0;
    MomentField g;
    std::vector<SourceTerm> q;
    double T = 1.0;
    int M = 1;

    // Pure-scattering cross-section used by the P_N and hybrid operators.
    double sigma() const { return sigma_t; }
    double dt() const { return T / M; }
    double interval_start(int m) const { return T * m / M; }
    const SpatialGrid& grid() const { return g.grid; }

    void validate() const;
    bool has_source() const { return !q.empty(); }
    bool isotropic() const;
    int data_degree() const;

    // Moments of q(t) truncated or padded to degree N.
    MomentField source_moments(double t, int N) const;
    // Largest |rate| among the time profiles.
    double source_rate() const;
};

struct DataNorm {
    double g = 0.0;      // |g|_{H^{r,s}}
    double q_sup = 0.0;  // |q|_{L^inf([0,T];H^{r,s})}
    double q_l1 = 0.0;   // |q|_{L^1([0,T];H^{r,s})}
};

using NormPair = std::pair<int, int>;
using DataNorms = std::map<NormPair, DataNorm>;

struct DataNormOptions {
    int time_stencil = 33;       // Chebyshev-Lobatto points for the sup in time
    int time_quadrature = 24;    // Gauss points for the L^1 in time
    int max_degree = -1;         // evaluation degree; -1 uses the data degree
    double tail_tolerance = 1e-10;
};

DataNorms data_norms(const ProblemSpec& spec, const std::vector<NormPair>& pairs,
                     const DataNormOptions& options = {});

}  // namespace hybridpn
