#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hybridpn/config.hpp"

namespace hybridpn {

struct SweepPoint {
    int N = 0;
    double dt = 0.0;  // 0: a single interval
    double eps = 1.0;
    double sigma = 1.0;  // sigma_t
};

struct SweepRow {
    std::string problem;
    std::string solver;
    int N = 0;
    double dt = 0.0;
    double eps = 1.0;
    double sigma_t = 1.0;
    double sigma_a = 0.0;
    double T = 1.0;
    double error = 0.0;
    double oracle_uncertainty = 0.0;
    double bound = 0.0;
    std::string branch;  // "none" when no theorem covers the solver
    double walltime_s = 0.0;

    // Oracle too coarse to trust the measured error. Differences at round-off
    // level (both below kRoundoff) say nothing about the oracle.
    static constexpr double kRoundoff = 1e-13;
    bool flagged() const { return oracle_uncertainty > 0.1 * error && oracle_uncertainty > kRoundoff; }
};

// Cartesian product of the sweep axes; empty axes take the base value.
std::vector<SweepPoint> sweep_points(const RunSpec& spec);

// Reference degree for one row: n_ref if set, else max(2N+6, L+8).
int reference_degree(const RunSpec& spec, int N, int data_degree);

// Solves every point, measures the error against the oracle and evaluates the bound.
// Rows come back ordered by (eps, sigma, dt, N) whatever the scheduling.
std::vector<SweepRow> run_sweep(const RunSpec& spec);
// Same, for the base point only.
SweepRow run_single(const RunSpec& spec);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

struct AxisSlope {
    std::string axis;  // "N" (against N+1), "dt", "eps" or "sigma"
    double slope = 0.0;
    int groups = 0;
};

struct ConformanceReport {
    std::string family;
    double C = 0.0;  // max error/bound over the rows used
    int rows_used = 0;
    int flagged = 0;       // excluded from the fit
    int violations = 0;    // bound zero with error above tolerance
    std::vector<AxisSlope> slopes;
    std::vector<std::string> notes;  // non-monotone sequences, violations
    bool conformant() const { return violations == 0; }
    void write_text(std::ostream& out) const;
};

// One constant per family; rows must share theorem and problem. At least 3 rows.
ConformanceReport fit_and_check(const std::vector<SweepRow>& rows, const std::string& family,
                                double zero_tolerance = 1e-8);
// Splits rows into (solver, problem) families, skipping rows without a bound.
std::vector<ConformanceReport> fit_families(const std::vector<SweepRow>& rows, double zero_tolerance = 1e-8);

}  // namespace hybridpn
