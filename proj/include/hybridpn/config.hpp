#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridpn/manufactured.hpp"

namespace hybridpn {

enum class SolverKind { pn, hybrid, uncollided, diffusion };

std::string to_string(SolverKind kind);
SolverKind solver_from_string(const std::string& name);

struct RunSpec {
    std::string problem = "iso-smooth";
    ManufacturedParams params;
    SolverKind solver = SolverKind::pn;
    int N = 3;
    int polar_order = 0;      // hybrid/uncollided quadrature; 0 picks one from N and the oracle
    int n_ref = 0;            // reference degree; 0 uses max(2N+6, L+8)
    int richardson_step = 4;  // the reference is checked against n_ref + step
    int bound_s = 1;          // angular regularity used by the bound

    std::vector<int> sweep_N;
    std::vector<double> sweep_dt, sweep_eps, sweep_sigma;

    std::string out = "out";
    std::uint64_t seed = 0;
    int jobs = 1;

    bool has_sweep() const { return !sweep_N.empty() || !sweep_dt.empty() || !sweep_eps.empty() || !sweep_sigma.empty(); }
    // Throws ConfigError on constraint violations (schedule, ranges, unknown problem).
    void validate() const;
    bool operator==(const RunSpec&) const = default;
};

RunSpec parse_config(std::istream& in);
RunSpec parse_config_file(const std::string& path);
void emit_config(const RunSpec& spec, std::ostream& out);

}  // namespace hybridpn
