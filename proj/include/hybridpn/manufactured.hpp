#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hybridpn/problem.hpp"

namespace hybridpn {

struct ManufacturedParams {
    double eps = 1.0;
    double sigma_t = 1.0;
    double sigma_a = 0.0;
    double T = 1.0;
    double dt = 0.0;  // 0: a single interval
    int dimension = 1;
    int modes = 3;
    int s = 2;      // sobolev-s regularity
    int band = 16;  // sobolev-s angular band limit

    bool operator==(const ManufacturedParams&) const = default;
};

struct Manufactured {
    std::string name;
    ProblemSpec spec;
    // Exact solution sampled at quadrature nodes; empty when no closed form exists.
    std::function<NodalAngularField(double, std::shared_ptr<const SphereQuadrature>)> exact_nodal;
};

Manufactured manufactured(const std::string& name, const ManufacturedParams& params = {});
const std::vector<std::string>& manufactured_names();

// Moment amplitudes (l+1/2)^{-s-1}/sqrt(2l+1) on every order, degrees 0..band.
MomentVector sobolev_profile(int s, int band);

}  // namespace hybridpn
