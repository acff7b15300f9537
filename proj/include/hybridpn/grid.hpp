#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <iosfwd>
#include <memory>

#include "hybridpn/harmonics.hpp"

namespace hybridpn {

using Wavenumber = std::array<int, 3>;

// Truncated Fourier grid on [0, 2pi)^d. Axes beyond d are frozen at k = 0.
class SpatialGrid {
public:
    SpatialGrid() = default;
    SpatialGrid(int dimension, int modes_per_axis, int points_per_axis = 0);

    int dimension() const { return dim_; }
    int modes_per_axis() const { return n_; }
    int points_per_axis() const { return points_; }
    int half_band() const { return (n_ - 1) / 2; }
    int mode_count() const { return count_; }
    int point_count() const;

    Wavenumber wavenumber(int mode) const;
    int mode_index(const Wavenumber& k) const;  // -1 when outside the band
    int conjugate_mode(int mode) const { return count_ - 1 - mode; }
    // Modes 0..representative_count()-1 determine a Hermitian field.
    int representative_count() const { return (count_ + 1) / 2; }
    bool axis_active(int axis) const { return axis >= 0 && axis < dim_; }
    double volume() const;

    // Physical point coordinates for a flat point index.
    std::array<double, 3> point(int index) const;

    bool operator==(const SpatialGrid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && points_ == other.points_;
    }

private:
    int dim_ = 1;
    int n_ = 1;
    int points_ = 1;
    int count_ = 1;
};

// Complex Fourier coefficients of a real scalar field.
struct ScalarField {
    SpatialGrid grid;
    Eigen::VectorXcd coeffs;

    ScalarField() = default;
    explicit ScalarField(const SpatialGrid& g) : grid(g), coeffs(Eigen::VectorXcd::Zero(g.mode_count())) {}

    std::complex<double>& at(const Wavenumber& k) { return coeffs[grid.mode_index(k)]; }
    std::complex<double> at(const Wavenumber& k) const;

    Eigen::VectorXd to_physical() const;
    static ScalarField from_physical(const SpatialGrid& g, const Eigen::VectorXd& values);
    double evaluate(const std::array<double, 3>& x) const;
    double l2_norm() const;
};

// Moments (ordinal, mode). Column m holds the moment vector of spatial mode m.
struct MomentField {
    SpatialGrid grid;
    int max_degree = 0;
    Eigen::MatrixXcd coeffs;

    MomentField() = default;
    MomentField(const SpatialGrid& g, int N)
        : grid(g), max_degree(N), coeffs(Eigen::MatrixXcd::Zero(moment_count(N), g.mode_count())) {}

    // Field spatial(x) * angular(Omega).
    static MomentField separable(const ScalarField& spatial, const MomentVector& angular);

    MomentField resized(int N) const;
    bool is_zero() const { return coeffs.cwiseAbs().maxCoeff() == 0.0; }
};

struct NodalAngularField {
    SpatialGrid grid;
    std::shared_ptr<const SphereQuadrature> quad;
    Eigen::MatrixXcd coeffs;  // (node, mode)

    NodalAngularField() = default;
    NodalAngularField(const SpatialGrid& g, std::shared_ptr<const SphereQuadrature> q)
        : grid(g), quad(std::move(q)), coeffs(Eigen::MatrixXcd::Zero(quad->size(), g.mode_count())) {}
};

MomentField spatial_derivative(const MomentField& f, int axis);
NodalAngularField spatial_derivative(const NodalAngularField& f, int axis);
ScalarField spatial_derivative(const ScalarField& f, int axis);

double l2_norm(const MomentField& f);
double l2_norm(const NodalAngularField& f);

// Sum over all d^r derivative multi-indices of the H^{0,s} semi-norm.
double hrs_seminorm(const MomentField& f, int r, int s);

ScalarField scalar_flux(const MomentField& f);

// Nodal samples of a moment field, and the projection back.
NodalAngularField to_nodal(const MomentField& f, std::shared_ptr<const SphereQuadrature> quad);
MomentField project(const NodalAngularField& f, int N);

// Column layout: k1,k2,k3,l,kk,re,im (one row per mode and moment).
void write_csv(const MomentField& f, std::ostream& out);
MomentField read_moment_csv(std::istream& in, const SpatialGrid& grid, int max_degree);
// Column layout: k1,k2,k3,node,re,im.
void write_csv(const NodalAngularField& f, std::ostream& out);

}  // namespace hybridpn
