#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace hybridpn {

// Absolute tolerance for algebraic identities audited in this module.
inline constexpr double kIdentityTolerance = 1e-12;

using Direction = Eigen::Vector3d;

inline int moment_count(int max_degree) { return (max_degree + 1) * (max_degree + 1); }

struct SphericalIndex {
    int degree = 0;
    int order = 0;

    int ordinal() const { return degree * degree + degree + order; }
    static SphericalIndex from_ordinal(int ordinal);
    bool valid() const { return degree >= 0 && order >= -degree && order <= degree; }
};

// Real coefficients u_{l,k}, blocked by degree.
class MomentVector {
public:
    MomentVector() = default;
    explicit MomentVector(int max_degree);
    MomentVector(int max_degree, Eigen::VectorXd coefficients);

    int max_degree() const { return max_degree_; }
    std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

    double& operator[](SphericalIndex idx) { return coeffs_[idx.ordinal()]; }
    double operator[](SphericalIndex idx) const { return coeffs_[idx.ordinal()]; }

    const Eigen::VectorXd& coefficients() const { return coeffs_; }
    Eigen::VectorXd& coefficients() { return coeffs_; }

    auto block(int degree) const { return coeffs_.segment(degree * degree, 2 * degree + 1); }
    auto block(int degree) { return coeffs_.segment(degree * degree, 2 * degree + 1); }

    // Truncate or zero-pad to a new max degree.
    MomentVector resized(int max_degree) const;

    double l2_norm() const { return coeffs_.norm(); }

private:
    int max_degree_ = 0;
    Eigen::VectorXd coeffs_ = Eigen::VectorXd::Zero(1);
};

// Real orthonormal harmonic m_{l,k}(direction), no Condon-Shortley phase:
// k > 0 ~ cos(k phi), k < 0 ~ sin(|k| phi).
double basis_eval(SphericalIndex index, const Direction& direction);

// All (N+1)^2 harmonics at one direction, in ordinal order.
Eigen::VectorXd basis_all(int max_degree, const Direction& direction);

struct SphereQuadrature {
    std::vector<Direction> nodes;
    std::vector<double> weights;
    int polar_order = 0;
    int exactness = 0;

    std::size_t size() const { return nodes.size(); }
    // Rows are nodes, columns are harmonics up to max_degree.
    Eigen::MatrixXd basis_matrix(int max_degree) const;
};

SphereQuadrature build_sphere_quadrature(int polar_order);

// Smallest polar order whose product rule integrates degree `exactness` exactly.
int polar_order_for_exactness(int exactness);

// Streaming blocks a_l^{(i)}: rows are degree l-1, columns degree l.
// Axis indices are 0, 1, 2 for x, y, z.
struct CouplingSet {
    int max_degree = 0;
    std::array<std::vector<Eigen::MatrixXd>, 3> blocks;  // blocks[axis][l], slot 0 unused

    const Eigen::MatrixXd& block(int axis, int degree) const { return blocks[axis][degree]; }

    // Full symmetric streaming matrix A^{(axis)} of size (N+1)^2, N <= max_degree.
    Eigen::MatrixXd streaming_matrix(int axis, int max_degree) const;
    Eigen::MatrixXd streaming_matrix(int axis) const { return streaming_matrix(axis, max_degree); }

    void write_csv(std::ostream& out) const;
};

CouplingSet assemble_coupling(int max_degree);
CouplingSet coupling_oracle(int max_degree, const SphereQuadrature& quad);

double max_abs_difference(const CouplingSet& a, const CouplingSet& b);

MomentVector project(std::span<const double> nodal, int max_degree, const SphereQuadrature& quad);
std::vector<double> evaluate_expansion(const MomentVector& u, const SphereQuadrature& quad);
double evaluate_expansion(const MomentVector& u, const Direction& direction);

// (sum_{l>=s} (l+1/2)^{2s} |u_l|^2)^{1/2}
double angular_seminorm(const MomentVector& u, int s);
// (s |u|^2 + |u|_{H^s}^2)^{1/2}
double angular_norm(const MomentVector& u, int s);
// (sum_{l>=0} (l+1/2)^{2s} |u_l|^2)^{1/2}
double angular_laplace_norm(const MomentVector& u, int s);

double equivalence_c1(int s);
double equivalence_c2(int s);

}  // namespace hybridpn
