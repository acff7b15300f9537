#include "hybridpn/harmonics.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "hybridpn/errors.hpp"
#include "hybridpn/quadrature.hpp"

namespace hybridpn {

namespace {

constexpr double kUnitTolerance = 1e-10;

using cplx = std::complex<double>;

void check_unit(const Direction& d) {
    if (std::abs(d.norm() - 1.0) > kUnitTolerance)
        throw DomainError("basis_eval: direction is not a unit vector");
}

void fill_basis(int N, const Direction& d, double* out) {
    const double x = d.z();
    const cplx step(d.x(), d.y());  // sin(theta) e^{i phi}
    // ptilde_{l,m} = normalized associated Legendre / sin^m(theta)
    std::vector<double> diag(N + 1);
    diag[0] = 0.5 / std::sqrt(std::numbers::pi);
    for (int m = 1; m <= N; ++m) diag[m] = diag[m - 1] * std::sqrt((2.0 * m + 1.0) / (2.0 * m));

    cplx w(1.0, 0.0);
    for (int m = 0; m <= N; ++m) {
        if (m > 0) w *= step;
        double p_prev = 0.0, p = diag[m];
        for (int l = m; l <= N; ++l) {
            if (l == m + 1) {
                p_prev = p;
                p = std::sqrt(2.0 * m + 3.0) * x * p_prev;
            } else if (l > m + 1) {
                double ll = l, mm = m;
                double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
                double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                     (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
                double next = a * (x * p - b * p_prev);
                p_prev = p;
                p = next;
            }
            if (m == 0) {
                out[l * l + l] = p;
            } else {
                out[l * l + l + m] = std::numbers::sqrt2 * p * w.real();
                out[l * l + l - m] = std::numbers::sqrt2 * p * w.imag();
            }
        }
    }
}

// Multiplication by cos(theta), sin(theta)e^{+i phi}, sin(theta)e^{-i phi} in the
// complex basis Z_l^m = pbar_{l|m|} e^{i m phi}; columns are the operand.
struct ComplexMultipliers {
    Eigen::MatrixXcd mu, raise, lower;
};

double coeff_mu(int l, int m) {  // A(l, m)
    double lp = l + 1.0, mm = m;
    double num = lp * lp - mm * mm;
    if (num <= 0.0) return 0.0;
    return std::sqrt(num / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}

ComplexMultipliers complex_multipliers(int N) {
    const int n = moment_count(N);
    ComplexMultipliers c{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n),
                         Eigen::MatrixXcd::Zero(n, n)};
    auto put = [&](Eigen::MatrixXcd& M, int l_row, int m_row, int col, double v) {
        if (l_row < 0 || l_row > N || std::abs(m_row) > l_row || v == 0.0) return;
        M(l_row * l_row + l_row + m_row, col) += v;
    };
    // sin e^{+i phi} Z_l^m, m >= 0
    auto raise_pos = [](int l, int m, double& up, double& down) {
        double L = l, M = m;
        up = std::sqrt((L + M + 1.0) * (L + M + 2.0) / ((2.0 * L + 1.0) * (2.0 * L + 3.0)));
        down = l >= 1 ? -std::sqrt(std::max(0.0, (L - M) * (L - M - 1.0)) /
                                   ((2.0 * L - 1.0) * (2.0 * L + 1.0)))
                      : 0.0;
    };
    // sin e^{-i phi} Z_l^m, m > 0
    auto lower_pos = [](int l, int m, double& up, double& down) {
        double L = l, M = m;
        up = -std::sqrt((L - M + 1.0) * (L - M + 2.0) / ((2.0 * L + 1.0) * (2.0 * L + 3.0)));
        down = std::sqrt((L + M) * (L + M - 1.0) / ((2.0 * L - 1.0) * (2.0 * L + 1.0)));
    };
    for (int l = 0; l <= N; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int col = l * l + l + m;
            const int am = std::abs(m);
            put(c.mu, l + 1, m, col, coeff_mu(l, am));
            if (l >= 1) put(c.mu, l - 1, m, col, coeff_mu(l - 1, am));

            double up = 0.0, down = 0.0;
            if (m >= 0) {
                raise_pos(l, am, up, down);
            } else {
                lower_pos(l, am, up, down);  // conjugate of sin e^{-i phi} Z^{|m|}
            }
            put(c.raise, l + 1, m + 1, col, up);
            put(c.raise, l - 1, m + 1, col, down);

            if (m > 0) {
                lower_pos(l, am, up, down);
            } else {
                raise_pos(l, am, up, down);  // conjugate of sin e^{+i phi} Z^{|m|}
            }
            put(c.lower, l + 1, m - 1, col, up);
            put(c.lower, l - 1, m - 1, col, down);
        }
    }
    return c;
}

// Columns: real harmonics expressed in the complex basis.
Eigen::MatrixXcd real_from_complex(int N) {
    const int n = moment_count(N);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
    const double r = 1.0 / std::numbers::sqrt2;
    for (int l = 0; l <= N; ++l) {
        const int c0 = l * l + l;
        U(c0, c0) = 1.0;
        for (int m = 1; m <= l; ++m) {
            U(c0 + m, c0 + m) = r;
            U(c0 - m, c0 + m) = r;
            U(c0 + m, c0 - m) = cplx(0.0, -r);
            U(c0 - m, c0 - m) = cplx(0.0, r);
        }
    }
    return U;
}

CouplingSet blocks_from_full(int N, const std::array<Eigen::MatrixXd, 3>& full) {
    CouplingSet set;
    set.max_degree = N;
    for (int axis = 0; axis < 3; ++axis) {
        set.blocks[axis].assign(N + 1, Eigen::MatrixXd());
        for (int l = 1; l <= N; ++l)
            set.blocks[axis][l] = full[axis].block((l - 1) * (l - 1), l * l, 2 * l - 1, 2 * l + 1);
    }
    return set;
}

}  // namespace

SphericalIndex SphericalIndex::from_ordinal(int ordinal) {
    if (ordinal < 0) throw DomainError("SphericalIndex: negative ordinal");
    int l = static_cast<int>(std::sqrt(static_cast<double>(ordinal)));
    while (l * l > ordinal) --l;
    while ((l + 1) * (l + 1) <= ordinal) ++l;
    return {l, ordinal - l * l - l};
}

MomentVector::MomentVector(int max_degree)
    : max_degree_(max_degree), coeffs_(Eigen::VectorXd::Zero(moment_count(max_degree))) {
    if (max_degree < 0) throw DomainError("MomentVector: negative max degree");
}

MomentVector::MomentVector(int max_degree, Eigen::VectorXd coefficients)
    : max_degree_(max_degree), coeffs_(std::move(coefficients)) {
    if (max_degree < 0 || coeffs_.size() != moment_count(max_degree))
        throw DomainError("MomentVector: length must equal (N+1)^2");
}

MomentVector MomentVector::resized(int max_degree) const {
    MomentVector out(max_degree);
    const int n = std::min(moment_count(max_degree), moment_count(max_degree_));
    out.coeffs_.head(n) = coeffs_.head(n);
    return out;
}

double basis_eval(SphericalIndex index, const Direction& direction) {
    if (!index.valid()) throw DomainError("basis_eval: |k| > l");
    check_unit(direction);
    std::vector<double> values(moment_count(index.degree));
    fill_basis(index.degree, direction, values.data());
    return values[index.ordinal()];
}

Eigen::VectorXd basis_all(int max_degree, const Direction& direction) {
    check_unit(direction);
    Eigen::VectorXd values(moment_count(max_degree));
    fill_basis(max_degree, direction, values.data());
    return values;
}

Eigen::MatrixXd SphereQuadrature::basis_matrix(int max_degree) const {
    Eigen::MatrixXd B(nodes.size(), moment_count(max_degree));
    std::vector<double> row(moment_count(max_degree));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        fill_basis(max_degree, nodes[j], row.data());
        for (int c = 0; c < B.cols(); ++c) B(j, c) = row[c];
    }
    return B;
}

SphereQuadrature build_sphere_quadrature(int polar_order) {
    if (polar_order < 1) throw PreconditionError("build_sphere_quadrature: polar_order must be >= 1");
    const GaussRule mu = gauss_legendre(polar_order);
    const int n_phi = 2 * polar_order;
    const double dphi = std::numbers::pi / polar_order;
    SphereQuadrature quad;
    quad.polar_order = polar_order;
    quad.exactness = 2 * polar_order - 1;
    quad.nodes.reserve(polar_order * n_phi);
    quad.weights.reserve(polar_order * n_phi);
    for (int i = 0; i < polar_order; ++i) {
        const double z = mu.nodes[i];
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = (j + 0.5) * dphi;
            quad.nodes.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
            quad.weights.push_back(mu.weights[i] * dphi);
        }
    }
    return quad;
}

int polar_order_for_exactness(int exactness) { return std::max(1, exactness / 2 + 1); }

Eigen::MatrixXd CouplingSet::streaming_matrix(int axis, int N) const {
    if (N > max_degree) throw DomainError("streaming_matrix: degree exceeds coupling set");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(moment_count(N), moment_count(N));
    for (int l = 1; l <= N; ++l) {
        const auto& a = blocks[axis][l];
        A.block((l - 1) * (l - 1), l * l, 2 * l - 1, 2 * l + 1) = a;
        A.block(l * l, (l - 1) * (l - 1), 2 * l + 1, 2 * l - 1) = a.transpose();
    }
    return A;
}

void CouplingSet::write_csv(std::ostream& out) const {
    out << "axis,l,row,col,value\n" << std::setprecision(17);
    for (int axis = 0; axis < 3; ++axis)
        for (int l = 1; l <= max_degree; ++l) {
            const auto& a = blocks[axis][l];
            for (int r = 0; r < a.rows(); ++r)
                for (int c = 0; c < a.cols(); ++c)
                    out << axis + 1 << ',' << l << ',' << r - (l - 1) << ',' << c - l << ','
                        << a(r, c) << '\n';
        }
}

CouplingSet assemble_coupling(int N) {
    if (N < 1) throw DomainError("assemble_coupling: N must be >= 1");
    const ComplexMultipliers c = complex_multipliers(N);
    const Eigen::MatrixXcd U = real_from_complex(N);
    const cplx half(0.5, 0.0), half_over_i(0.0, -0.5);
    const std::array<Eigen::MatrixXcd, 3> complex_axes = {
        half * (c.raise + c.lower), half_over_i * (c.raise - c.lower), c.mu};
    std::array<Eigen::MatrixXd, 3> full;
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::MatrixXcd R = U.adjoint() * complex_axes[axis] * U;
        full[axis] = R.real();
    }
    return blocks_from_full(N, full);
}

CouplingSet coupling_oracle(int N, const SphereQuadrature& quad) {
    if (N < 1) throw DomainError("coupling_oracle: N must be >= 1");
    if (quad.exactness < 2 * N + 1)
        throw PreconditionError("coupling_oracle: quadrature exactness " +
                                std::to_string(quad.exactness) + " < 2N+1 = " +
                                std::to_string(2 * N + 1));
    const Eigen::MatrixXd B = quad.basis_matrix(N);
    std::array<Eigen::MatrixXd, 3> full;
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::VectorXd w(quad.size());
        for (std::size_t j = 0; j < quad.size(); ++j) w[j] = quad.weights[j] * quad.nodes[j][axis];
        full[axis] = B.transpose() * w.asDiagonal() * B;
    }
    return blocks_from_full(N, full);
}

double max_abs_difference(const CouplingSet& a, const CouplingSet& b) {
    if (a.max_degree != b.max_degree) throw DomainError("max_abs_difference: degree mismatch");
    double worst = 0.0;
    for (int axis = 0; axis < 3; ++axis)
        for (int l = 1; l <= a.max_degree; ++l)
            worst = std::max(worst, (a.blocks[axis][l] - b.blocks[axis][l]).cwiseAbs().maxCoeff());
    return worst;
}

MomentVector project(std::span<const double> nodal, int N, const SphereQuadrature& quad) {
    if (quad.exactness < 2 * N)
        throw PreconditionError("project: quadrature exactness below 2N");
    if (nodal.size() != quad.size()) throw DomainError("project: nodal size mismatch");
    MomentVector u(N);
    std::vector<double> row(moment_count(N));
    for (std::size_t j = 0; j < quad.size(); ++j) {
        fill_basis(N, quad.nodes[j], row.data());
        const double wv = quad.weights[j] * nodal[j];
        for (int c = 0; c < moment_count(N); ++c) u.coefficients()[c] += wv * row[c];
    }
    return u;
}

std::vector<double> evaluate_expansion(const MomentVector& u, const SphereQuadrature& quad) {
    std::vector<double> out(quad.size());
    for (std::size_t j = 0; j < quad.size(); ++j) out[j] = evaluate_expansion(u, quad.nodes[j]);
    return out;
}

double evaluate_expansion(const MomentVector& u, const Direction& direction) {
    return basis_all(u.max_degree(), direction).dot(u.coefficients());
}

double angular_seminorm(const MomentVector& u, int s) {
    double sum = 0.0;
    for (int l = std::max(s, 0); l <= u.max_degree(); ++l)
        sum += std::pow(l + 0.5, 2.0 * s) * u.block(l).squaredNorm();
    return std::sqrt(sum);
}

double angular_norm(const MomentVector& u, int s) {
    const double semi = angular_seminorm(u, s);
    return std::sqrt(s * u.coefficients().squaredNorm() + semi * semi);
}

double angular_laplace_norm(const MomentVector& u, int s) {
    double sum = 0.0;
    for (int l = 0; l <= u.max_degree(); ++l)
        sum += std::pow(l + 0.5, 2.0 * s) * u.block(l).squaredNorm();
    return std::sqrt(sum);
}

double equivalence_c1(int s) { return s == 0 ? 1.0 : 1.0 / std::sqrt(3.0 * s); }

double equivalence_c2(int s) {
    return s == 0 ? 1.0 : std::sqrt(5.0 / s) * std::pow(s - 0.5, s);
}

}  // namespace hybridpn
