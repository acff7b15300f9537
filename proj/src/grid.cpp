#include "hybridpn/grid.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hybridpn/errors.hpp"

namespace hybridpn {

namespace {

using cplx = std::complex<double>;

int ipow(int base, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void require_active(const SpatialGrid& g, int axis) {
    if (!g.axis_active(axis))
        throw DomainError("spatial_derivative: axis " + std::to_string(axis + 1) + " inactive");
}

Eigen::VectorXcd derivative_factors(const SpatialGrid& g, int axis) {
    Eigen::VectorXcd f(g.mode_count());
    for (int m = 0; m < g.mode_count(); ++m) f[m] = cplx(0.0, g.wavenumber(m)[axis]);
    return f;
}

}  // namespace

SpatialGrid::SpatialGrid(int dimension, int modes_per_axis, int points_per_axis)
    : dim_(dimension), n_(modes_per_axis), points_(points_per_axis) {
    if (dimension < 1 || dimension > 3) throw DomainError("SpatialGrid: dimension must be 1, 2 or 3");
    if (modes_per_axis < 1 || modes_per_axis % 2 == 0)
        throw DomainError("SpatialGrid: modes per axis must be odd and positive");
    if (points_ == 0) points_ = std::max(modes_per_axis, 2 * modes_per_axis - 1);
    if (points_ < modes_per_axis) throw DomainError("SpatialGrid: fewer points than modes");
    count_ = ipow(n_, dim_);
}

int SpatialGrid::point_count() const { return ipow(points_, dim_); }

Wavenumber SpatialGrid::wavenumber(int mode) const {
    Wavenumber k{0, 0, 0};
    const int h = half_band();
    for (int a = 0; a < dim_; ++a) {
        k[a] = mode % n_ - h;
        mode /= n_;
    }
    return k;
}

int SpatialGrid::mode_index(const Wavenumber& k) const {
    const int h = half_band();
    int index = 0, stride = 1;
    for (int a = 0; a < 3; ++a) {
        if (a >= dim_) {
            if (k[a] != 0) return -1;
            continue;
        }
        if (std::abs(k[a]) > h) return -1;
        index += (k[a] + h) * stride;
        stride *= n_;
    }
    return index;
}

double SpatialGrid::volume() const { return std::pow(2.0 * std::numbers::pi, dim_); }

std::array<double, 3> SpatialGrid::point(int index) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        x[a] = 2.0 * std::numbers::pi * (index % points_) / points_;
        index /= points_;
    }
    return x;
}

std::complex<double> ScalarField::at(const Wavenumber& k) const {
    const int m = grid.mode_index(k);
    return m < 0 ? cplx(0.0) : coeffs[m];
}

double ScalarField::evaluate(const std::array<double, 3>& x) const {
    double v = 0.0;
    for (int m = 0; m < grid.mode_count(); ++m) {
        const Wavenumber k = grid.wavenumber(m);
        const double phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        v += (coeffs[m] * cplx(std::cos(phase), std::sin(phase))).real();
    }
    return v;
}

Eigen::VectorXd ScalarField::to_physical() const {
    Eigen::VectorXd v(grid.point_count());
    for (int p = 0; p < grid.point_count(); ++p) v[p] = evaluate(grid.point(p));
    return v;
}

ScalarField ScalarField::from_physical(const SpatialGrid& g, const Eigen::VectorXd& values) {
    if (values.size() != g.point_count()) throw DomainError("from_physical: wrong number of samples");
    ScalarField f(g);
    const double scale = 1.0 / g.point_count();
    for (int m = 0; m < g.mode_count(); ++m) {
        const Wavenumber k = g.wavenumber(m);
        cplx sum = 0.0;
        for (int p = 0; p < g.point_count(); ++p) {
            const auto x = g.point(p);
            const double phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            sum += values[p] * cplx(std::cos(phase), -std::sin(phase));
        }
        f.coeffs[m] = sum * scale;
    }
    return f;
}

double ScalarField::l2_norm() const { return std::sqrt(grid.volume() * coeffs.squaredNorm()); }

MomentField MomentField::separable(const ScalarField& spatial, const MomentVector& angular) {
    MomentField f(spatial.grid, angular.max_degree());
    f.coeffs = angular.coefficients().cast<cplx>() * spatial.coeffs.transpose();
    return f;
}

MomentField MomentField::resized(int N) const {
    MomentField out(grid, N);
    const int n = std::min(moment_count(N), moment_count(max_degree));
    out.coeffs.topRows(n) = coeffs.topRows(n);
    return out;
}

MomentField spatial_derivative(const MomentField& f, int axis) {
    require_active(f.grid, axis);
    MomentField out = f;
    out.coeffs = f.coeffs * derivative_factors(f.grid, axis).asDiagonal();
    return out;
}

NodalAngularField spatial_derivative(const NodalAngularField& f, int axis) {
    require_active(f.grid, axis);
    NodalAngularField out = f;
    out.coeffs = f.coeffs * derivative_factors(f.grid, axis).asDiagonal();
    return out;
}

ScalarField spatial_derivative(const ScalarField& f, int axis) {
    require_active(f.grid, axis);
    ScalarField out = f;
    out.coeffs = f.coeffs.cwiseProduct(derivative_factors(f.grid, axis));
    return out;
}

double l2_norm(const MomentField& f) { return std::sqrt(f.grid.volume() * f.coeffs.squaredNorm()); }

double l2_norm(const NodalAngularField& f) {
    double sum = 0.0;
    for (int m = 0; m < f.coeffs.cols(); ++m)
        for (int j = 0; j < f.coeffs.rows(); ++j) sum += f.quad->weights[j] * std::norm(f.coeffs(j, m));
    return std::sqrt(f.grid.volume() * sum);
}

double hrs_seminorm(const MomentField& f, int r, int s) {
    if (r < 0 || s < 0) throw DomainError("hrs_seminorm: negative order");
    const SpatialGrid& g = f.grid;
    std::vector<double> weight(g.mode_count(), 0.0);
    for (int m = 0; m < g.mode_count(); ++m)
        for (int l = s; l <= f.max_degree; ++l)
            weight[m] += std::pow(l + 0.5, 2.0 * s) * f.coeffs.col(m).segment(l * l, 2 * l + 1).squaredNorm();

    const int d = g.dimension();
    const int combos = ipow(d, r);
    double total = 0.0;
    for (int c = 0; c < combos; ++c) {
        std::array<int, 3> counts{0, 0, 0};
        for (int j = 0, code = c; j < r; ++j, code /= d) ++counts[code % d];
        double sum = 0.0;
        for (int m = 0; m < g.mode_count(); ++m) {
            if (weight[m] == 0.0) continue;
            const Wavenumber k = g.wavenumber(m);
            double factor = 1.0;
            for (int a = 0; a < d; ++a) factor *= std::pow(static_cast<double>(k[a]), 2 * counts[a]);
            sum += factor * weight[m];
        }
        total += std::sqrt(g.volume() * sum);
    }
    return total;
}

ScalarField scalar_flux(const MomentField& f) {
    ScalarField out(f.grid);
    out.coeffs = f.coeffs.row(0).transpose() * (0.5 / std::sqrt(std::numbers::pi));
    return out;
}

NodalAngularField to_nodal(const MomentField& f, std::shared_ptr<const SphereQuadrature> quad) {
    NodalAngularField out(f.grid, quad);
    const Eigen::MatrixXd B = quad->basis_matrix(f.max_degree);
    out.coeffs = B.cast<cplx>() * f.coeffs;
    return out;
}

MomentField project(const NodalAngularField& f, int N) {
    if (f.quad->exactness < 2 * N) throw PreconditionError("project: quadrature exactness below 2N");
    MomentField out(f.grid, N);
    Eigen::MatrixXd B = f.quad->basis_matrix(N);
    for (std::size_t j = 0; j < f.quad->size(); ++j) B.row(j) *= f.quad->weights[j];
    out.coeffs = B.transpose().cast<cplx>() * f.coeffs;
    return out;
}

void write_csv(const MomentField& f, std::ostream& out) {
    out << "k1,k2,k3,l,kk,re,im\n" << std::setprecision(17);
    for (int m = 0; m < f.grid.mode_count(); ++m) {
        const Wavenumber k = f.grid.wavenumber(m);
        for (int o = 0; o < f.coeffs.rows(); ++o) {
            const auto idx = SphericalIndex::from_ordinal(o);
            out << k[0] << ',' << k[1] << ',' << k[2] << ',' << idx.degree << ',' << idx.order << ','
                << f.coeffs(o, m).real() << ',' << f.coeffs(o, m).imag() << '\n';
        }
    }
}

MomentField read_moment_csv(std::istream& in, const SpatialGrid& grid, int max_degree) {
    MomentField f(grid, max_degree);
    std::string line;
    if (!std::getline(in, line) || line != "k1,k2,k3,l,kk,re,im")
        throw ConfigError("read_moment_csv: unexpected header");
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        Wavenumber k;
        int l = 0, kk = 0;
        double re = 0.0, im = 0.0;
        char comma;
        ss >> k[0] >> comma >> k[1] >> comma >> k[2] >> comma >> l >> comma >> kk >> comma >> re >> comma >> im;
        if (!ss) throw ConfigError("read_moment_csv: malformed row " + std::to_string(row));
        const int m = grid.mode_index(k);
        const SphericalIndex idx{l, kk};
        if (m < 0 || !idx.valid() || l > max_degree)
            throw ConfigError("read_moment_csv: row " + std::to_string(row) + " outside the field");
        f.coeffs(idx.ordinal(), m) = cplx(re, im);
    }
    return f;
}

void write_csv(const NodalAngularField& f, std::ostream& out) {
    out << "k1,k2,k3,node,re,im\n" << std::setprecision(17);
    for (int m = 0; m < f.grid.mode_count(); ++m) {
        const Wavenumber k = f.grid.wavenumber(m);
        for (int j = 0; j < f.coeffs.rows(); ++j)
            out << k[0] << ',' << k[1] << ',' << k[2] << ',' << j << ',' << f.coeffs(j, m).real() << ','
                << f.coeffs(j, m).imag() << '\n';
    }
}

}  // namespace hybridpn
