#include "hybridpn/expm.hpp"

#include <array>
#include <cmath>

namespace hybridpn {

namespace {

constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                      25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                       30270240.0,    2162160.0,    110880.0,     3960.0,
                                       90.0,          1.0};
constexpr std::array<double, 14> b13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr double theta3 = 1.495585217958292e-2;
constexpr double theta5 = 2.539398330063230e-1;
constexpr double theta7 = 9.504178996162932e-1;
constexpr double theta9 = 2.097847961257068e0;
constexpr double theta13 = 5.371920351148152e0;

template <class Matrix>
double one_norm(const Matrix& A) {
    return A.cwiseAbs().colwise().sum().maxCoeff();
}

template <class Matrix, std::size_t K>
Matrix pade_low(const Matrix& A, const std::array<double, K>& b) {
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    Matrix powk = I;
    Matrix U = b[1] * I;
    Matrix V = b[0] * I;
    for (std::size_t k = 2; k + 1 < K; k += 2) {
        powk = powk * A2;
        V += b[k] * powk;
        U += b[k + 1] * powk;
    }
    U = A * U;
    return (V - U).partialPivLu().solve(V + U);
}

template <class Matrix>
Matrix pade13(const Matrix& A) {
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    Matrix U = A6 * (b13[13] * A6 + b13[11] * A4 + b13[9] * A2) + b13[7] * A6 + b13[5] * A4 +
               b13[3] * A2 + b13[1] * I;
    U = A * U;
    Matrix V = A6 * (b13[12] * A6 + b13[10] * A4 + b13[8] * A2) + b13[6] * A6 + b13[4] * A4 +
               b13[2] * A2 + b13[0] * I;
    return (V - U).partialPivLu().solve(V + U);
}

template <class Matrix>
Matrix expm_impl(const Matrix& A) {
    const double norm = one_norm(A);
    if (norm == 0.0) return Matrix::Identity(A.rows(), A.cols());
    if (norm <= theta3) return pade_low(A, b3);
    if (norm <= theta5) return pade_low(A, b5);
    if (norm <= theta7) return pade_low(A, b7);
    if (norm <= theta9) return pade_low(A, b9);
    int squarings = 0;
    if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    Matrix X = pade13(Matrix(A * std::ldexp(1.0, -squarings)));
    for (int i = 0; i < squarings; ++i) X = X * X;
    return X;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) { return expm_impl(A); }
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A) { return expm_impl(A); }

}  // namespace hybridpn
