#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace qnet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest global dimension for which dense D x D matrices are ever built.
inline constexpr std::size_t kDenseCap = 4096;

/// Above this size residual norms fall back to Frobenius, which never
/// under-reports the spectral norm.
inline constexpr Eigen::Index kSpectralNormCap = 64;

inline constexpr double kDefaultAlgebraicTol = 1e-9;

double operator_norm(const Matrix& m);
double hermiticity_residual(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);

/// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
double trace_norm_hermitian(const Matrix& m);

namespace pauli {
Matrix identity(Eigen::Index d = 2);
Matrix x();
Matrix y();
Matrix z();
/// (Z + X)/sqrt(2)
Matrix z_plus_x();
/// (Z - X)/sqrt(2)
Matrix z_minus_x();
Matrix tensor_power(const Matrix& m, int k);
}  // namespace pauli

}  // namespace qnet
