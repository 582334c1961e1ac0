#include "qnet/linalg.hpp"

#include <cmath>
#include <string_view>

#include "qnet/error.hpp"

namespace qnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownParty: return "UnknownParty";
    case ErrorCode::DegenerateSource: return "DegenerateSource";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::HOutOfRange: return "HOutOfRange";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SameParty: return "SameParty";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::SingletNeedsQubits: return "SingletNeedsQubits";
    case ErrorCode::MissingSource: return "MissingSource";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::NonCommutingFactors: return "NonCommutingFactors";
    case ErrorCode::InvalidIndependentSet: return "InvalidIndependentSet";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::NoIndependentSet: return "NoIndependentSet";
    case ErrorCode::UnsupportedTopology: return "UnsupportedTopology";
    case ErrorCode::EvenDimension: return "EvenDimension";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= kSpectralNormCap && m.cols() <= kSpectralNormCap) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  return m.norm();
}

double hermiticity_residual(const Matrix& m) {
  return operator_norm(m - m.adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

double trace_norm_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

namespace pauli {

Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix z_plus_x() { return (z() + x()) / std::sqrt(2.0); }
Matrix z_minus_x() { return (z() - x()) / std::sqrt(2.0); }

Matrix tensor_power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < k; ++i) out = kron(out, m);
  return out;
}

}  // namespace pauli

}  // namespace qnet
