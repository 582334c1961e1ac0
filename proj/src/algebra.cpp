#include "qnet/algebra.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "qnet/error.hpp"

namespace qnet {

namespace {
// Beyond this the index tables alone stop fitting comfortably in memory.
constexpr std::size_t kMaxGlobalDim = std::size_t{1} << 24;
}  // namespace

SubsystemLayout::SubsystemLayout(const NetworkTopology& topology) {
  party_sites_.resize(topology.party_count());
  source_sites_.resize(topology.source_count());
  for (int s = 0; s < topology.source_count(); ++s) {
    for (const auto& m : topology.sources()[s].members) {
      const int site = static_cast<int>(sites_.size());
      sites_.push_back({s, m.party, m.dim});
      party_sites_[m.party].push_back(site);
      source_sites_[s].push_back(site);
      global_dim_ *= static_cast<std::size_t>(m.dim);
      if (global_dim_ > kMaxGlobalDim)
        throw Error(ErrorCode::BadDims, "global dimension exceeds supported maximum");
    }
  }

  const int n_sites = static_cast<int>(sites_.size());
  tables_.resize(party_sites_.size());
  for (std::size_t p = 0; p < party_sites_.size(); ++p) {
    auto& t = tables_[p];
    std::vector<bool> mine(n_sites, false);
    for (int s : party_sites_[p]) mine[s] = true;
    // Mixed-radix strides: most significant site first in both sub-indices.
    std::vector<std::size_t> local_stride(n_sites, 0), rest_stride(n_sites, 0);
    for (int s = n_sites - 1; s >= 0; --s) {
      if (mine[s]) {
        local_stride[s] = t.local_dim;
        t.local_dim *= sites_[s].dim;
      } else {
        rest_stride[s] = t.rest_dim;
        t.rest_dim *= sites_[s].dim;
      }
    }
    t.index.assign(global_dim_, 0);
    std::vector<int> digit(n_sites, 0);
    for (std::size_t g = 0; g < global_dim_; ++g) {
      std::size_t l = 0, r = 0;
      for (int s = 0; s < n_sites; ++s) {
        if (mine[s])
          l += digit[s] * local_stride[s];
        else
          r += digit[s] * rest_stride[s];
      }
      t.index[r * t.local_dim + l] = g;
      for (int s = n_sites - 1; s >= 0; --s) {
        if (++digit[s] < sites_[s].dim) break;
        digit[s] = 0;
      }
    }
  }
}

std::size_t SubsystemLayout::source_dim(int source) const {
  std::size_t d = 1;
  for (int s : source_sites_[source]) d *= sites_[s].dim;
  return d;
}

void SubsystemLayout::apply(int party, const Matrix& local, const Vector& in, Vector& out) const {
  const auto& t = tables_[party];
  if (static_cast<std::size_t>(local.rows()) != t.local_dim ||
      static_cast<std::size_t>(local.cols()) != t.local_dim)
    throw Error(ErrorCode::DimensionMismatch, "local operator does not match party dimension");
  if (static_cast<std::size_t>(in.size()) != global_dim_)
    throw Error(ErrorCode::DimensionMismatch, "vector does not match global dimension");
  out.resize(in.size());
  const std::size_t d = t.local_dim;
  std::vector<Complex> gathered(d);
  for (std::size_t r = 0; r < t.rest_dim; ++r) {
    const std::size_t* idx = &t.index[r * d];
    for (std::size_t l = 0; l < d; ++l) gathered[l] = in[idx[l]];
    for (std::size_t i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (std::size_t l = 0; l < d; ++l) acc += local(i, l) * gathered[l];
      out[idx[i]] = acc;
    }
  }
}

EmbeddedOperator::EmbeddedOperator(std::shared_ptr<const SubsystemLayout> layout, int party,
                                   Matrix local)
    : layout_(std::move(layout)), party_(party), local_(std::move(local)) {
  if (party_ < 0 || party_ >= layout_->party_count())
    throw Error(ErrorCode::DimensionMismatch, "party index outside layout");
  const auto d = static_cast<Eigen::Index>(layout_->local_dim(party_));
  if (local_.rows() != d || local_.cols() != d)
    throw Error(ErrorCode::DimensionMismatch,
                "local operator is " + std::to_string(local_.rows()) + "x" +
                    std::to_string(local_.cols()) + ", party space has dimension " +
                    std::to_string(d));
}

Vector EmbeddedOperator::apply(const Vector& v) const {
  Vector out;
  layout_->apply(party_, local_, v, out);
  return out;
}

Matrix EmbeddedOperator::dense() const {
  const std::size_t D = layout_->global_dim();
  if (D > kDenseCap)
    throw Error(ErrorCode::DimensionMismatch, "dense materialization above cap");
  Matrix out = Matrix::Zero(D, D);
  const std::size_t d = layout_->local_dim(party_);
  for (std::size_t r = 0; r < layout_->rest_dim(party_); ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        out(layout_->global_index(party_, r, i), layout_->global_index(party_, r, j)) =
            local_(i, j);
  return out;
}

EmbeddedOperator embed(const Matrix& local, int party,
                       const std::shared_ptr<const SubsystemLayout>& layout) {
  return EmbeddedOperator(layout, party, local);
}

const char* to_string(ObservableClass c) {
  switch (c) {
    case ObservableClass::Dichotomic: return "dichotomic";
    case ObservableClass::Contraction: return "contraction";
    case ObservableClass::Unbounded: return "unbounded";
  }
  return "unbounded";
}

Classification classify_observable(const Matrix& op, double tol) {
  if (op.rows() != op.cols())
    throw Error(ErrorCode::DimensionMismatch, "observable is not square");
  if (!op.allFinite()) throw Error(ErrorCode::ValidationError, "observable has non-finite entries");
  Classification c;
  c.hermiticity = hermiticity_residual(op);
  if (c.hermiticity > tol)
    throw Error(ErrorCode::NotHermitian,
                "Hermiticity residual " + std::to_string(c.hermiticity) + " exceeds tolerance");
  const Matrix herm = 0.5 * (op + op.adjoint());
  c.dichotomic = operator_norm(herm * herm - Matrix::Identity(op.rows(), op.cols()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  const double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
  c.contraction_margin = std::max(0.0, max_abs - 1.0);
  if (c.dichotomic <= tol)
    c.tag = ObservableClass::Dichotomic;
  else if (c.contraction_margin <= tol)
    c.tag = ObservableClass::Contraction;
  else
    c.tag = ObservableClass::Unbounded;
  return c;
}

Matrix anticommutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "anticommutator of differently sized operators");
  return a * b + b * a;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "commutator of differently sized operators");
  return a * b - b * a;
}

ObservableParams ObservableParams::balanced(int dim) {
  ObservableParams p;
  p.dim = dim;
  p.n_plus = (dim + 1) / 2;
  p.n_minus = dim / 2;
  p.theta.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  return p;
}

ObservableParams ObservableParams::bloch(double polar, double azimuth) {
  // exp(iH) with H = (polar/2)(sin(az) X - cos(az) Y) rotates Z onto n.sigma.
  // In the Hermitian basis X = sqrt2 * G_sym(0,1) and Y = sqrt2 * G_anti(0,1).
  ObservableParams p = balanced(2);
  const double s = std::sqrt(2.0) * polar / 2.0;
  p.theta[2] = s * std::sin(azimuth);
  p.theta[3] = -s * std::cos(azimuth);
  return p;
}

std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  for (int j = 0; j < d; ++j) {
    Matrix m = Matrix::Zero(d, d);
    m(j, j) = 1.0;
    basis.push_back(std::move(m));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = r;
      sym(k, j) = r;
      basis.push_back(std::move(sym));
      Matrix anti = Matrix::Zero(d, d);
      anti(j, k) = Complex(0, -r);
      anti(k, j) = Complex(0, r);
      basis.push_back(std::move(anti));
    }
  }
  return basis;
}

Matrix generator_from_theta(int d, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(d) * d)
    throw Error(ErrorCode::DimensionMismatch, "theta length must be dim^2");
  Matrix h = Matrix::Zero(d, d);
  const double r = 1.0 / std::sqrt(2.0);
  std::size_t k = 0;
  for (int j = 0; j < d; ++j) h(j, j) = theta[k++];
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      const double s = theta[k++] * r;
      const double a = theta[k++] * r;
      h(j, l) += Complex(s, -a);
      h(l, j) += Complex(s, a);
    }
  }
  return h;
}

std::vector<double> theta_from_generator(const Matrix& hermitian) {
  const auto d = static_cast<int>(hermitian.rows());
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(d) * d);
  const double s2 = std::sqrt(2.0);
  for (int j = 0; j < d; ++j) theta.push_back(hermitian(j, j).real());
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      const Complex upper = hermitian(j, l);
      const Complex lower = hermitian(l, j);
      theta.push_back(s2 * 0.5 * (upper.real() + lower.real()));
      theta.push_back(s2 * 0.5 * (lower.imag() - upper.imag()));
    }
  }
  return theta;
}

Matrix unitary_exp(const Matrix& hermitian) {
  const Eigen::Index d = hermitian.rows();
  const Matrix a = Complex(0, 1) * hermitian;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix b = a / std::ldexp(1.0, squarings);
  Matrix result = Matrix::Identity(d, d);
  Matrix term = Matrix::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix unitary_log(const Matrix& unitary) {
  Eigen::ComplexSchur<Matrix> schur(unitary);
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Eigen::VectorXcd phases(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) phases(k) = std::arg(t(k, k));
  Matrix h = q * phases.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

Matrix spectrum_diagonal(const ObservableParams& p) {
  Matrix diag = Matrix::Zero(p.dim, p.dim);
  if (p.is_contraction()) {
    if (p.eigen_angles.size() != static_cast<std::size_t>(p.dim))
      throw Error(ErrorCode::DimensionMismatch, "eigen_angles length must equal dim");
    for (int k = 0; k < p.dim; ++k) diag(k, k) = std::cos(p.eigen_angles[k]);
  } else {
    if (p.n_plus < 0 || p.n_minus < 0 || p.n_plus + p.n_minus != p.dim)
      throw Error(ErrorCode::ValidationError, "signature counts must sum to dim");
    for (int k = 0; k < p.dim; ++k) diag(k, k) = k < p.n_plus ? 1.0 : -1.0;
  }
  return diag;
}

Matrix observable_from_params(const ObservableParams& p) {
  const Matrix u = unitary_exp(generator_from_theta(p.dim, p.theta));
  Matrix o = u * spectrum_diagonal(p) * u.adjoint();
  return 0.5 * (o + o.adjoint());
}

double embedded_commutator_residual(const EmbeddedOperator& a, const EmbeddedOperator& b) {
  if (&a.layout() != &b.layout())
    throw Error(ErrorCode::LayoutMismatch, "operators embedded in different layouts");
  const std::size_t D = a.layout().global_dim();
  Matrix columns(D, D);
  Vector e = Vector::Zero(D);
  for (std::size_t k = 0; k < D; ++k) {
    e.setZero();
    e[k] = 1.0;
    columns.col(k) = a.apply(b.apply(e)) - b.apply(a.apply(e));
  }
  return operator_norm(columns);
}

double mutual_commutation_check(const std::shared_ptr<const SubsystemLayout>& layout,
                                const LocalObservable& a, const LocalObservable& b) {
  if (a.party == b.party)
    throw Error(ErrorCode::SameParty, "mutual commutation is defined between distinct parties");
  return embedded_commutator_residual(embed(a.op, a.party, layout), embed(b.op, b.party, layout));
}

GeneratedAlgebra generated_algebra_dim(const Matrix& a0, const Matrix& a1, double tol) {
  if (a0.rows() != a1.rows() || a0.cols() != a1.cols() || a0.rows() != a0.cols())
    throw Error(ErrorCode::DimensionMismatch, "generators must be square of equal size");
  if (hermiticity_residual(a0) > tol || hermiticity_residual(a1) > tol)
    throw Error(ErrorCode::NotHermitian, "generators must be Hermitian");

  const Eigen::Index d = a0.rows();
  const Matrix id = Matrix::Identity(d, d);
  // Orthonormal basis of the span, stored as flattened matrices.
  std::vector<Vector> basis;
  std::vector<Matrix> elements;
  auto try_add = [&](const Matrix& m) {
    Vector v = Eigen::Map<const Vector>(m.data(), m.size());
    const double scale = std::max(1.0, v.norm());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    if (v.norm() <= tol * scale) return false;
    basis.push_back(v / v.norm());
    elements.push_back(m);
    return true;
  };

  try_add(id);
  for (std::size_t next = 0; next < elements.size(); ++next) {
    if (static_cast<Eigen::Index>(basis.size()) == d * d) break;
    const Matrix current = elements[next];
    try_add(current * a0);
    try_add(current * a1);
  }

  GeneratedAlgebra out;
  out.dim = static_cast<int>(basis.size());
  if (out.dim == 4) {
    const Matrix a2 = Complex(0, -0.5) * commutator(a0, a1);
    const Complex i(0, 1);
    const bool relations =
        operator_norm(anticommutator(a0, a1)) <= tol && operator_norm(a0 * a0 - id) <= tol &&
        operator_norm(a1 * a1 - id) <= tol && operator_norm(a2 * a2 - id) <= tol &&
        operator_norm(a0 * a1 - i * a2) <= tol && operator_norm(a1 * a2 - i * a0) <= tol &&
        operator_norm(a2 * a0 - i * a1) <= tol;
    out.m2_structure = relations;
  }
  return out;
}

}  // namespace qnet
