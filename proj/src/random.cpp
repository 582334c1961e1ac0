#include "qnet/random.hpp"

namespace qnet {

ObservableParams random_params(int dim, int n_plus, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ObservableParams p;
  p.dim = dim;
  p.n_plus = n_plus;
  p.n_minus = dim - n_plus;
  p.theta.resize(static_cast<std::size_t>(dim) * dim);
  for (auto& t : p.theta) t = normal(rng);
  return p;
}

Matrix random_dichotomic(int dim, Rng& rng) {
  return observable_from_params(random_params(dim, (dim + 1) / 2, rng));
}

Matrix random_dichotomic_any_signature(int dim, Rng& rng) {
  std::uniform_int_distribution<int> sig(0, dim);
  const int n_plus = sig(rng);
  return observable_from_params(random_params(dim, n_plus, rng));
}

Matrix random_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

Matrix random_density(int dim, int rank, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, rank);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace qnet
