#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qnet/linalg.hpp"
#include "qnet/network.hpp"

namespace qnet {

/// One tensor factor of the global Hilbert space: the subsystem a source
/// hands to one party.
struct Site {
  int source = 0;
  int party = 0;
  int dim = 2;
};

/// Global tensor-product layout. Sites are ordered by source and, within a
/// source, by member order; site 0 is the most significant digit of a global
/// basis index. Parties act on disjoint sets of sites, which is what makes
/// operators of distinct parties commute.
class SubsystemLayout {
 public:
  explicit SubsystemLayout(const NetworkTopology& topology);

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<int>& party_sites(int party) const { return party_sites_[party]; }
  const std::vector<int>& source_sites(int source) const { return source_sites_[source]; }
  int party_count() const { return static_cast<int>(party_sites_.size()); }
  int source_count() const { return static_cast<int>(source_sites_.size()); }
  std::size_t global_dim() const { return global_dim_; }
  std::size_t local_dim(int party) const { return tables_[party].local_dim; }
  std::size_t source_dim(int source) const;

  /// Global index of (rest index r, local index l) for `party`.
  std::size_t global_index(int party, std::size_t rest, std::size_t local) const {
    const auto& t = tables_[party];
    return t.index[rest * t.local_dim + local];
  }
  std::size_t rest_dim(int party) const { return tables_[party].rest_dim; }

  /// out = (local acting on the party's sites) (x) identity elsewhere, applied to in.
  void apply(int party, const Matrix& local, const Vector& in, Vector& out) const;

 private:
  struct PartyTable {
    std::size_t local_dim = 1;
    std::size_t rest_dim = 1;
    std::vector<std::size_t> index;
  };
  std::vector<Site> sites_;
  std::vector<std::vector<int>> party_sites_;
  std::vector<std::vector<int>> source_sites_;
  std::vector<PartyTable> tables_;
  std::size_t global_dim_ = 1;
};

/// Lazily applied embedding of a party-local operator into the global space.
class EmbeddedOperator {
 public:
  EmbeddedOperator(std::shared_ptr<const SubsystemLayout> layout, int party, Matrix local);

  int party() const { return party_; }
  const Matrix& local() const { return local_; }
  const SubsystemLayout& layout() const { return *layout_; }
  const std::shared_ptr<const SubsystemLayout>& layout_ptr() const { return layout_; }

  Vector apply(const Vector& v) const;
  /// Dense D x D matrix; throws DimensionMismatch when D exceeds kDenseCap.
  Matrix dense() const;

 private:
  std::shared_ptr<const SubsystemLayout> layout_;
  int party_;
  Matrix local_;
};

EmbeddedOperator embed(const Matrix& local, int party,
                       const std::shared_ptr<const SubsystemLayout>& layout);

enum class ObservableClass { Dichotomic, Contraction, Unbounded };

const char* to_string(ObservableClass c);

struct Classification {
  ObservableClass tag = ObservableClass::Unbounded;
  double hermiticity = 0.0;        // ||A - A^dagger||
  double dichotomic = 0.0;         // ||A^2 - I||
  double contraction_margin = 0.0; // max(0, max|eig| - 1)
};

/// Throws NotHermitian when the Hermiticity residual exceeds tol.
Classification classify_observable(const Matrix& op, double tol);

struct LocalObservable {
  int party = 0;
  int input = 0;
  Matrix op;
  ObservableClass cls = ObservableClass::Dichotomic;
};

Matrix anticommutator(const Matrix& a, const Matrix& b);
Matrix commutator(const Matrix& a, const Matrix& b);

/// Search-space coordinates of an observable U diag(spectrum) U^dagger with
/// U = exp(i H(theta)). Dichotomic observables carry an explicit +1/-1
/// signature; contractions carry eigenvalues cos(eigen_angles[k]).
struct ObservableParams {
  int dim = 2;
  int n_plus = 1;
  int n_minus = 1;
  std::vector<double> theta;          // length dim^2
  std::vector<double> eigen_angles;   // empty for dichotomic, length dim otherwise

  bool is_contraction() const { return !eigen_angles.empty(); }

  static ObservableParams balanced(int dim);
  /// Qubit observable n.sigma with Bloch polar/azimuth angles.
  static ObservableParams bloch(double polar, double azimuth);
};

/// Orthonormal (Hilbert-Schmidt) Hermitian basis of d x d matrices: the d
/// diagonal units, then for each j < k the symmetric and antisymmetric pair.
std::vector<Matrix> hermitian_basis(int d);
Matrix generator_from_theta(int d, std::span<const double> theta);
std::vector<double> theta_from_generator(const Matrix& hermitian);

/// exp(i H) for Hermitian H by scaling and squaring of a Taylor series.
Matrix unitary_exp(const Matrix& hermitian);
/// Hermitian H with exp(i H) = U for unitary U (principal branch).
Matrix unitary_log(const Matrix& unitary);

Matrix spectrum_diagonal(const ObservableParams& p);
Matrix observable_from_params(const ObservableParams& p);

/// ||[A, B]|| of two embedded operators, assembled column by column from the
/// global basis vectors.
double embedded_commutator_residual(const EmbeddedOperator& a, const EmbeddedOperator& b);

/// Residual of Definition-level mutual commutation for observables of two
/// distinct parties; throws SameParty otherwise.
double mutual_commutation_check(const std::shared_ptr<const SubsystemLayout>& layout,
                                const LocalObservable& a, const LocalObservable& b);

struct GeneratedAlgebra {
  int dim = 0;
  bool m2_structure = false;
};

/// Linear dimension of the unital algebra generated by a0 and a1, plus the
/// M2(C) flag: dim 4, anticommuting, both squaring to I, Pauli structure
/// constants for {I, a0, a1, -(i/2)[a0, a1]}.
GeneratedAlgebra generated_algebra_dim(const Matrix& a0, const Matrix& a1, double tol);

}  // namespace qnet
