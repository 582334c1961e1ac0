#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnet/algebra.hpp"

namespace qnet {

enum class SourceKind { MaximallyEntangled, Singlet, Product, SeparableMixture, Werner, Explicit };

const char* to_string(SourceKind kind);

struct SourceState {
  std::string name;
  SourceKind kind = SourceKind::Explicit;
  std::vector<int> dims;  // one per source site
  Matrix rho;
  double visibility = 1.0;  // Werner kind only
};

/// Inputs for make_source_state. Only the fields relevant to `kind` are read.
struct SourceParams {
  double visibility = 1.0;
  /// Product: one local density matrix per site.
  std::vector<Matrix> locals;
  /// SeparableMixture: weight and per-site local states of each component.
  struct Component {
    double weight = 0.0;
    std::vector<Matrix> locals;
  };
  std::vector<Component> components;
  /// Explicit: the full matrix on the source's sites.
  Matrix matrix;
};

inline constexpr double kStateTol = 1e-12;

/// Builds and validates a source state on sites of dimensions `dims`.
/// Singlet needs two qubits; Werner mixes the singlet (qubits) or the
/// maximally entangled projector (d x d) with the maximally mixed state.
SourceState make_source_state(const std::string& name, SourceKind kind, const SourceParams& params,
                              const std::vector<int>& dims);

/// Throws NotAState unless rho is Hermitian, PSD and unit-trace within tol.
void check_density(const Matrix& rho, double tol, const std::string& what);

Matrix pure_density(const Vector& psi);
Matrix maximally_entangled_density(int d);
Matrix singlet_density();

/// Weighted pure-state ensemble of the global state, used for every
/// expectation value.
struct EnsembleMember {
  double weight = 0.0;
  Vector psi;
};

class NetworkState {
 public:
  const SubsystemLayout& layout() const { return *layout_; }
  const std::shared_ptr<const SubsystemLayout>& layout_ptr() const { return layout_; }
  const std::vector<SourceState>& sources() const { return sources_; }
  const std::vector<EnsembleMember>& ensemble() const { return ensemble_; }
  bool is_product() const { return !global_rho_.has_value(); }

  /// Dense global density matrix (throws above kDenseCap).
  Matrix density() const;

  /// Escape hatch: an arbitrary global density matrix, not necessarily a
  /// product over sources.
  static NetworkState from_global_density(std::shared_ptr<const SubsystemLayout> layout,
                                          const Matrix& rho);

 private:
  friend NetworkState assemble_network_state(std::vector<SourceState> sources,
                                             std::shared_ptr<const SubsystemLayout> layout);
  std::shared_ptr<const SubsystemLayout> layout_;
  std::vector<SourceState> sources_;
  std::optional<Matrix> global_rho_;
  std::vector<EnsembleMember> ensemble_;
};

NetworkState assemble_network_state(std::vector<SourceState> sources,
                                    std::shared_ptr<const SubsystemLayout> layout);

/// A party-local factor of a product expectation.
struct LocalFactor {
  int party = 0;
  Matrix op;
};

/// Tr(rho * prod factors) for factors on pairwise distinct parties.
double expectation(const NetworkState& state, const std::vector<EmbeddedOperator>& factors);
double expectation(const NetworkState& state, const std::vector<LocalFactor>& factors);
/// Complex value of the same trace, without the reality assertion.
Complex expectation_complex(const NetworkState& state, const std::vector<LocalFactor>& factors);

struct FactorizationResult {
  double max_residual = 0.0;
  bool structurally_independent = true;
};

/// Max over seeded random dichotomic tuples of |tau(prod A) - prod tau(A)|.
FactorizationResult factorization_check(const NetworkState& state, const NetworkTopology& topology,
                                        const PartySet& parties, int samples, std::uint64_t seed);

/// Same check with caller-supplied local observables, one per listed party.
double factorization_residual(const NetworkState& state, const std::vector<LocalFactor>& factors);

inline constexpr double kDefaultFaithfulThreshold = 1e-6;

struct Faithfulness {
  double min_eigenvalue = 0.0;
  bool faithful = false;
};

Faithfulness faithfulness(const NetworkState& state,
                          double threshold = kDefaultFaithfulThreshold);

}  // namespace qnet
