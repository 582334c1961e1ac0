#include "qnet/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "qnet/error.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {
constexpr double kEnsembleCutoff = 1e-14;

int product_of(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

Matrix product_of_locals(const std::vector<Matrix>& locals, const std::vector<int>& dims,
                         const std::string& what) {
  if (locals.size() != dims.size())
    throw Error(ErrorCode::BadDims, what + ": expected one local state per site");
  for (std::size_t k = 0; k < locals.size(); ++k) {
    if (locals[k].rows() != dims[k] || locals[k].cols() != dims[k])
      throw Error(ErrorCode::BadDims, what + ": local state " + std::to_string(k) +
                                          " does not match site dimension");
    check_density(locals[k], kStateTol, what + " local state " + std::to_string(k));
  }
  return kron_all(locals);
}
}  // namespace

const char* to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::MaximallyEntangled: return "maximally_entangled";
    case SourceKind::Singlet: return "singlet";
    case SourceKind::Product: return "product";
    case SourceKind::SeparableMixture: return "separable_mixture";
    case SourceKind::Werner: return "werner";
    case SourceKind::Explicit: return "explicit";
  }
  return "explicit";
}

void check_density(const Matrix& rho, double tol, const std::string& what) {
  if (rho.rows() != rho.cols()) throw Error(ErrorCode::NotAState, what + ": not square");
  if (!rho.allFinite()) throw Error(ErrorCode::NotAState, what + ": non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::NotAState, what + ": not Hermitian");
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > tol) throw Error(ErrorCode::NotAState, what + ": trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw Error(ErrorCode::NotAState, what + ": not positive semidefinite");
}

Matrix pure_density(const Vector& psi) { return psi * psi.adjoint(); }

Matrix maximally_entangled_density(int d) {
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) psi[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  return pure_density(psi);
}

Matrix singlet_density() {
  Vector psi = Vector::Zero(4);
  psi[1] = 1.0 / std::sqrt(2.0);
  psi[2] = -1.0 / std::sqrt(2.0);
  return pure_density(psi);
}

SourceState make_source_state(const std::string& name, SourceKind kind, const SourceParams& params,
                              const std::vector<int>& dims) {
  if (dims.size() < 2 || std::any_of(dims.begin(), dims.end(), [](int d) { return d < 2; }))
    throw Error(ErrorCode::BadDims, "source '" + name + "' needs >= 2 sites of dimension >= 2");
  const int total = product_of(dims);
  const bool qubit_pair = dims.size() == 2 && dims[0] == 2 && dims[1] == 2;
  const bool square_pair = dims.size() == 2 && dims[0] == dims[1];

  SourceState s{name, kind, dims, Matrix(), 1.0};
  switch (kind) {
    case SourceKind::Singlet:
      if (!qubit_pair)
        throw Error(ErrorCode::SingletNeedsQubits, "source '" + name + "' is not a qubit pair");
      s.rho = singlet_density();
      break;
    case SourceKind::MaximallyEntangled:
      if (!square_pair)
        throw Error(ErrorCode::BadDims,
                    "source '" + name + "': maximally entangled state needs two equal sites");
      s.rho = maximally_entangled_density(dims[0]);
      break;
    case SourceKind::Werner: {
      if (!square_pair)
        throw Error(ErrorCode::BadDims, "source '" + name + "': Werner state needs two equal sites");
      const double v = params.visibility;
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorCode::NotAState, "source '" + name + "': visibility outside [0, 1]");
      const Matrix pure = qubit_pair ? singlet_density() : maximally_entangled_density(dims[0]);
      s.rho = v * pure + (1.0 - v) * Matrix::Identity(total, total) / static_cast<double>(total);
      s.visibility = v;
      break;
    }
    case SourceKind::Product:
      s.rho = product_of_locals(params.locals, dims, "source '" + name + "'");
      break;
    case SourceKind::SeparableMixture: {
      if (params.components.empty())
        throw Error(ErrorCode::NotAState, "source '" + name + "': empty mixture");
      double total_weight = 0.0;
      s.rho = Matrix::Zero(total, total);
      for (const auto& c : params.components) {
        if (c.weight < 0.0)
          throw Error(ErrorCode::NotAState, "source '" + name + "': negative mixture weight");
        total_weight += c.weight;
        s.rho += c.weight * product_of_locals(c.locals, dims, "source '" + name + "'");
      }
      if (std::abs(total_weight - 1.0) > kStateTol)
        throw Error(ErrorCode::NotAState, "source '" + name + "': mixture weights do not sum to 1");
      break;
    }
    case SourceKind::Explicit:
      if (params.matrix.rows() != total || params.matrix.cols() != total)
        throw Error(ErrorCode::BadDims,
                    "source '" + name + "': explicit matrix does not match site dimensions");
      s.rho = params.matrix;
      break;
  }
  check_density(s.rho, kStateTol, "source '" + name + "'");
  return s;
}

namespace {

std::vector<EnsembleMember> spectral_ensemble(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  std::vector<EnsembleMember> out;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double w = es.eigenvalues()(k);
    if (w < kEnsembleCutoff) continue;
    out.push_back({w, es.eigenvectors().col(k)});
  }
  return out;
}

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

}  // namespace

NetworkState assemble_network_state(std::vector<SourceState> sources,
                                    std::shared_ptr<const SubsystemLayout> layout) {
  if (static_cast<int>(sources.size()) != layout->source_count())
    throw Error(ErrorCode::MissingSource, "expected " + std::to_string(layout->source_count()) +
                                              " source states, got " +
                                              std::to_string(sources.size()));
  for (int k = 0; k < layout->source_count(); ++k) {
    const auto& sites = layout->source_sites(k);
    bool ok = sources[k].dims.size() == sites.size();
    for (std::size_t j = 0; ok && j < sites.size(); ++j)
      ok = sources[k].dims[j] == layout->sites()[sites[j]].dim;
    if (!ok)
      throw Error(ErrorCode::BadDims,
                  "source state '" + sources[k].name + "' does not match the layout's sites");
  }

  NetworkState state;
  state.layout_ = std::move(layout);
  std::vector<EnsembleMember> ensemble{{1.0, Vector::Ones(1)}};
  for (const auto& src : sources) {
    const auto local = spectral_ensemble(src.rho);
    std::vector<EnsembleMember> next;
    next.reserve(ensemble.size() * local.size());
    for (const auto& a : ensemble)
      for (const auto& b : local) {
        const double w = a.weight * b.weight;
        if (w < kEnsembleCutoff) continue;
        next.push_back({w, kron_vec(a.psi, b.psi)});
      }
    ensemble = std::move(next);
  }
  state.sources_ = std::move(sources);
  state.ensemble_ = std::move(ensemble);
  return state;
}

NetworkState NetworkState::from_global_density(std::shared_ptr<const SubsystemLayout> layout,
                                               const Matrix& rho) {
  const auto D = static_cast<Eigen::Index>(layout->global_dim());
  if (rho.rows() != D || rho.cols() != D)
    throw Error(ErrorCode::BadDims, "global density does not match layout dimension");
  check_density(rho, 1e-10, "global state");
  NetworkState state;
  state.layout_ = std::move(layout);
  state.global_rho_ = rho;
  state.ensemble_ = spectral_ensemble(rho);
  return state;
}

Matrix NetworkState::density() const {
  if (layout_->global_dim() > kDenseCap)
    throw Error(ErrorCode::DimensionMismatch, "dense global state above cap");
  if (global_rho_) return *global_rho_;
  std::vector<Matrix> rhos;
  for (const auto& s : sources_) rhos.push_back(s.rho);
  return kron_all(rhos);
}

Complex expectation_complex(const NetworkState& state, const std::vector<LocalFactor>& factors) {
  const auto& layout = state.layout();
  std::vector<bool> used(layout.party_count(), false);
  for (const auto& f : factors) {
    if (f.party < 0 || f.party >= layout.party_count())
      throw Error(ErrorCode::LayoutMismatch, "factor party outside layout");
    if (used[f.party])
      throw Error(ErrorCode::NonCommutingFactors, "two factors act on the same party");
    used[f.party] = true;
  }
  Complex total = 0.0;
  Vector work, tmp;
  for (const auto& member : state.ensemble()) {
    work = member.psi;
    for (const auto& f : factors) {
      layout.apply(f.party, f.op, work, tmp);
      work.swap(tmp);
    }
    total += member.weight * member.psi.dot(work);
  }
  return total;
}

double expectation(const NetworkState& state, const std::vector<LocalFactor>& factors) {
  const Complex value = expectation_complex(state, factors);
  if (std::abs(value.imag()) > 1e-9)
    throw Error(ErrorCode::ValidationError,
                "expectation has imaginary part " + std::to_string(value.imag()));
  return value.real();
}

double expectation(const NetworkState& state, const std::vector<EmbeddedOperator>& factors) {
  std::vector<LocalFactor> local;
  local.reserve(factors.size());
  for (const auto& f : factors) {
    if (f.layout_ptr().get() != state.layout_ptr().get())
      throw Error(ErrorCode::LayoutMismatch, "factor embedded in a different layout");
    local.push_back({f.party(), f.local()});
  }
  return expectation(state, local);
}

double factorization_residual(const NetworkState& state, const std::vector<LocalFactor>& factors) {
  double product = 1.0;
  for (const auto& f : factors) product *= expectation(state, std::vector<LocalFactor>{f});
  return std::abs(expectation(state, factors) - product);
}

FactorizationResult factorization_check(const NetworkState& state, const NetworkTopology& topology,
                                        const PartySet& parties, int samples, std::uint64_t seed) {
  FactorizationResult out;
  out.structurally_independent = is_independent_set(topology, parties);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<LocalFactor> factors;
    for (int p : parties)
      factors.push_back(
          {p, random_dichotomic(static_cast<int>(state.layout().local_dim(p)), rng)});
    out.max_residual = std::max(out.max_residual, factorization_residual(state, factors));
  }
  return out;
}

Faithfulness faithfulness(const NetworkState& state, double threshold) {
  Faithfulness f;
  if (state.is_product()) {
    double product = 1.0;
    for (const auto& s : state.sources()) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(s.rho, Eigen::EigenvaluesOnly);
      product *= std::max(0.0, es.eigenvalues().minCoeff());
    }
    f.min_eigenvalue = product;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.density(), Eigen::EigenvaluesOnly);
    f.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  f.faithful = f.min_eigenvalue >= threshold;
  return f;
}

}  // namespace qnet
