#pragma once

#include <cstdint>
#include <random>

#include "qnet/algebra.hpp"

namespace qnet {

using Rng = std::mt19937_64;

/// Standard-normal theta with the given signature.
ObservableParams random_params(int dim, int n_plus, Rng& rng);
/// Random dichotomic observable with balanced signature.
Matrix random_dichotomic(int dim, Rng& rng);
/// Random dichotomic observable with a uniformly drawn signature.
Matrix random_dichotomic_any_signature(int dim, Rng& rng);
Matrix random_unitary(int dim, Rng& rng);
/// Ginibre-distributed density matrix of the given rank.
Matrix random_density(int dim, int rank, Rng& rng);

}  // namespace qnet
