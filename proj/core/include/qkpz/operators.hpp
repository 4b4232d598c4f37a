#pragma once

#include "qkpz/chain.hpp"
#include "qkpz/operator_matrix.hpp"

namespace qkpz {

// Jordan-Wigner fermion algebra on the chain basis (Z string on sites < j,
// lowering operator at site j). Dense construction requires
// L <= ChainDescriptor::kMaxDenseLength.

// Annihilation operator c_j. The creation operator is fermion_op(...).adjoint().
OperatorMatrix fermion_op(const ChainDescriptor& chain, int site);

// Nearest-neighbour hop c_{j+1}^dag c_j for edge j (JW strings cancel, so the
// operator is supported on sites j, j+1 only).
OperatorMatrix hop_op(const ChainDescriptor& chain, int edge);

OperatorMatrix number_op(const ChainDescriptor& chain, int site);           // n_j
OperatorMatrix centered_number_op(const ChainDescriptor& chain, int site);  // n_j - 1/2

// Height field h_k = sum_{j<=k} (n_j - 1/2), referenced to h_0 = 0 at the
// left boundary.
OperatorMatrix height_op(const ChainDescriptor& chain, int k);

// e^{delta h_k} for arbitrary delta (diagonal, positive).
OperatorMatrix height_exponential_op(const ChainDescriptor& chain, int k, double delta);

// Cole-Hopf operator Z_k = e^{delta* h_k} at delta* = log(alpha/(1+alpha)).
// The time shift e^{mu t} is a scalar applied by callers; the exposed scalars
// are cole_hopf_delta(alpha) and drift_absorption_mu(alpha) (chain.hpp).
OperatorMatrix cole_hopf_op(const ChainDescriptor& chain, int k, double alpha);

// Rank-1 diagonal projector onto the basis state of `config`, and the same
// matrix as a (trace-1) density matrix.
OperatorMatrix pointer_projector(const ChainDescriptor& chain, const OccupationConfig& config);
DensityMatrix pointer_density(const ChainDescriptor& chain, const OccupationConfig& config);

// Current through edge k: j_k = n_{k+1}(1 - n_k) + alpha (n_{k+1} - n_k).
OperatorMatrix current_op(const ChainDescriptor& chain, int edge, double alpha);

}  // namespace qkpz
