#pragma once

#include <cstdint>
#include <string>

#include "qkpz/errors.hpp"

namespace qkpz {

// Finite open chain, sites 1..L. Basis states are occupation bitstrings with
// site 1 as the least-significant bit: basis index b = sum_j n_j 2^(j-1).
// The descriptor caps L at 16 (classical/diagonal-sector work); dense
// operator construction is capped separately at L = 12 (dim 4096).
struct ChainDescriptor {
  static constexpr int kMaxLength = 16;
  static constexpr int kMaxDenseLength = 12;

  int length = 0;

  std::int64_t dim() const { return std::int64_t{1} << length; }
  int edge_count() const { return length - 1; }
};

ChainDescriptor build_chain(int length);

// Occupation pattern of the chain. String form reads left to right starting
// at site 1, e.g. "10" = site 1 occupied, site 2 empty (basis index 1).
struct OccupationConfig {
  int length = 0;
  std::uint32_t bits = 0;  // bit (j-1) = occupation of site j

  static OccupationConfig from_bits(int length, std::uint32_t bits);
  static OccupationConfig from_string(const std::string& pattern);

  bool occupied(int site) const { return (bits >> (site - 1)) & 1u; }
  std::uint32_t basis_index() const { return bits; }
  std::string to_string() const;
};

// Convenience initial profiles used by the experiments.
OccupationConfig alternating_config(int length);   // 1010...
OccupationConfig step_config(int length);          // first ceil(L/2) sites occupied

// Diagonal-sector helpers: eigenvalues of the diagonal observables on a basis
// bitstring, computed without materializing matrices. These must agree with
// the dense operators entry for entry (tested).
bool occupation_bit(std::uint32_t bits, int site);
double height_value(std::uint32_t bits, int k);                 // sum_{j<=k} (n_j - 1/2)
double height_exponential_value(std::uint32_t bits, int k, double delta);

// Cole-Hopf scalars: delta* = log(alpha/(1+alpha)) and the drift absorption
// mu = (sqrt(alpha+1) - sqrt(alpha))^2. Domain error for alpha <= 0.
double cole_hopf_delta(double alpha);
double drift_absorption_mu(double alpha);

// Lattice diffusion scale sqrt(alpha(alpha+1)) shared by the heat-equation
// form of the Cole-Hopf drift and the Bessel propagator.
double diffusion_scale(double alpha);

}  // namespace qkpz
