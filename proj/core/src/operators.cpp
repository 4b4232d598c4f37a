#include "qkpz/operators.hpp"

#include <cmath>

namespace qkpz {

namespace {

void require_site(const ChainDescriptor& chain, int site, const char* who) {
  if (site < 1 || site > chain.length)
    throw IndexError(std::string(who) + ": site index out of range");
}

void require_edge(const ChainDescriptor& chain, int edge, const char* who) {
  if (edge < 1 || edge > chain.length - 1)
    throw IndexError(std::string(who) + ": edge index out of range");
}

void require_dense(const ChainDescriptor& chain, const char* who) {
  if (chain.length > ChainDescriptor::kMaxDenseLength)
    throw SizeError(std::string(who) + ": dense operators capped at L = " +
                    std::to_string(ChainDescriptor::kMaxDenseLength));
}

}  // namespace

OperatorMatrix fermion_op(const ChainDescriptor& chain, int site) {
  require_site(chain, site, "fermion_op");
  require_dense(chain, "fermion_op");
  const auto dim = chain.dim();
  const std::uint32_t site_mask = 1u << (site - 1);
  const std::uint32_t string_mask = site_mask - 1u;  // sites < j
  Matrix m = Matrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const auto bits = static_cast<std::uint32_t>(b);
    if (!(bits & site_mask)) continue;  // site must be occupied
    const double sign = (__builtin_popcount(bits & string_mask) % 2 == 0) ? 1.0 : -1.0;
    m(b ^ site_mask, b) = sign;
  }
  OperatorMatrix op(std::move(m));
  op.set_hermitian(false);
  op.set_diagonal(false);
  return op;
}

OperatorMatrix hop_op(const ChainDescriptor& chain, int edge) {
  require_edge(chain, edge, "hop_op");
  require_dense(chain, "hop_op");
  const auto dim = chain.dim();
  const std::uint32_t lo = 1u << (edge - 1);  // site j
  const std::uint32_t hi = 1u << edge;        // site j+1
  // c_{j+1}^dag c_j = sigma^+_{j+1} sigma^-_j on adjacent sites: the JW
  // strings cancel and the amplitude is +1 on every allowed transition.
  Matrix m = Matrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const auto bits = static_cast<std::uint32_t>(b);
    if ((bits & lo) && !(bits & hi)) m(b ^ (lo | hi), b) = 1.0;
  }
  OperatorMatrix op(std::move(m));
  op.set_hermitian(false);
  op.set_diagonal(false);
  return op;
}

OperatorMatrix number_op(const ChainDescriptor& chain, int site) {
  require_site(chain, site, "number_op");
  require_dense(chain, "number_op");
  const auto dim = chain.dim();
  Eigen::VectorXd d(dim);
  for (std::int64_t b = 0; b < dim; ++b)
    d(b) = occupation_bit(static_cast<std::uint32_t>(b), site) ? 1.0 : 0.0;
  return OperatorMatrix::diagonal(d);
}

OperatorMatrix centered_number_op(const ChainDescriptor& chain, int site) {
  require_site(chain, site, "centered_number_op");
  require_dense(chain, "centered_number_op");
  const auto dim = chain.dim();
  Eigen::VectorXd d(dim);
  for (std::int64_t b = 0; b < dim; ++b)
    d(b) = (occupation_bit(static_cast<std::uint32_t>(b), site) ? 1.0 : 0.0) - 0.5;
  return OperatorMatrix::diagonal(d);
}

OperatorMatrix height_op(const ChainDescriptor& chain, int k) {
  require_site(chain, k, "height_op");
  require_dense(chain, "height_op");
  const auto dim = chain.dim();
  Eigen::VectorXd d(dim);
  for (std::int64_t b = 0; b < dim; ++b) d(b) = height_value(static_cast<std::uint32_t>(b), k);
  return OperatorMatrix::diagonal(d);
}

OperatorMatrix height_exponential_op(const ChainDescriptor& chain, int k, double delta) {
  require_dense(chain, "height_exponential_op");
  if (k == 0) return OperatorMatrix::identity(chain.dim());  // h_0 = 0 reference
  require_site(chain, k, "height_exponential_op");
  const auto dim = chain.dim();
  Eigen::VectorXd d(dim);
  for (std::int64_t b = 0; b < dim; ++b)
    d(b) = height_exponential_value(static_cast<std::uint32_t>(b), k, delta);
  return OperatorMatrix::diagonal(d);
}

OperatorMatrix cole_hopf_op(const ChainDescriptor& chain, int k, double alpha) {
  require_site(chain, k, "cole_hopf_op");
  return height_exponential_op(chain, k, cole_hopf_delta(alpha));
}

OperatorMatrix pointer_projector(const ChainDescriptor& chain, const OccupationConfig& config) {
  if (config.length != chain.length)
    throw ConfigError("pointer_projector: config length does not match chain");
  require_dense(chain, "pointer_projector");
  const auto dim = chain.dim();
  Matrix m = Matrix::Zero(dim, dim);
  m(config.basis_index(), config.basis_index()) = 1.0;
  OperatorMatrix op(std::move(m));
  op.set_hermitian(true);
  op.set_diagonal(true);
  return op;
}

DensityMatrix pointer_density(const ChainDescriptor& chain, const OccupationConfig& config) {
  return DensityMatrix(pointer_projector(chain, config).mat());
}

OperatorMatrix current_op(const ChainDescriptor& chain, int edge, double alpha) {
  require_edge(chain, edge, "current_op");
  require_dense(chain, "current_op");
  if (alpha < 0.0) throw DomainError("current_op: need alpha >= 0");
  const auto dim = chain.dim();
  Eigen::VectorXd d(dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const auto bits = static_cast<std::uint32_t>(b);
    const double nk = occupation_bit(bits, edge) ? 1.0 : 0.0;
    const double nk1 = occupation_bit(bits, edge + 1) ? 1.0 : 0.0;
    d(b) = nk1 * (1.0 - nk) + alpha * (nk1 - nk);
  }
  return OperatorMatrix::diagonal(d);
}

}  // namespace qkpz
