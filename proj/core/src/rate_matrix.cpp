#include "qkpz/rate_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qkpz {

void RateMatrix::apply(const std::vector<double>& p, std::vector<double>& out) const {
  if (static_cast<std::int64_t>(p.size()) != dim_ || static_cast<std::int64_t>(out.size()) != dim_)
    throw DimensionError("RateMatrix::apply: vector size mismatch");
  for (std::int64_t s = 0; s < dim_; ++s) out[static_cast<std::size_t>(s)] = diagonal_[static_cast<std::size_t>(s)] * p[static_cast<std::size_t>(s)];
  for (std::int64_t from = 0; from < dim_; ++from) {
    const double pf = p[static_cast<std::size_t>(from)];
    if (pf == 0.0) continue;
    for (const auto& [to, rate] : columns_[static_cast<std::size_t>(from)])
      out[static_cast<std::size_t>(to)] += rate * pf;
  }
}

double RateMatrix::max_exit_rate() const {
  double m = 0.0;
  for (double d : diagonal_) m = std::max(m, -d);
  return m;
}

bool RateMatrix::operator==(const RateMatrix& other) const {
  if (dim_ != other.dim_) return false;
  if (diagonal_ != other.diagonal_) return false;
  auto sorted = [](std::vector<std::pair<std::int64_t, double>> col) {
    std::sort(col.begin(), col.end());
    return col;
  };
  for (std::int64_t c = 0; c < dim_; ++c)
    if (sorted(columns_[static_cast<std::size_t>(c)]) != sorted(other.columns_[static_cast<std::size_t>(c)]))
      return false;
  return true;
}

}  // namespace qkpz
