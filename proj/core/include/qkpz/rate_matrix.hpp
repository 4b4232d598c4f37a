#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qkpz/errors.hpp"

namespace qkpz {

// Sparse Markov generator on basis configurations, column convention:
// entry (to, from) is the rate of from -> to, diagonal = -(column outflow),
// so columns sum to zero and dp/dt = G p.
//
// Off-diagonals are kept in insertion order and the diagonal accumulates in
// that same order; two generators built with identical insertion sequences
// compare bitwise equal.
class RateMatrix {
 public:
  explicit RateMatrix(std::int64_t dim)
      : dim_(dim), columns_(static_cast<std::size_t>(dim)), diagonal_(static_cast<std::size_t>(dim), 0.0) {
    if (dim < 1) throw SizeError("RateMatrix: dim must be positive");
  }

  std::int64_t dim() const { return dim_; }

  void add_rate(std::int64_t from, std::int64_t to, double rate) {
    if (from < 0 || from >= dim_ || to < 0 || to >= dim_ || from == to)
      throw IndexError("RateMatrix::add_rate: bad transition");
    if (rate < 0.0) throw DomainError("RateMatrix::add_rate: negative rate");
    if (rate == 0.0) return;
    columns_[static_cast<std::size_t>(from)].emplace_back(to, rate);
    diagonal_[static_cast<std::size_t>(from)] -= rate;
  }

  double diagonal_entry(std::int64_t state) const { return diagonal_[static_cast<std::size_t>(state)]; }

  double entry(std::int64_t to, std::int64_t from) const {
    if (to == from) return diagonal_entry(from);
    double sum = 0.0;
    for (const auto& [row, rate] : columns_[static_cast<std::size_t>(from)])
      if (row == to) sum += rate;
    return sum;
  }

  const std::vector<std::pair<std::int64_t, double>>& column(std::int64_t from) const {
    return columns_[static_cast<std::size_t>(from)];
  }

  // out = G p
  void apply(const std::vector<double>& p, std::vector<double>& out) const;

  double max_exit_rate() const;

  bool operator==(const RateMatrix& other) const;

 private:
  std::int64_t dim_;
  std::vector<std::vector<std::pair<std::int64_t, double>>> columns_;
  std::vector<double> diagonal_;
};

}  // namespace qkpz
