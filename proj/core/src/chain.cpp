#include "qkpz/chain.hpp"

#include <cmath>

namespace qkpz {

ChainDescriptor build_chain(int length) {
  if (length < 2) throw SizeError("build_chain: need L >= 2 (at least one edge)");
  if (length > ChainDescriptor::kMaxLength)
    throw SizeError("build_chain: L exceeds chain cap " + std::to_string(ChainDescriptor::kMaxLength));
  return ChainDescriptor{length};
}

OccupationConfig OccupationConfig::from_bits(int length, std::uint32_t bits) {
  if (length < 1 || length > ChainDescriptor::kMaxLength)
    throw ConfigError("OccupationConfig: bad length");
  if (length < 32 && (bits >> length) != 0)
    throw ConfigError("OccupationConfig: bits outside chain length");
  return OccupationConfig{length, bits};
}

OccupationConfig OccupationConfig::from_string(const std::string& pattern) {
  if (pattern.empty() || pattern.size() > ChainDescriptor::kMaxLength)
    throw ConfigError("OccupationConfig: bad pattern length");
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '1')
      bits |= (1u << i);
    else if (pattern[i] != '0')
      throw ConfigError("OccupationConfig: pattern must be 0/1");
  }
  return OccupationConfig{static_cast<int>(pattern.size()), bits};
}

std::string OccupationConfig::to_string() const {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int j = 1; j <= length; ++j)
    if (occupied(j)) s[static_cast<std::size_t>(j - 1)] = '1';
  return s;
}

OccupationConfig alternating_config(int length) {
  std::uint32_t bits = 0;
  for (int j = 1; j <= length; j += 2) bits |= (1u << (j - 1));
  return OccupationConfig::from_bits(length, bits);
}

OccupationConfig step_config(int length) {
  const int filled = (length + 1) / 2;
  std::uint32_t bits = (filled >= 32) ? ~0u : ((1u << filled) - 1u);
  return OccupationConfig::from_bits(length, bits);
}

bool occupation_bit(std::uint32_t bits, int site) { return (bits >> (site - 1)) & 1u; }

double height_value(std::uint32_t bits, int k) {
  const std::uint32_t mask = (k >= 32) ? ~0u : ((1u << k) - 1u);
  const int occupied = __builtin_popcount(bits & mask);
  return occupied - 0.5 * k;
}

double height_exponential_value(std::uint32_t bits, int k, double delta) {
  return std::exp(delta * height_value(bits, k));
}

double cole_hopf_delta(double alpha) {
  if (alpha <= 0.0) throw DomainError("cole_hopf_delta: need alpha > 0 (log diverges at the pure-TASEP point)");
  return std::log(alpha / (1.0 + alpha));
}

double drift_absorption_mu(double alpha) {
  if (alpha <= 0.0) throw DomainError("drift_absorption_mu: need alpha > 0");
  const double d = std::sqrt(alpha + 1.0) - std::sqrt(alpha);
  return d * d;
}

double diffusion_scale(double alpha) {
  if (alpha <= 0.0) throw DomainError("diffusion_scale: need alpha > 0");
  return std::sqrt(alpha * (alpha + 1.0));
}

}  // namespace qkpz
