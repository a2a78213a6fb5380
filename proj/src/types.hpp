#pragma once

#include <optional>
#include <string>
#include <vector>

#include "indexing.hpp"

namespace fiberent {

inline constexpr double kProbTol = 1e-12;

struct Alphabet {
  int size = 2;
};

/// Probability distribution on A^{r+1}, indexed lexicographically by
/// (c_1,...,c_r,a). The central optimization variable.
class BlockLaw {
 public:
  BlockLaw(int alphabet, int r, std::vector<double> probs, double tol = kProbTol);

  int alphabet_size() const { return n_; }
  int memory() const { return r_; }
  std::int64_t num_contexts() const { return pow_int(n_, r_); }
  std::int64_t size() const { return static_cast<std::int64_t>(p_.size()); }

  double operator()(std::int64_t context, int symbol) const { return p_[context * n_ + symbol]; }
  double at(std::int64_t block) const { return p_[block]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  int n_;
  int r_;
  std::vector<double> p_;
};

/// Distribution over contexts A^r obtained by summing out the final symbol.
struct ContextMarginal {
  int alphabet = 2;
  int r = 1;
  std::vector<double> masses;
};

/// Rowwise conditional law p(a|c). Zero-mass contexts carry no row.
struct ConditionalKernel {
  int alphabet = 2;
  int r = 1;
  // rows[c] absent marks an inactive (zero-mass) context.
  std::vector<std::optional<std::vector<double>>> rows;

  bool active(std::int64_t context) const { return rows[context].has_value(); }
  const std::vector<double>& row(std::int64_t context) const { return *rows[context]; }
};

/// Coordinates of A^{r+1} allowed to be positive.
struct SupportFace {
  std::vector<char> mask;

  static SupportFace full(std::int64_t size) { return SupportFace{std::vector<char>(size, 1)}; }
  bool allows(std::int64_t block) const { return mask[block] != 0; }
  std::int64_t count() const;
};

struct StationarityCheck {
  bool consistent = false;
  double max_residual = 0.0;
};

ContextMarginal context_marginal(const BlockLaw& u);

// Per-context gap between left and right r-block marginals.
double stationarity_residual(const BlockLaw& u);
StationarityCheck is_stationary_consistent(const BlockLaw& u, double tol);

ConditionalKernel kernel_of(const BlockLaw& u);

// Inverse of kernel_of on positive-mass contexts. Throws "kernel incomplete"
// if a positive-mass context has no row.
BlockLaw block_law_of(const ContextMarginal& eta, const ConditionalKernel& p);

}  // namespace fiberent
