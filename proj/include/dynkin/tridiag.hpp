#pragma once

#include <span>
#include <vector>

namespace dynkin {

/// Tridiagonal matrix with a cached LU factorization (Thomas recurrence).
/// Row i reads lower[i] * w[i-1] + diag[i] * w[i] + upper[i] * w[i+1];
/// lower[0] and upper[n-1] are ignored.
class Tridiagonal {
 public:
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  std::size_t size() const { return diag_.size(); }
  void solve(std::span<const double> rhs, std::span<double> out) const;
  void multiply(std::span<const double> w, std::span<double> out) const;

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& upper() const { return upper_; }

 private:
  std::vector<double> lower_, diag_, upper_;
  std::vector<double> pivot_;  // modified diagonal of U
  std::vector<double> mult_;   // multipliers of L
};

}  // namespace dynkin
