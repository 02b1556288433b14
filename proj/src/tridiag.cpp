#include "dynkin/tridiag.hpp"

#include <cmath>

#include "dynkin/model.hpp"

namespace dynkin {

Tridiagonal::Tridiagonal(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  const std::size_t n = diag_.size();
  if (n == 0 || lower_.size() != n || upper_.size() != n)
    throw Error("tridiagonal bands must have equal, non-zero length");
  pivot_.resize(n);
  mult_.assign(n, 0.0);
  pivot_[0] = diag_[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (pivot_[i - 1] == 0.0 || !std::isfinite(pivot_[i - 1]))
      throw Error("singular tridiagonal system");
    mult_[i] = lower_[i] / pivot_[i - 1];
    pivot_[i] = diag_[i] - mult_[i] * upper_[i - 1];
  }
  if (pivot_[n - 1] == 0.0 || !std::isfinite(pivot_[n - 1]))
    throw Error("singular tridiagonal system");
}

void Tridiagonal::solve(std::span<const double> rhs, std::span<double> out) const {
  const std::size_t n = diag_.size();
  out[0] = rhs[0];
  for (std::size_t i = 1; i < n; ++i) out[i] = rhs[i] - mult_[i] * out[i - 1];
  out[n - 1] /= pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) out[i] = (out[i] - upper_[i] * out[i + 1]) / pivot_[i];
}

void Tridiagonal::multiply(std::span<const double> w, std::span<double> out) const {
  const std::size_t n = diag_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag_[i] * w[i];
    if (i > 0) s += lower_[i] * w[i - 1];
    if (i + 1 < n) s += upper_[i] * w[i + 1];
    out[i] = s;
  }
}

}  // namespace dynkin
