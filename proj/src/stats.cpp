#include "dynkin/stats.hpp"

#include <algorithm>

namespace dynkin {

void Moments::merge(const Moments& o) {
  if (o.n == 0.0) return;
  if (n == 0.0) {
    *this = o;
    return;
  }
  const double total = n + o.n;
  const double d = o.mean - mean;
  mean += d * (o.n / total);
  m2 += o.m2 + d * d * (n * o.n / total);
  n = total;
}

std::vector<Moments> mergeBlocks(std::vector<std::vector<Moments>>& blocks) {
  if (blocks.empty()) return {};
  // Pairwise tree reduction in block order.
  for (std::size_t stride = 1; stride < blocks.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < blocks.size(); i += 2 * stride)
      for (std::size_t k = 0; k < blocks[i].size(); ++k) blocks[i][k].merge(blocks[i + stride][k]);
  return blocks.front();
}

double kolmogorovSurvival(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ksTwoSample(std::vector<double> a, std::vector<double> b) {
  KsResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  if (a.empty() || b.empty()) return res;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // Step past every copy of the smallest remaining value in both samples.
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  res.statistic = d;
  const double en = std::sqrt(na * nb / (na + nb));
  res.pValue = kolmogorovSurvival((en + 0.12 + 0.11 / en) * d);
  return res;
}

}  // namespace dynkin
