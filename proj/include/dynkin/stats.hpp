#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace dynkin {

// Count, mean and centred second moment; merged with Chan's update.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o);
  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double stderror() const { return n > 0.0 ? std::sqrt(variance() / n) : 0.0; }
};

// Paths are reduced in fixed blocks of this many, then the block moments are
// merged pairwise in block order, so results do not depend on the thread count.
inline constexpr std::size_t kPathBlock = 2048;

std::vector<Moments> mergeBlocks(std::vector<std::vector<Moments>>& blocks);

/// Runs fn(pathIndex, out) for every path, where out has `outputs` slots, and
/// returns per-slot moments. runPathsSerial is the reference for
/// runPathsParallel; both give bit-identical results.
template <class Fn>
std::vector<Moments> runPathsSerial(std::uint64_t nPaths, std::size_t outputs, Fn&& fn) {
  const std::size_t nBlocks = static_cast<std::size_t>((nPaths + kPathBlock - 1) / kPathBlock);
  std::vector<std::vector<Moments>> blocks(nBlocks, std::vector<Moments>(outputs));
  std::vector<double> out(outputs);
  for (std::size_t b = 0; b < nBlocks; ++b) {
    const std::uint64_t end = std::min<std::uint64_t>(nPaths, (b + 1) * kPathBlock);
    for (std::uint64_t p = b * kPathBlock; p < end; ++p) {
      fn(p, std::span<double>(out));
      for (std::size_t k = 0; k < outputs; ++k) blocks[b][k].add(out[k]);
    }
  }
  return mergeBlocks(blocks);
}

template <class Fn>
std::vector<Moments> runPathsParallel(std::uint64_t nPaths, std::size_t outputs, Fn&& fn) {
  const std::size_t nBlocks = static_cast<std::size_t>((nPaths + kPathBlock - 1) / kPathBlock);
  std::vector<std::vector<Moments>> blocks(nBlocks, std::vector<Moments>(outputs));
#pragma omp parallel
  {
    std::vector<double> out(outputs);
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(nBlocks); ++bi) {
      const auto b = static_cast<std::size_t>(bi);
      const std::uint64_t end = std::min<std::uint64_t>(nPaths, (b + 1) * kPathBlock);
      for (std::uint64_t p = b * kPathBlock; p < end; ++p) {
        fn(p, std::span<double>(out));
        for (std::size_t k = 0; k < outputs; ++k) blocks[b][k].add(out[k]);
      }
    }
  }
  return mergeBlocks(blocks);
}

struct KsResult {
  double statistic = 0.0;
  double pValue = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value. Ties and
// infinite values are allowed.
KsResult ksTwoSample(std::vector<double> a, std::vector<double> b);

// Q_KS(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorovSurvival(double t);

}  // namespace dynkin
