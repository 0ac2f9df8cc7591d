#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "panelcf/parallel.hpp"
#include "panelcf/rng.hpp"
#include "panelcf/types.hpp"

namespace panelcf {

inline double rmspe(const Vectord& gaps) {
  if (gaps.size() == 0) throw std::invalid_argument("rmspe: empty series");
  return std::sqrt(gaps.squaredNorm() / static_cast<double>(gaps.size()));
}

// Post/pre RMSPE ratio. A perfect pre-period fit leaves the ratio undefined;
// the error message still carries the post value.
inline double rmspe_ratio(const Vectord& gaps_pre, const Vectord& gaps_post) {
  double pre = rmspe(gaps_pre);
  double post = rmspe(gaps_post);
  if (pre == 0.0) {
    throw std::domain_error("perfect pre-fit; ratio undefined (rmspe_post = " +
                            std::to_string(post) + ")");
  }
  return post / pre;
}

struct BootstrapConfig {
  int replications = 1000;
  int block_length = 0;  // 0 selects ceil(sqrt(T2))
  std::uint64_t seed = 0;
  int workers = 1;
};

struct BootstrapResult {
  double se = 0;
  double ci_lower = 0, ci_upper = 0;  // empirical 2.5 / 97.5 percentiles
  double p_value = 0;                 // sharp-null sign test on replicates
  int block_length = 0;
  Vectord replicate_atts;
};

// Linear-interpolation empirical quantile of a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("quantile of empty sample");
  if (n == 1) return sorted[0];
  double h = p * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Circular moving-block bootstrap of the post-period gap series. Each
// replicate concatenates wrapped blocks of the configured length back to the
// original length and records its mean gap. Replicates draw from indexed
// substreams, so serial and parallel runs agree bit for bit.
inline BootstrapResult blocked_bootstrap(const Vectord& gaps_post,
                                         const BootstrapConfig& cfg) {
  const Index t2 = gaps_post.size();
  if (t2 < 2) throw std::invalid_argument("blocked_bootstrap: need post length >= 2");
  if (cfg.replications < 1) {
    throw std::invalid_argument("blocked_bootstrap: need at least one replication");
  }
  int block = cfg.block_length;
  if (block == 0) {
    block = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(t2))));
  }
  if (block < 1 || block > t2) {
    throw std::invalid_argument("blocked_bootstrap: block length " +
                                std::to_string(block) +
                                " outside [1, " + std::to_string(t2) + "]");
  }

  BootstrapResult result;
  result.block_length = block;
  result.replicate_atts.resize(cfg.replications);
  const Index n_blocks = (t2 + block - 1) / block;

  parallel_for(static_cast<std::size_t>(cfg.replications), cfg.workers,
               [&](std::size_t r) {
                 Rng rng = Rng::substream(cfg.seed, r);
                 double sum = 0;
                 Index filled = 0;
                 for (Index b = 0; b < n_blocks; ++b) {
                   Index start = static_cast<Index>(
                       rng.uniform_index(static_cast<std::uint64_t>(t2)));
                   for (int o = 0; o < block && filled < t2; ++o, ++filled) {
                     sum += gaps_post((start + o) % t2);
                   }
                 }
                 result.replicate_atts(static_cast<Index>(r)) =
                     sum / static_cast<double>(t2);
               });

  const Index reps = result.replicate_atts.size();
  double mean = result.replicate_atts.mean();
  if (reps > 1) {
    double ss = (result.replicate_atts.array() - mean).square().sum();
    result.se = std::sqrt(ss / static_cast<double>(reps - 1));
  }

  std::vector<double> sorted(result.replicate_atts.data(),
                             result.replicate_atts.data() + reps);
  std::sort(sorted.begin(), sorted.end());
  result.ci_lower = quantile_sorted(sorted, 0.025);
  result.ci_upper = quantile_sorted(sorted, 0.975);

  double n_ge = 0, n_le = 0;
  for (double a : sorted) {
    if (a >= 0.0) n_ge += 1;
    if (a <= 0.0) n_le += 1;
  }
  double frac_ge = n_ge / static_cast<double>(reps);
  double frac_le = n_le / static_cast<double>(reps);
  result.p_value = std::clamp(2.0 * std::min(frac_ge, frac_le), 0.0, 1.0);
  return result;
}

}  // namespace panelcf
