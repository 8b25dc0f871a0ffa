#pragma once

#include <cstdint>
#include <span>

#include "dyadic/histogram.hpp"
#include "dyadic/model.hpp"

namespace dyadic {

struct StreamConfig {
  std::uint64_t M = 1;  // conservative upper bound on the stream length
  int d = 1;
  double v = 1.0;
  double p = 1.0;
  PriorSpec prior = ZeroPrior{};
};

/// On-the-fly dyadic histogram. Only the finest grid (depth K_M from the
/// depth rule at n = M) is stored; coarser snapshots are aggregated on
/// demand, which is exact because dyadic cells nest.
///
/// Single writer: push() must not run concurrently with anything else;
/// current_estimate() may run concurrently with other readers.
class MultiResCounter {
 public:
  explicit MultiResCounter(StreamConfig config);

  /// Bins one point into the finest grid. Throws DomainError (state
  /// unchanged) for a point outside the domain.
  void push(std::span<const double> point);

  /// Histogram at depth min(ceil(log2 k_r), K_M) for the r points seen so
  /// far, with the prior resolved at that depth. Throws NumericalError when
  /// no point has been pushed.
  DyadicHistogram current_estimate() const;

  /// Depth the next current_estimate() would use.
  int current_depth() const;

  /// Number of allocated counters.
  std::uint64_t memory_footprint() const { return finest_.stored(); }

  std::uint64_t points_seen() const { return r_; }
  int finest_depth() const { return K_M_; }
  bool cap_exceeded() const { return r_ > config_.M; }
  const StreamConfig& config() const { return config_; }
  const CellCounts& finest_counts() const { return finest_; }

 private:
  StreamConfig config_;
  int K_M_;
  CellCounts finest_;
  std::uint64_t r_ = 0;
};

/// Upper bound 2^(d+1) M^(d/2v) on the counters kept when d < 2v.
double streaming_memory_bound(std::uint64_t M, int d, double v);

}  // namespace dyadic
