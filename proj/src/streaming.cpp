#include "dyadic/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

StreamConfig validated(StreamConfig c) {
  if (c.M < 1) throw ArgumentError("stream cap M must be >= 1");
  ModelConfig m;
  m.d = c.d;
  m.v = c.v;
  m.p = c.p;
  m.prior = c.prior;
  m.validate();
  return c;
}

}  // namespace

MultiResCounter::MultiResCounter(StreamConfig config)
    : config_(validated(std::move(config))),
      K_M_(auto_depth(config_.M, config_.d, config_.v).K),
      finest_([&] {
        if (static_cast<long long>(K_M_) * config_.d > 62) throw CapacityError("finest grid exceeds 2^62 cells");
        return CellCounts(std::uint64_t{1} << (K_M_ * config_.d));
      }()) {}

void MultiResCounter::push(std::span<const double> point) {
  if (static_cast<int>(point.size()) != config_.d) throw ArgumentError("point dimension mismatch");
  if (r_ == std::numeric_limits<std::uint64_t>::max() / 2) throw CapacityError("stream position overflow");
  const std::uint64_t flat = bin_flat(point, K_M_);  // throws before any state change
  finest_.add(flat);
  ++r_;
}

int MultiResCounter::current_depth() const {
  if (r_ == 0) return 0;
  return std::min(auto_depth(r_, config_.d, config_.v).K, K_M_);
}

DyadicHistogram MultiResCounter::current_estimate() const {
  if (r_ == 0) throw NumericalError("empty stream: push at least one point before querying");
  const int depth = current_depth();
  const std::uint64_t cells = std::uint64_t{1} << (depth * config_.d);
  // Prior is attached after aggregation so it is resolved for the queried depth.
  DyadicHistogram finest(config_.d, K_M_, finest_, Prior::constant(0.0));
  DyadicHistogram coarse = coarsen(finest, depth);
  CellCounts counts = coarse.counts();
  return DyadicHistogram(config_.d, depth, std::move(counts),
                         resolve_prior(config_.prior, r_, config_.d, config_.v, cells));
}

double streaming_memory_bound(std::uint64_t M, int d, double v) {
  return std::ldexp(std::pow(static_cast<double>(M), d / (2.0 * v)), d + 1);
}

}  // namespace dyadic
