#include "dyadic/discrete_measure.hpp"

#include <cmath>
#include <string>

namespace dyadic {

double stable_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

DiscreteMeasure::DiscreteMeasure(PointSet atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (weights_.empty()) throw ArgumentError("discrete measure needs at least one atom");
  if (weights_.size() != atoms_.size()) throw ArgumentError("atom and weight counts differ");
  for (double c : atoms_.coords())
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("atom coordinate outside [0,1]");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("atom weights must be finite and >= 0");
  const double total = stable_sum(weights_);
  if (std::abs(total - 1.0) > 1e-12)
    throw ArgumentError("atom weights sum to " + std::to_string(total) + ", expected 1");
}

DiscreteMeasure DiscreteMeasure::empirical(const PointSet& points) {
  if (points.empty()) throw ArgumentError("empirical measure of an empty sample");
  const double w = 1.0 / static_cast<double>(points.size());
  return DiscreteMeasure(points, std::vector<double>(points.size(), w));
}

}  // namespace dyadic
