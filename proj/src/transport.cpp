#include "dyadic/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

struct BasicCell {
  std::size_t i;
  std::size_t j;
  double x;
};

class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand, std::span<const double> cost)
      : m_(supply.size()), n_(demand.size()), cost_(cost), basic_flag_(m_ * n_, 0), adj_(m_ + n_),
        parent_node_(m_ + n_), parent_slot_(m_ + n_), depth_(m_ + n_), pot_(m_ + n_) {
    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    eps_ = 1e-12 * std::max(1.0, cmax);
    north_west(supply, demand);
  }

  TransportResult run() {
    const std::size_t cells = m_ * n_;
    const std::size_t block = std::max<std::size_t>(
        16, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cells)))));
    const std::size_t max_pivots = std::max<std::size_t>(1'000'000, 50 * cells);
    const std::size_t degenerate_limit = m_ + n_;
    std::size_t start = 0, degenerate_run = 0, pivots = 0;
    bool bland = false;

    rebuild_tree();
    for (;;) {
      std::size_t entering = cells;
      if (bland) {
        for (std::size_t c = 0; c < cells; ++c)
          if (!basic_flag_[c] && reduced(c) < -eps_) {
            entering = c;
            break;
          }
      } else {
        entering = block_search(start, block);
      }
      if (entering == cells) break;
      if (++pivots > max_pivots) throw NumericalError("transportation simplex exceeded its pivot limit");
      const double theta = pivot(entering);
      if (theta > 0.0) {
        degenerate_run = 0;
        bland = false;
      } else if (++degenerate_run >= degenerate_limit) {
        bland = true;
      }
    }

    TransportResult out;
    out.pivots = pivots;
    std::vector<double> terms;
    for (const auto& b : basis_) {
      if (b.x <= 0.0) continue;
      out.plan.push_back({b.i, b.j, b.x});
      terms.push_back(b.x * cost_[b.i * n_ + b.j]);
    }
    std::sort(out.plan.begin(), out.plan.end(),
              [](const TransportFlow& a, const TransportFlow& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    out.cost = stable_sum(terms);
    return out;
  }

 private:
  double reduced(std::size_t c) const { return cost_[c] - pot_[c / n_] - pot_[m_ + c % n_]; }

  // Scans whole blocks cyclically from `start`; returns the most negative
  // reduced cost of the first block that has one (lowest index on ties).
  std::size_t block_search(std::size_t& start, std::size_t block) const {
    const std::size_t cells = m_ * n_;
    std::size_t best = cells, scanned = 0, c = start;
    std::size_t i = c / n_, j = c % n_;
    double best_rc = -eps_;
    while (scanned < cells) {
      const std::size_t stop = std::min(cells, scanned + block);
      for (; scanned < stop; ++scanned) {
        if (!basic_flag_[c]) {
          const double rc = cost_[c] - pot_[i] - pot_[m_ + j];
          if (rc < best_rc || (rc == best_rc && best != cells && c < best)) {
            best_rc = rc;
            best = c;
          }
        }
        ++c;
        if (++j == n_) {
          j = 0;
          if (++i == m_) i = c = 0;
        }
      }
      if (best != cells) {
        start = c;
        return best;
      }
    }
    return cells;
  }

  void add_basic(std::size_t i, std::size_t j, double x) {
    const int slot = static_cast<int>(basis_.size());
    basis_.push_back({i, j, x});
    basic_flag_[i * n_ + j] = 1;
    adj_[i].push_back(slot);
    adj_[m_ + j].push_back(slot);
  }

  void north_west(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> a(supply.begin(), supply.end()), b(demand.begin(), demand.end());
    std::size_t i = 0, j = 0;
    basis_.reserve(m_ + n_ - 1);
    for (;;) {
      const bool last = (i == m_ - 1 && j == n_ - 1);
      const double x = last ? std::max(0.0, std::max(a[i], b[j])) : std::max(0.0, std::min(a[i], b[j]));
      add_basic(i, j, x);
      if (last) break;
      a[i] -= x;
      b[j] -= x;
      // Move down when the row is used up (or at the last column), else right.
      if ((a[i] <= b[j] && i < m_ - 1) || j == n_ - 1) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void rebuild_tree() {
    const std::size_t N = m_ + n_;
    std::fill(depth_.begin(), depth_.end(), -1);
    queue_.clear();
    queue_.push_back(0);
    depth_[0] = 0;
    pot_[0] = 0.0;
    parent_node_[0] = -1;
    parent_slot_[0] = -1;
    for (std::size_t h = 0; h < queue_.size(); ++h) {
      const int u = queue_[h];
      for (int slot : adj_[u]) {
        const auto& b = basis_[slot];
        const int row = static_cast<int>(b.i), col = static_cast<int>(m_ + b.j);
        const int w = (u == row) ? col : row;
        if (depth_[w] >= 0) continue;
        depth_[w] = depth_[u] + 1;
        parent_node_[w] = u;
        parent_slot_[w] = slot;
        pot_[w] = cost_[b.i * n_ + b.j] - pot_[u];
        queue_.push_back(w);
      }
    }
    if (queue_.size() != N) throw NumericalError("transportation basis is not a spanning tree");
  }

  double pivot(std::size_t entering) {
    const std::size_t ei = entering / n_, ej = entering % n_;
    // Paths from each endpoint up to their common ancestor.
    path_r_.clear();
    path_s_.clear();
    int r = static_cast<int>(ei), s = static_cast<int>(m_ + ej);
    while (r != s) {
      if (depth_[r] >= depth_[s]) {
        path_r_.push_back(parent_slot_[r]);
        r = parent_node_[r];
      } else {
        path_s_.push_back(parent_slot_[s]);
        s = parent_node_[s];
      }
    }
    // The cycle has odd length, so arcs at even positions from either endpoint lose mass.
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    std::size_t leaving_cell = m_ * n_;
    auto consider = [&](int slot) {
      const auto& b = basis_[slot];
      const std::size_t cell = b.i * n_ + b.j;
      if (b.x < theta || (b.x == theta && cell < leaving_cell)) {
        theta = b.x;
        leaving = slot;
        leaving_cell = cell;
      }
    };
    for (std::size_t t = 0; t < path_r_.size(); t += 2) consider(path_r_[t]);
    for (std::size_t t = 0; t < path_s_.size(); t += 2) consider(path_s_[t]);
    if (leaving < 0) throw NumericalError("transportation simplex found no leaving cell");
    theta = std::max(theta, 0.0);

    auto shift = [&](const std::vector<int>& path) {
      for (std::size_t t = 0; t < path.size(); ++t) {
        auto& b = basis_[path[t]];
        b.x = (t % 2 == 0) ? std::max(0.0, b.x - theta) : b.x + theta;
      }
    };
    shift(path_r_);
    shift(path_s_);

    // Replace the leaving cell by the entering one in place.
    auto& L = basis_[leaving];
    basic_flag_[L.i * n_ + L.j] = 0;
    detach(static_cast<int>(L.i), leaving);
    detach(static_cast<int>(m_ + L.j), leaving);
    const bool row_side = std::find(path_r_.begin(), path_r_.end(), leaving) != path_r_.end();
    L = {ei, ej, theta};
    basic_flag_[entering] = 1;
    adj_[ei].push_back(leaving);
    adj_[m_ + ej].push_back(leaving);
    // Only the part cut off by the leaving cell moves; hang it from the entering cell.
    const int inner = row_side ? static_cast<int>(ei) : static_cast<int>(m_ + ej);
    const int outer = row_side ? static_cast<int>(m_ + ej) : static_cast<int>(ei);
    rehang(inner, outer, leaving);
    return theta;
  }

  void rehang(int root, int parent, int slot) {
    queue_.clear();
    parent_node_[root] = parent;
    parent_slot_[root] = slot;
    depth_[root] = depth_[parent] + 1;
    pot_[root] = cost_[basis_[slot].i * n_ + basis_[slot].j] - pot_[parent];
    queue_.push_back(root);
    for (std::size_t h = 0; h < queue_.size(); ++h) {
      const int u = queue_[h];
      for (int s : adj_[u]) {
        if (s == parent_slot_[u]) continue;
        const auto& b = basis_[s];
        const int row = static_cast<int>(b.i), col = static_cast<int>(m_ + b.j);
        const int w = (u == row) ? col : row;
        depth_[w] = depth_[u] + 1;
        parent_node_[w] = u;
        parent_slot_[w] = s;
        pot_[w] = cost_[b.i * n_ + b.j] - pot_[u];
        queue_.push_back(w);
      }
    }
  }

  void detach(int node, int slot) {
    auto& list = adj_[node];
    auto it = std::find(list.begin(), list.end(), slot);
    *it = list.back();
    list.pop_back();
  }

  std::size_t m_, n_;
  std::span<const double> cost_;
  double eps_ = 0.0;
  std::vector<BasicCell> basis_;
  std::vector<std::uint8_t> basic_flag_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> parent_node_, parent_slot_, depth_;
  std::vector<double> pot_;
  std::vector<int> queue_, path_r_, path_s_;
};

}  // namespace

TransportResult solve_transport(std::span<const double> supply, std::span<const double> demand,
                                std::span<const double> cost) {
  if (supply.empty() || demand.empty()) throw ArgumentError("transport problem needs nonempty supply and demand");
  if (cost.size() != supply.size() * demand.size()) throw ArgumentError("cost matrix size mismatch");
  for (double a : supply)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ArgumentError("supply entries must be finite and >= 0");
  for (double b : demand)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError("demand entries must be finite and >= 0");
  for (double c : cost)
    if (!std::isfinite(c)) throw ArgumentError("cost entries must be finite");
  const double sa = stable_sum(supply), sb = stable_sum(demand);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, std::max(sa, sb)))
    throw ArgumentError("supply and demand totals differ");
  return TransportSimplex(supply, demand, cost).run();
}

double ground_cost(std::span<const double> x, std::span<const double> y, double v, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) s += (x[l] - y[l]) * (x[l] - y[l]);
    return v == 2.0 ? s : std::pow(s, v / 2.0);
  }
  double s = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) s += std::pow(std::abs(x[l] - y[l]), p);
  return v == p ? s : std::pow(s, v / p);
}

double ot_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double v, double p) {
  if (!(v >= 1.0) || !std::isfinite(v)) throw ArgumentError("Wasserstein order v must be >= 1");
  if (!(p >= 1.0)) throw ArgumentError("norm order p must be >= 1");
  if (mu.dim() != nu.dim()) throw ArgumentError("measures have different dimensions");
  if (mu.size() > kMaxTransportAtoms || nu.size() > kMaxTransportAtoms)
    throw CapacityError("discrete transport limited to " + std::to_string(kMaxTransportAtoms) +
                        " atoms per measure; coarsen the inputs (e.g. discretize at a lower depth)");
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = ground_cost(mu.atom(i), nu.atom(j), v, p);
  const auto res = solve_transport(mu.weights(), nu.weights(), cost);
  return std::pow(std::max(res.cost, 0.0), 1.0 / v);
}

}  // namespace dyadic
