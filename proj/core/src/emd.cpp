#include "oscar/emd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    fail(ErrorCode::kInvalidArgument, "point coordinates do not match dimension");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual network for min-cost flow. Arc i and i^1 are a forward/backward pair.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t add_arc(std::size_t from, std::size_t to, double capacity, double cost) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, capacity, cost});
    adjacency_[from].push_back(id);
    arcs_.push_back({from, 0.0, -cost});
    adjacency_[to].push_back(id + 1);
    return id;
  }

  // Successive shortest paths with node potentials. Returns the flow sent.
  double run(std::size_t source, std::size_t sink, double wanted, double epsilon,
             std::span<const double> initial_potential) {
    const std::size_t n = adjacency_.size();
    std::vector<double> potential(initial_potential.begin(), initial_potential.end());
    std::vector<double> dist(n);
    std::vector<std::size_t> via(n);
    double sent = 0.0;
    using Item = std::pair<double, std::size_t>;

    while (wanted - sent > epsilon) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::vector<bool> done(n, false);
      std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
      dist[source] = 0.0;
      queue.emplace(0.0, source);
      while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (done[u]) continue;
        done[u] = true;
        for (std::size_t id : adjacency_[u]) {
          const Arc& a = arcs_[id];
          if (a.capacity <= epsilon || done[a.to]) continue;
          // Reduced costs are nonnegative up to rounding.
          const double reduced = std::max(0.0, a.cost + potential[u] - potential[a.to]);
          if (d + reduced < dist[a.to]) {
            dist[a.to] = d + reduced;
            via[a.to] = id;
            queue.emplace(dist[a.to], a.to);
          }
        }
      }
      if (dist[sink] == kInf) break;
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[v] < kInf) potential[v] += dist[v];
      }

      double push = wanted - sent;
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        push = std::min(push, arcs_[via[v]].capacity);
      }
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].capacity -= push;
        arcs_[via[v] ^ 1].capacity += push;
      }
      sent += push;
    }
    return sent;
  }

  // Flow on a forward arc equals the residual capacity of its reverse arc.
  double flow(std::size_t arc_id) const { return arcs_[arc_id + 1].capacity; }

 private:
  struct Arc {
    std::size_t to;
    double capacity;
    double cost;
  };
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

double checked_total(std::span<const double> masses, const char* what) {
  double total = 0.0;
  for (double w : masses) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorCode::kInvalidArgument, std::string(what) + " masses must be finite and nonnegative");
    }
    total += w;
  }
  return total;
}

}  // namespace

TransportPlan solve_transport(std::span<const double> cost, std::span<const double> supply,
                              std::span<const double> demand) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (n == 0 || m == 0) fail(ErrorCode::kInvalidArgument, "empty transport problem");
  if (cost.size() != n * m) fail(ErrorCode::kInvalidArgument, "cost matrix has the wrong shape");
  for (double c : cost) {
    if (!std::isfinite(c)) fail(ErrorCode::kInvalidArgument, "non-finite transport cost");
  }
  const double total_supply = checked_total(supply, "supply");
  const double total_demand = checked_total(demand, "demand");
  const double scale = std::max({1.0, total_supply, total_demand});
  if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
    fail(ErrorCode::kInvalidArgument, "unbalanced masses: " + std::to_string(total_supply) +
                                          " vs " + std::to_string(total_demand));
  }
  TransportPlan plan;
  if (total_supply == 0.0) return plan;

  // Demand is rescaled onto the supply total so both sides balance exactly.
  const double demand_scale = total_supply / total_demand;
  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;
  FlowNetwork network(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) network.add_arc(source, 1 + i, supply[i], 0.0);
  std::vector<std::size_t> arc_ids(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      arc_ids[i * m + j] = network.add_arc(1 + i, 1 + n + j, kInf, cost[i * m + j]);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    network.add_arc(1 + n + j, sink, demand[j] * demand_scale, 0.0);
  }

  // Exact shortest distances in the initial (acyclic) network.
  std::vector<double> potential(n + m + 2, 0.0);
  double sink_potential = kInf;
  for (std::size_t j = 0; j < m; ++j) {
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost[i * m + j]);
    potential[1 + n + j] = best;
    sink_potential = std::min(sink_potential, best);
  }
  potential[sink] = sink_potential;

  const double epsilon = 1e-14 * total_supply;
  network.run(source, sink, total_supply, epsilon, potential);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double f = network.flow(arc_ids[i * m + j]);
      if (f > 0.0) {
        plan.flows.push_back({i, j, f});
        plan.cost += f * cost[i * m + j];
      }
    }
  }
  return plan;
}

double emd(const PointSet& points_a, std::span<const double> weights_a,
           const PointSet& points_b, std::span<const double> weights_b) {
  if (points_a.dim() != points_b.dim()) {
    fail(ErrorCode::kInvalidArgument, "point sets have different dimensions");
  }
  if (points_a.size() != weights_a.size() || points_b.size() != weights_b.size()) {
    fail(ErrorCode::kInvalidArgument, "one weight per point is required");
  }
  const std::size_t n = points_a.size();
  const std::size_t m = points_b.size();
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = points_a.point(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto y = points_b.point(j);
      double sq = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) sq += (x[d] - y[d]) * (x[d] - y[d]);
      cost[i * m + j] = 0.5 * sq;
    }
  }
  return solve_transport(cost, weights_a, weights_b).cost;
}

}  // namespace oscar
