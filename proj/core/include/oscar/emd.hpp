#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oscar {

/// Points of a common dimension, stored row-major.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

struct TransportFlow {
  std::size_t source = 0;
  std::size_t sink = 0;
  double mass = 0.0;
};

struct TransportPlan {
  double cost = 0.0;
  std::vector<TransportFlow> flows;
};

/// Exact minimum-cost transportation between `supply` and `demand` with a
/// row-major supply.size() x demand.size() cost matrix. Solved as a min-cost
/// flow by successive shortest augmenting paths with reduced costs.
/// Errors: negative masses, shape mismatch or totals differing by more than
/// 1e-9 (relative) -> invalid-argument.
TransportPlan solve_transport(std::span<const double> cost,
                              std::span<const double> supply,
                              std::span<const double> demand);

/// Earth mover's distance with ground cost 0.5 * |x - y|^2.
double emd(const PointSet& points_a, std::span<const double> weights_a,
           const PointSet& points_b, std::span<const double> weights_b);

}  // namespace oscar
