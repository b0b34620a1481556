#include "moocaug/slideseg/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace moocaug::slideseg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual capacities below this are treated as exhausted.
constexpr double kFlowEpsilon = 1e-15;

void check_histograms(std::span<const double> h1, std::span<const double> h2) {
  if (h1.size() != h2.size() || h1.empty()) {
    throw EmdError(EmdErrc::kLengthMismatch, "histogram lengths " + std::to_string(h1.size()) +
                                                 " and " + std::to_string(h2.size()));
  }
  for (const auto h : {h1, h2}) {
    double sum = 0;
    for (const double v : h) {
      if (!(v >= 0) || !std::isfinite(v)) throw EmdError(EmdErrc::kNotNormalized, "negative or non-finite bin");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
      throw EmdError(EmdErrc::kNotNormalized, "histogram mass " + std::to_string(sum));
    }
  }
}

// Dense residual network: source, n supply nodes, n demand nodes, sink.
class TransportNetwork {
 public:
  TransportNetwork(std::span<const double> supply, std::span<const double> demand,
                   const GroundDistance& cost)
      : n_(supply.size()),
        supply_(supply.begin(), supply.end()),
        demand_(demand.begin(), demand.end()),
        cost_(cost),
        from_source_(n_, 0.0),
        to_sink_(n_, 0.0),
        flow_(n_ * n_, 0.0) {}

  double solve() {
    const std::size_t nodes = 2 * n_ + 2;
    std::vector<double> potential(nodes, 0.0);
    std::vector<double> dist(nodes);
    std::vector<std::size_t> parent(nodes);
    std::vector<bool> done(nodes);

    for (;;) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), false);
      dist[source()] = 0;
      for (std::size_t iter = 0; iter < nodes; ++iter) {
        std::size_t u = nodes;
        for (std::size_t v = 0; v < nodes; ++v) {
          if (!done[v] && dist[v] < kInf && (u == nodes || dist[v] < dist[u])) u = v;
        }
        if (u == nodes) break;
        done[u] = true;
        for (std::size_t v = 0; v < nodes; ++v) {
          if (done[v] || residual(u, v) <= kFlowEpsilon) continue;
          const double reduced = std::max(0.0, arc_cost(u, v) + potential[u] - potential[v]);
          if (dist[u] + reduced < dist[v]) {
            dist[v] = dist[u] + reduced;
            parent[v] = u;
          }
        }
      }
      if (dist[sink()] == kInf) break;

      double push = kInf;
      for (std::size_t v = sink(); v != source(); v = parent[v]) push = std::min(push, residual(parent[v], v));
      for (std::size_t v = sink(); v != source(); v = parent[v]) augment(parent[v], v, push);

      double reached_max = 0;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (dist[v] < kInf) reached_max = std::max(reached_max, dist[v]);
      }
      for (std::size_t v = 0; v < nodes; ++v) potential[v] += dist[v] < kInf ? dist[v] : reached_max;
    }

    double total = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) total += flow_[i * n_ + j] * cost_[i][j];
    return total;
  }

 private:
  std::size_t source() const { return 0; }
  std::size_t sink() const { return 2 * n_ + 1; }
  bool is_supply(std::size_t v) const { return v >= 1 && v <= n_; }
  bool is_demand(std::size_t v) const { return v > n_ && v <= 2 * n_; }
  std::size_t supply_index(std::size_t v) const { return v - 1; }
  std::size_t demand_index(std::size_t v) const { return v - 1 - n_; }

  double residual(std::size_t u, std::size_t v) const {
    if (u == source() && is_supply(v)) return supply_[supply_index(v)] - from_source_[supply_index(v)];
    if (is_supply(u) && v == source()) return from_source_[supply_index(u)];
    if (is_supply(u) && is_demand(v)) return kInf;
    if (is_demand(u) && is_supply(v)) return flow_[supply_index(v) * n_ + demand_index(u)];
    if (is_demand(u) && v == sink()) return demand_[demand_index(u)] - to_sink_[demand_index(u)];
    if (u == sink() && is_demand(v)) return to_sink_[demand_index(v)];
    return 0;
  }

  double arc_cost(std::size_t u, std::size_t v) const {
    if (is_supply(u) && is_demand(v)) return cost_[supply_index(u)][demand_index(v)];
    if (is_demand(u) && is_supply(v)) return -cost_[supply_index(v)][demand_index(u)];
    return 0;
  }

  void augment(std::size_t u, std::size_t v, double amount) {
    if (u == source()) from_source_[supply_index(v)] += amount;
    else if (v == source()) from_source_[supply_index(u)] -= amount;
    else if (is_supply(u) && is_demand(v)) flow_[supply_index(u) * n_ + demand_index(v)] += amount;
    else if (is_demand(u) && is_supply(v)) flow_[supply_index(v) * n_ + demand_index(u)] -= amount;
    else if (v == sink()) to_sink_[demand_index(u)] += amount;
    else to_sink_[demand_index(v)] -= amount;
  }

  std::size_t n_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  const GroundDistance& cost_;
  std::vector<double> from_source_;
  std::vector<double> to_sink_;
  std::vector<double> flow_;
};

}  // namespace

double emd_1d(std::span<const double> h1, std::span<const double> h2) {
  check_histograms(h1, h2);
  double cdf_gap = 0;
  double total = 0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    cdf_gap += h1[i] - h2[i];
    total += std::abs(cdf_gap);
  }
  return total;
}

GroundDistance linear_ground_distance(std::size_t bins) {
  GroundDistance d(bins, std::vector<double>(bins));
  for (std::size_t i = 0; i < bins; ++i)
    for (std::size_t j = 0; j < bins; ++j) d[i][j] = std::abs(static_cast<double>(i) - static_cast<double>(j));
  return d;
}

double emd_transport(std::span<const double> h1, std::span<const double> h2,
                     const GroundDistance& distance) {
  check_histograms(h1, h2);
  if (distance.size() != h1.size()) {
    throw EmdError(EmdErrc::kNonSquareDistance, "ground distance has " + std::to_string(distance.size()) +
                                                    " rows for " + std::to_string(h1.size()) + " bins");
  }
  for (const auto& row : distance) {
    if (row.size() != distance.size()) throw EmdError(EmdErrc::kNonSquareDistance, "ground distance is not square");
    for (const double d : row) {
      if (!(d >= 0) || !std::isfinite(d)) throw EmdError(EmdErrc::kInvalidDistance, "negative or non-finite distance");
    }
  }
  return TransportNetwork(h1, h2, distance).solve();
}

}  // namespace moocaug::slideseg
