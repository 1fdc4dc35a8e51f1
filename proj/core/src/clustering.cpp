#include "crossflow/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crossflow {

Zone zone_of(double pos, const Params& p) {
  if (pos >= p.staging_begin() && pos < p.staging_end()) return Zone::staging;
  if (pos >= p.staging_end() && pos < p.mid_end()) return Zone::mid;
  if (pos >= p.mid_end() && pos < 0.0) return Zone::exit;
  if (pos >= 0.0 && pos < p.crossing_end()) return Zone::intersection;
  return Zone::past;
}

std::vector<std::vector<std::size_t>> kmeans_1d(const std::vector<double>& positions, int m) {
  const std::size_t n = positions.size();
  if (n == 0) throw std::invalid_argument("kmeans_1d: empty input");
  if (m < 1 || static_cast<std::size_t>(m) > n) {
    throw std::invalid_argument("kmeans_1d: cluster count out of range");
  }

  // Sort front first (largest position first); optimal 1-D clusters are
  // contiguous in this order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return positions[a] > positions[b]; });

  std::vector<double> pre(n + 1, 0.0), pre2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = positions[order[i]];
    pre[i + 1] = pre[i] + x;
    pre2[i + 1] = pre2[i] + x * x;
  }
  // SSE of the contiguous block [a, b).
  auto block_sse = [&](std::size_t a, std::size_t b) {
    double cnt = double(b - a);
    double sum = pre[b] - pre[a];
    return (pre2[b] - pre2[a]) - sum * sum / cnt;
  };

  const std::size_t k = static_cast<std::size_t>(m);
  constexpr double inf = std::numeric_limits<double>::infinity();
  // dp[j][i]: best SSE splitting the first i points into j clusters.
  std::vector<std::vector<double>> dp(k + 1, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> cut(k + 1, std::vector<std::size_t>(n + 1, 0));
  dp[0][0] = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t i = j; i + (k - j) <= n; ++i) {
      for (std::size_t s = j - 1; s < i; ++s) {
        if (dp[j - 1][s] == inf) continue;
        double cand = dp[j - 1][s] + block_sse(s, i);
        if (cand < dp[j][i]) {
          dp[j][i] = cand;
          cut[j][i] = s;
        }
      }
    }
  }

  std::vector<std::vector<std::size_t>> groups(k);
  std::size_t end = n;
  for (std::size_t j = k; j >= 1; --j) {
    std::size_t start = cut[j][end];
    auto& g = groups[j - 1];
    for (std::size_t i = start; i < end; ++i) g.push_back(order[i]);
    end = start;
  }
  return groups;
}

namespace {

bool within_staging_or_mid(double pos, const Params& p) {
  Zone z = zone_of(pos, p);
  return z == Zone::staging || z == Zone::mid;
}

// Selection interval for clustering. Closed on the mid-zone side so that a
// vehicle spawned exactly at the staging/mid boundary is still picked up.
bool in_clustering_window(double pos, const Params& p) {
  return pos >= p.staging_begin() && pos <= p.staging_end();
}

}  // namespace

ClusterInstanceOutput cluster_and_select(const ClusterInstanceInput& in,
                                         const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                                         const std::unordered_map<int, Bubble>& bubbles,
                                         int& next_bubble_id, const Params& p) {
  ClusterInstanceOutput out;
  out.tau_min = in.prev_tau_min;

  std::unordered_map<int, const VehicleState*> by_id;
  for (const auto& branch : vehicles_by_branch) {
    for (const VehicleState& v : branch) by_id[v.id] = &v;
  }

  // Step 1: keep previously scheduled bubbles whose members are all still in
  // the staging or mid zones.
  std::vector<int> retained;
  std::vector<int> dropped;
  for (int id : in.prev_list) {
    auto it = bubbles.find(id);
    if (it == bubbles.end()) throw std::logic_error("cluster_and_select: unknown bubble in prev list");
    bool keep = true;
    for (int vid : it->second.members) {
      auto vit = by_id.find(vid);
      if (vit == by_id.end() || !within_staging_or_mid(vit->second->pos, p)) {
        keep = false;
        break;
      }
    }
    (keep ? retained : dropped).push_back(id);
  }

  // Per-branch k-means over unclustered staging-zone vehicles.
  int total_new = 0;
  std::vector<std::vector<Bubble>> new_per_branch(kNumBranches);
  for (int k = 0; k < kNumBranches; ++k) {
    std::vector<const VehicleState*> fresh;
    for (const VehicleState& v : vehicles_by_branch[k]) {
      if (!v.bubble_id && in_clustering_window(v.pos, p)) fresh.push_back(&v);
    }
    if (fresh.empty()) continue;
    int m = std::min<int>(static_cast<int>(fresh.size()), p.max_new_bubbles_branch);
    std::vector<double> pos(fresh.size());
    for (std::size_t i = 0; i < fresh.size(); ++i) pos[i] = fresh[i]->pos;
    auto groups = kmeans_1d(pos, m);
    for (auto& g : groups) {
      Bubble b;
      b.id = next_bubble_id++;
      b.branch = k + 1;
      // Groups come back front first within each cluster.
      for (std::size_t idx : g) b.members.push_back(fresh[idx]->id);
      b.lead_pos = fresh[g.front()]->pos;
      b.lead_vel = fresh[g.front()]->vel;
      new_per_branch[k].push_back(std::move(b));
      ++total_new;
    }
  }

  // Cap the schedule list, popping retained bubbles from the front (the ones
  // nearest their exit zones).
  int overflow = total_new + static_cast<int>(retained.size()) - p.max_bubbles;
  if (overflow > 0) {
    if (overflow > static_cast<int>(retained.size())) {
      throw std::logic_error(
          "cluster_and_select: new bubbles alone exceed max_bubbles "
          "(requires 4 * max_new_bubbles_branch <= max_bubbles)");
    }
    dropped.insert(dropped.end(), retained.begin(), retained.begin() + overflow);
    retained.erase(retained.begin(), retained.begin() + overflow);
  }

  out.list = retained;
  for (auto& per_branch : new_per_branch) {
    for (Bubble& b : per_branch) {
      out.list.push_back(b.id);
      out.new_bubbles.push_back(std::move(b));
    }
  }

  // tau_min bookkeeping: everything that left the list is guaranteed to have
  // crossed by its assigned time plus its occupancy bound.
  for (int id : dropped) {
    const Bubble& b = bubbles.at(id);
    if (!b.tau) {
      throw std::logic_error("cluster_and_select: bubble left the list without an assigned tau");
    }
    out.tau_min = std::max(out.tau_min, *b.tau + b.tau_occ_bar);
  }
  return out;
}

}  // namespace crossflow
