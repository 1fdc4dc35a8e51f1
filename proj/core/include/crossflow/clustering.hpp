#pragma once

#include <unordered_map>
#include <vector>

#include "crossflow/params.hpp"
#include "crossflow/types.hpp"

namespace crossflow {

enum class Zone { staging, mid, exit, intersection, past };

/// Zone containing a front position. Half-open intervals; a boundary point
/// belongs to the zone nearer the intersection.
Zone zone_of(double pos, const Params& p);

/// Optimal partition of positions into m contiguous clusters minimizing the
/// within-cluster sum of squared distances to cluster means. Returns index
/// groups ordered front-most cluster first (positions are negative, so the
/// front-most cluster holds the largest values). Exact dynamic program over
/// contiguous splits; deterministic. Throws std::invalid_argument when the
/// input is empty or m is out of range.
std::vector<std::vector<std::size_t>> kmeans_1d(const std::vector<double>& positions, int m);

struct ClusterInstanceInput {
  double t_s = 0.0;
  std::vector<int> prev_list;  // bubble ids scheduled last instance, in list order
  double prev_tau_min = 0.0;
};

struct ClusterInstanceOutput {
  std::vector<int> list;  // bubble ids to schedule this instance
  double tau_min = 0.0;
  std::vector<Bubble> new_bubbles;
};

/// One clustering/selection instance. Retains previously scheduled bubbles
/// whose members all remain in the staging and mid zones, forms new bubbles
/// from unclustered staging-zone vehicles per branch, enforces the
/// max_bubbles cap by dropping from the front of the retained list, and
/// advances tau_min past every bubble that left the list.
///
/// `vehicles_by_branch` holds the post-spawn snapshot, each branch front
/// first. New bubbles get ids starting at `next_bubble_id` (advanced);
/// member vehicles' bubble_id fields are assigned by the caller.
ClusterInstanceOutput cluster_and_select(const ClusterInstanceInput& in,
                                         const std::vector<std::vector<VehicleState>>& vehicles_by_branch,
                                         const std::unordered_map<int, Bubble>& bubbles,
                                         int& next_bubble_id, const Params& p);

}  // namespace crossflow
