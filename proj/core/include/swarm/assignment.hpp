#pragma once

#include "swarm/tactic.hpp"
#include "swarm/vec2.hpp"

#include <span>
#include <vector>

namespace swarm {

/// Index of the closest defender for every adversary; ties go to the lower index.
std::vector<int> nearest_defender(std::span<const Vec2> adversaries, std::span<const Vec2> defenders);

/// Rectangular minimum-cost assignment (Hungarian method with potentials).
///
/// `cost` is row-major `rows x cols`. Returns, per row, the matched column
/// when rows <= cols; otherwise, per row, the matched column or -1 for rows
/// left over once every column is used.
std::vector<int> min_cost_assignment(std::span<const double> cost, int rows, int cols);

/// Target defender for every adversary under `tactic`.
///
/// Greedy family: nearest defender. Auction family: one-to-one matching that
/// minimises total Euclidean distance over min(N_D, N_A) pairs; surplus
/// adversaries fall back to their nearest defender. Throws
/// std::invalid_argument when there are no defenders.
std::vector<int> assign_targets(std::span<const Vec2> adversaries, std::span<const Vec2> defenders,
                                Tactic tactic);

/// Sum of adversary-to-target distances, accumulated in adversary order.
/// Entries of -1 are skipped.
double assignment_cost(std::span<const Vec2> adversaries, std::span<const Vec2> defenders,
                       std::span<const int> targets);

}  // namespace swarm
