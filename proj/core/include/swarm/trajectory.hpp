#pragma once

#include "swarm/vec2.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace swarm {

/// Time-ordered 2D series for a group of agents: row t holds
/// (x_0, y_0, x_1, y_1, ...) at time t0 + t * dt.
///
/// Used for positions (P_D, P_A) and, with the same layout, for the
/// velocity and acceleration series derived from them.
class TrajectoryMatrix {
public:
  TrajectoryMatrix() = default;
  TrajectoryMatrix(std::size_t steps, std::size_t agents, double dt);

  std::size_t steps() const { return steps_; }
  std::size_t agents() const { return agents_; }
  std::size_t cols() const { return 2 * agents_; }
  double dt() const { return dt_; }

  Vec2 at(std::size_t t, std::size_t agent) const {
    const double* p = &data_[t * cols() + 2 * agent];
    return {p[0], p[1]};
  }
  void set(std::size_t t, std::size_t agent, Vec2 v) {
    double* p = &data_[t * cols() + 2 * agent];
    p[0] = v.x;
    p[1] = v.y;
  }

  std::span<const double> row(std::size_t t) const { return {data_.data() + t * cols(), cols()}; }
  std::span<double> row(std::size_t t) { return {data_.data() + t * cols(), cols()}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// First `n` rows.
  TrajectoryMatrix head(std::size_t n) const;

  bool operator==(const TrajectoryMatrix&) const = default;

private:
  std::size_t steps_ = 0;
  std::size_t agents_ = 0;
  double dt_ = 1.0;
  std::vector<double> data_;
};

struct Kinematics {
  TrajectoryMatrix velocity;      // N_t - 1 rows
  TrajectoryMatrix acceleration;  // N_t - 2 rows
};

/// Forward differences V(t) = (P(t+1) - P(t)) / dt and
/// A(t) = (V(t+1) - V(t)) / dt. Throws std::invalid_argument when N_t < 3.
Kinematics derive_kinematics(const TrajectoryMatrix& positions);

/// Long-format CSV with header `t,agent,x,y`.
void write_trajectory_csv(std::ostream& out, const TrajectoryMatrix& m);

}  // namespace swarm
