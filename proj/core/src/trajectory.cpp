#include "swarm/trajectory.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace swarm {

TrajectoryMatrix::TrajectoryMatrix(std::size_t steps, std::size_t agents, double dt)
    : steps_(steps), agents_(agents), dt_(dt), data_(steps * agents * 2, 0.0) {
  if (!(dt > 0.0)) throw std::invalid_argument("TrajectoryMatrix: dt must be positive");
}

TrajectoryMatrix TrajectoryMatrix::head(std::size_t n) const {
  if (n > steps_) throw std::out_of_range("TrajectoryMatrix::head: not enough rows");
  TrajectoryMatrix out(n, agents_, dt_);
  std::copy_n(data_.begin(), n * cols(), out.data_.begin());
  return out;
}

Kinematics derive_kinematics(const TrajectoryMatrix& p) {
  if (p.steps() < 3) {
    throw std::invalid_argument("derive_kinematics: need at least 3 time steps, got " +
                                std::to_string(p.steps()));
  }
  const std::size_t cols = p.cols();
  const double inv_dt = 1.0 / p.dt();
  Kinematics k{TrajectoryMatrix(p.steps() - 1, p.agents(), p.dt()),
               TrajectoryMatrix(p.steps() - 2, p.agents(), p.dt())};
  const auto& pd = p.data();
  auto& vd = k.velocity.data();
  for (std::size_t t = 0; t + 1 < p.steps(); ++t) {
    for (std::size_t c = 0; c < cols; ++c) {
      vd[t * cols + c] = (pd[(t + 1) * cols + c] - pd[t * cols + c]) * inv_dt;
    }
  }
  auto& ad = k.acceleration.data();
  for (std::size_t t = 0; t + 2 < p.steps(); ++t) {
    for (std::size_t c = 0; c < cols; ++c) {
      ad[t * cols + c] = (vd[(t + 1) * cols + c] - vd[t * cols + c]) * inv_dt;
    }
  }
  return k;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryMatrix& m) {
  out << "t,agent,x,y\n";
  out.precision(17);
  for (std::size_t t = 0; t < m.steps(); ++t) {
    for (std::size_t a = 0; a < m.agents(); ++a) {
      const Vec2 p = m.at(t, a);
      out << t << ',' << a << ',' << p.x << ',' << p.y << '\n';
    }
  }
}

}  // namespace swarm
