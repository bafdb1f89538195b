#include "swarm/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace swarm {

OperationalArea::OperationalArea(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("OperationalArea: need at least 3 vertices, got " + std::to_string(n));
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n];
    const Vec2 c = vertices_[(i + 2) % n];
    const Vec2 e1 = b - a;
    const Vec2 e2 = c - b;
    if (norm(e1) == 0.0) throw std::invalid_argument("OperationalArea: repeated vertex " + std::to_string(i));
    const double turn = cross(e1, e2);
    if (!(turn > 0.0)) {
      throw std::invalid_argument("OperationalArea: vertex " + std::to_string((i + 1) % n) +
                                  " is not a strict counterclockwise turn");
    }
    turning += std::atan2(turn, dot(e1, e2));
  }
  if (std::abs(turning - 2.0 * kPi) > 1e-6) throw std::invalid_argument("OperationalArea: polygon winds more than once");
  if (!(area() > 0.0)) throw std::invalid_argument("OperationalArea: zero area");

  normals_.resize(n);
  offsets_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = vertices_[k];
    const Vec2 e = vertices_[(k + 1) % n] - a;
    const Vec2 nrm = (1.0 / norm(e)) * Vec2{e.y, -e.x};
    normals_[k] = nrm;
    offsets_[k] = dot(nrm, a);
  }
}

OperationalArea OperationalArea::box(Vec2 lo, Vec2 hi) {
  return OperationalArea({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

double OperationalArea::violation(Vec2 p) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < normals_.size(); ++k) worst = std::max(worst, edge_distance(p, k));
  return worst;
}

double OperationalArea::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) twice += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  return 0.5 * twice;
}

double OperationalArea::length_scale() const { return std::sqrt(area()); }

}  // namespace swarm
