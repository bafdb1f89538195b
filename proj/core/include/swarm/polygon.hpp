#pragma once

#include "swarm/vec2.hpp"

#include <vector>

namespace swarm {

/// Convex allowable operating area, vertices counterclockwise.
class OperationalArea {
public:
  OperationalArea() = default;
  /// Throws std::invalid_argument unless the polygon has at least three
  /// vertices, turns strictly left at every vertex, winds exactly once and
  /// encloses nonzero area.
  explicit OperationalArea(std::vector<Vec2> vertices);

  /// Axis-aligned rectangle.
  static OperationalArea box(Vec2 lo, Vec2 hi);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t edges() const { return vertices_.size(); }

  /// Outward unit normal and offset of edge k: the half-plane is
  /// normal(k) . p <= offset(k).
  Vec2 normal(std::size_t k) const { return normals_[k]; }
  double offset(std::size_t k) const { return offsets_[k]; }

  /// Signed distance of `p` past edge k's supporting line (positive outside).
  double edge_distance(Vec2 p, std::size_t k) const { return dot(normals_[k], p) - offsets_[k]; }

  /// Max over edges of edge_distance; <= 0 inside.
  double violation(Vec2 p) const;
  bool contains(Vec2 p, double tol = 0.0) const { return violation(p) <= tol; }

  double area() const;
  /// sqrt(area), used to scale finite-difference steps.
  double length_scale() const;

  bool operator==(const OperationalArea& o) const { return vertices_ == o.vertices_; }

private:
  std::vector<Vec2> vertices_;
  std::vector<Vec2> normals_;
  std::vector<double> offsets_;
};

}  // namespace swarm
