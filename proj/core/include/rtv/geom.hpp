#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace rtv {

/// Planar point, coordinates in kilometers.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double euclidean_distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Distance oracle: Euclidean plane or an explicit symmetric matrix over a
/// fixed point set. Explicit matrices are validated on construction
/// (square, symmetric, nonnegative, zero diagonal, triangle inequality).
class Metric {
 public:
  Metric() = default;

  static Metric euclidean() { return Metric(); }

  /// Throws std::invalid_argument naming the failing property.
  static Metric explicit_matrix(std::vector<Point> points,
                                std::vector<std::vector<double>> matrix);

  bool is_euclidean() const { return matrix_.empty(); }

  /// Distance in kilometers. For explicit matrices both points must belong
  /// to the registered point set (throws std::invalid_argument otherwise).
  double distance(const Point& a, const Point& b) const;

  const std::vector<Point>& points() const { return points_; }
  const std::vector<std::vector<double>>& matrix() const { return matrix_; }

 private:
  std::size_t index_of(const Point& p) const;

  std::vector<Point> points_;
  std::vector<std::vector<double>> matrix_;
  std::map<std::pair<double, double>, std::size_t> index_;
};

}  // namespace rtv
