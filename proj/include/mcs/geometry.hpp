#ifndef MCS_GEOMETRY_HPP
#define MCS_GEOMETRY_HPP

#include <cmath>

namespace mcs {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& p, const Point& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

}  // namespace mcs

#endif  // MCS_GEOMETRY_HPP
