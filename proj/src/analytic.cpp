#include "saddle/analytic.hpp"

#include <cmath>
#include <string>

#include "saddle/error.hpp"

namespace saddle {

namespace {

Vec2 centered(const ScherkSquare& o, Vec2 q) {
  if (!(o.side > 0.0)) throw Error(ErrorKind::InvalidArgument, "analytic", "square side must be positive");
  const Vec2 c = (q - o.center) / o.side;
  if (!(std::abs(c.x) < 0.5 && std::abs(c.y) < 0.5))
    throw Error(ErrorKind::OutsideSquare, "analytic",
                "point (" + std::to_string(q.x) + ", " + std::to_string(q.y) + ") is not inside the square");
  return c;
}

}  // namespace

double scherk_value(const ScherkSquare& o, Vec2 q) {
  const Vec2 c = centered(o, q);
  const double u = o.side * std::log(std::cos(kPi * c.x) / std::cos(kPi * c.y)) / kPi;
  return o.plus_on_horizontal ? u : -u;
}

Vec2 scherk_gradient(const ScherkSquare& o, Vec2 q) {
  const Vec2 c = centered(o, q);
  const Vec2 g{-std::tan(kPi * c.x), std::tan(kPi * c.y)};
  return o.plus_on_horizontal ? g : -g;
}

}  // namespace saddle
