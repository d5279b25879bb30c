#pragma once

#include "saddle/geometry.hpp"

namespace saddle {

/// Classical Scherk graph over an open square, used as a reference solution.
///
/// With centered coordinates (x, y) = (q - center) / side the height is
/// side * log(cos(pi x) / cos(pi y)) / pi, which diverges to +inf on the two
/// sides parallel to the x1 axis. `plus_on_horizontal = false` negates it.
struct ScherkSquare {
  double side = 1.0;
  Vec2 center{0.5, 0.5};
  bool plus_on_horizontal = true;
};

/// Throws OutsideSquare unless q is strictly inside the square.
double scherk_value(const ScherkSquare& o, Vec2 q);
Vec2 scherk_gradient(const ScherkSquare& o, Vec2 q);

}  // namespace saddle
