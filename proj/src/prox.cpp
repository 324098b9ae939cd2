#include "mcps/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace mcps {

double soft_threshold(double v, double a) {
  if (v > a) return v - a;
  if (v < -a) return v + a;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double a) {
  if (!(a >= 0.0)) throw Error("soft threshold level must be nonnegative");
  return v.unaryExpr([a](double t) { return soft_threshold(t, a); });
}

double project_box(double v, double d) { return std::clamp(v, -d, d); }

Vector project_box(const Vector& v, double d) {
  if (!(d > 0.0)) throw Error("box bound must be positive");
  return v.unaryExpr([d](double t) { return project_box(t, d); });
}

}  // namespace mcps
