#include "rrjam/state_space.hpp"

#include "rrjam/errors.hpp"

namespace rrjam {

StateSpace StateSpace::make(int m) {
  if (m < 1) throw ValidationError("state space: m must be >= 1");
  if (m > 12)
    throw ValidationError("state space: m capped at 12 (dense spectral work beyond 4096 states "
                          "is unsupported)");
  StateSpace s;
  s.m = m;
  s.size = 1 << m;
  return s;
}

Eigen::VectorXd StateSpace::collision_indicator() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(size);
  for (int i = 0; i < size; ++i)
    if (is_collision(i)) t[i] = 1.0;
  return t;
}

std::string StateSpace::label(int state) const {
  std::string out = "{";
  bool first = true;
  for (int k = 0; k < m; ++k) {
    if ((state >> k) & 1) {
      if (!first) out += ",";
      out += std::to_string(k + 1);
      first = false;
    }
  }
  out += "}";
  return out;
}

}  // namespace rrjam
