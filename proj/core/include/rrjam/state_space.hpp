#ifndef RRJAM_STATE_SPACE_HPP
#define RRJAM_STATE_SPACE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrjam/channel.hpp"

namespace rrjam {

// The 2^m subsets of stations, indexed by binary encoding: state index
// sum_{k in T} 2^(k-1) with the SUT as station 1 (bit 0).
struct StateSpace {
  int m = 0;
  int size = 0; // 2^m

  static StateSpace make(int m); // validates 1 <= m <= 12 (dense work cap)

  bool sut_active(int state) const { return (state & 1) != 0; }
  int active_count(int state) const { return __builtin_popcount(static_cast<unsigned>(state)); }
  bool station_active(int state, int k) const { return (state >> k) & 1; }

  // Collision states: SUT active together with at least one other station.
  bool is_collision(int state) const { return sut_active(state) && active_count(state) > 1; }

  // Indicator column vector over states of the collision set.
  Eigen::VectorXd collision_indicator() const;

  // Human-readable 1-based label, e.g. "{}", "{1,3}".
  std::string label(int state) const;
};

}  // namespace rrjam

#endif
