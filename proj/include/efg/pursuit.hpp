#pragma once

#include <cmath>
#include <limits>

namespace efg {

// Pursue time of one action against the action the player is currently
// locked on. gap is the cumulative-value deficit (>= 0), speed the
// per-iteration change of that deficit under the current pure profile.
//
//   speed > 0, gap > 0   -> ceil(gap / speed) iterations until the overtake
//   speed > 0, gap == 0  -> 1: an exact tie is broken after a single step
//   otherwise            -> infinity, except that a persisting exact tie
//                           (gap == 0, speed == 0) already flips the argmax
//                           when the action wins the index tie-break.
//
// The two tie guards keep phase skipping bit-compatible with replaying the
// un-skipped iterations one by one.
inline double pursue_time(double gap, double speed, bool wins_tiebreak) {
  if (speed > 0.0) {
    if (gap > 0.0) {
      // Smallest w with w * speed >= gap. ceil alone can land one off when
      // gap / speed sits at an integer; the corrections settle it with the
      // same multiply-add arithmetic the replayed iterations would use.
      double w = std::ceil(gap / speed);
      while (w > 1.0 && (w - 1.0) * speed >= gap) w -= 1.0;
      while (w * speed < gap) w += 1.0;
      return w;
    }
    return 1.0;
  }
  if (gap == 0.0 && speed == 0.0 && wins_tiebreak) return 1.0;
  return std::numeric_limits<double>::infinity();
}

}  // namespace efg
